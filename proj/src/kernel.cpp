#include "frbs/kernel.hpp"

#include <cmath>

namespace frbs {

Kernel sobolev_kernel() {
    Kernel k;
    k.name = "sobolev_w21";
    const double sinh1 = std::sinh(1.0);
    k.eval = [sinh1](double s, double t) {
        if (s < 0.0 || s > 1.0 || t < 0.0 || t > 1.0)
            throw std::invalid_argument("sobolev_kernel: arguments must lie in [0,1]");
        const double lo = std::min(s, t);
        const double hi = std::max(s, t);
        return std::cosh(lo) * std::cosh(1.0 - hi) / sinh1;
    };
    return k;
}

Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const Grid& grid) {
    const int p = grid.p;
    Eigen::MatrixXd K(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) {
            const double v = kernel.eval(grid.nodes[i], grid.nodes[j]);
            K(i, j) = v;
            K(j, i) = v;
        }
    return K;
}

GridFunction kernel_smooth(const Eigen::MatrixXd& kmat, const GridFunction& f, const Grid& grid) {
    check_on_grid(f, grid, "kernel_smooth");
    return kmat * grid.weights.cwiseProduct(f);
}

GridFunction kernel_smooth(const Kernel& kernel, const GridFunction& f, const Grid& grid) {
    return kernel_smooth(kernel_matrix(kernel, grid), f, grid);
}

GramMatrix gram(const Eigen::MatrixXd& kmat, const FunctionalSeries& data, IndexRange segment) {
    data.check_range(segment, "gram");
    const int m = segment.len();
    // M = (A W) K (A W)^T with A the m x p curve block, W = diag(weights)
    Eigen::MatrixXd aw =
        data.x.middleRows(segment.s, m) * data.grid.weights.asDiagonal();
    Eigen::MatrixXd M = aw * kmat * aw.transpose();
    M = ((M + M.transpose()) * 0.5).eval();
    return GramMatrix{std::move(M), segment};
}

GramMatrix gram(const Kernel& kernel, const FunctionalSeries& data, IndexRange segment) {
    return gram(kernel_matrix(kernel, data.grid), data, segment);
}

}  // namespace frbs
