#include "frbs/regress.hpp"

#include <cmath>

namespace frbs {

double LambdaRule::at(int m) const {
    if (m < 1) throw std::invalid_argument("LambdaRule::at: segment length must be >= 1");
    if (kind == Kind::Constant) return value;
    return omega * std::pow(static_cast<double>(m), -2.0 * r / (2.0 * r + 1.0));
}

namespace detail {

Eigen::VectorXd solve_dual(const Eigen::MatrixXd& gram_block, const Eigen::VectorXd& y_seg,
                           double lambda, bool* used_pinv) {
    const int m = static_cast<int>(y_seg.size());
    if (used_pinv) *used_pinv = false;
    Eigen::MatrixXd sys = gram_block;
    sys.diagonal().array() += m * lambda;

    if (lambda > 0.0) {
        Eigen::LLT<Eigen::MatrixXd> llt(sys);
        if (llt.info() == Eigen::Success) return llt.solve(y_seg);
        throw SingularSystemError("fit_slope: factorization failed with lambda > 0",
                                  std::numeric_limits<double>::infinity());
    }

    // lambda = 0: try a plain Cholesky, fall back to an eigendecomposition
    // pseudo-inverse when M is rank-deficient.
    {
        Eigen::LLT<Eigen::MatrixXd> llt(sys);
        if (llt.info() == Eigen::Success) {
            Eigen::VectorXd c = llt.solve(y_seg);
            if ((sys * c - y_seg).norm() <= 1e-8 * std::max(1e-300, y_seg.norm())) return c;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sys);
    const Eigen::VectorXd& ev = eig.eigenvalues();
    const double emax = std::max(0.0, ev.maxCoeff());
    const double tol = 1e-12 * std::max(emax, 1.0);
    Eigen::VectorXd inv = ev.unaryExpr([tol](double v) { return v > tol ? 1.0 / v : 0.0; });
    Eigen::VectorXd c =
        eig.eigenvectors() * inv.asDiagonal() * (eig.eigenvectors().transpose() * y_seg);
    const double resid = (sys * c - y_seg).norm();
    if (resid > 1e-6 * std::max(1e-300, y_seg.norm())) {
        const double emin_pos = ev.unaryExpr([tol](double v) { return v > tol ? v : 1.0; }).minCoeff();
        throw SingularSystemError("fit_slope: singular system at lambda = 0 (y outside range of M)",
                                  emax / std::max(emin_pos, 1e-300));
    }
    if (used_pinv) *used_pinv = true;
    return c;
}

double primal_rss(const Eigen::MatrixXd& gp, const Eigen::VectorXd& d,
                  const Eigen::Ref<const Eigen::MatrixXd>& feat_rows,
                  const Eigen::Ref<const Eigen::VectorXd>& y_seg, double lambda) {
    const int m = static_cast<int>(y_seg.size());
    Eigen::MatrixXd sys = gp;
    sys.diagonal().array() += m * lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(sys);
    Eigen::VectorXd theta;
    if (llt.info() == Eigen::Success) {
        theta = llt.solve(d);
    } else {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(sys);
        theta = ldlt.solve(d);
    }
    return (y_seg - feat_rows * theta).squaredNorm();
}

}  // namespace detail

SegmentFit fit_slope(const FunctionalSeries& data, const Eigen::MatrixXd& kmat,
                     IndexRange segment, double lambda, const GramMatrix& gram) {
    data.check_range(segment, "fit_slope");
    if (lambda < 0.0) throw std::invalid_argument("fit_slope: lambda must be >= 0");
    if (!(gram.segment == segment))
        throw std::invalid_argument("fit_slope: gram matrix built for a different segment");
    const int m = segment.len();

    SegmentFit fit;
    fit.segment = segment;
    fit.lambda = lambda;
    fit.coeffs = detail::solve_dual(gram.m, data.y.segment(segment.s, m), lambda, &fit.used_pinv);
    fit.fitted = gram.m * fit.coeffs;
    fit.rss = (data.y.segment(segment.s, m) - fit.fitted).squaredNorm();
    // slope = K W A_seg^T c, evaluated on the grid
    Eigen::VectorXd ac = data.x.middleRows(segment.s, m).transpose() * fit.coeffs;
    fit.slope = kmat * data.grid.weights.cwiseProduct(ac);
    return fit;
}

double predict(const SegmentFit& fit, const GridFunction& x_new, const Grid& grid) {
    return inner_l2(x_new, fit.slope, grid);
}

std::optional<double> RssCache::get(IndexRange seg) {
    auto it = map_.find(key(seg));
    if (it == map_.end()) return std::nullopt;
    order_.splice(order_.begin(), order_, it->second);
    return it->second->second;
}

void RssCache::put(IndexRange seg, double rss) {
    const std::uint64_t k = key(seg);
    auto it = map_.find(k);
    if (it != map_.end()) {
        it->second->second = rss;
        order_.splice(order_.begin(), order_, it->second);
        return;
    }
    order_.emplace_front(k, rss);
    map_[k] = order_.begin();
    if (map_.size() > capacity_) {
        map_.erase(order_.back().first);
        order_.pop_back();
    }
}

SeriesDesign::SeriesDesign(const FunctionalSeries& data, const Kernel& kernel) : data_(&data) {
    const Grid& grid = data.grid;
    kmat_ = kernel_matrix(kernel, grid);

    aw_ = data.x * grid.weights.asDiagonal();
    awk_ = aw_ * kmat_;

    // Eigendecompose W^{1/2} K W^{1/2}; clamp round-off negatives, reject
    // anything genuinely indefinite.
    Eigen::VectorXd wsqrt = grid.weights.cwiseSqrt();
    Eigen::MatrixXd wkw = wsqrt.asDiagonal() * kmat_ * wsqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig((wkw + wkw.transpose()) * 0.5);
    const double trace = eig.eigenvalues().sum();
    const double floor = -1e-8 * std::abs(trace);
    if (eig.eigenvalues().minCoeff() < floor)
        throw std::invalid_argument("SeriesDesign: kernel matrix is not positive semi-definite");
    Eigen::VectorXd shalf =
        eig.eigenvalues().unaryExpr([](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });
    // features = A W^{1/2} V S^{1/2}; feature Gram reproduces A W K W A^T
    features_ = data.x * wsqrt.asDiagonal() * eig.eigenvectors() * shalf.asDiagonal();
}

GramMatrix SeriesDesign::gram(IndexRange segment) const {
    data_->check_range(segment, "gram");
    const int m = segment.len();
    Eigen::MatrixXd M = awk_.middleRows(segment.s, m) * aw_.middleRows(segment.s, m).transpose();
    M = ((M + M.transpose()) * 0.5).eval();
    return GramMatrix{std::move(M), segment};
}

SegmentFit SeriesDesign::fit(IndexRange segment, double lambda) const {
    return fit_slope(*data_, kmat_, segment, lambda, gram(segment));
}

double SeriesDesign::rss(IndexRange segment, double lambda) const {
    data_->check_range(segment, "rss");
    const int m = segment.len();
    const int p = data_->grid.p;
    const auto y_seg = data_->y.segment(segment.s, m);
    if (m <= p) {
        GramMatrix g = gram(segment);
        Eigen::VectorXd c = detail::solve_dual(g.m, y_seg, lambda, nullptr);
        return (y_seg - g.m * c).squaredNorm();
    }
    const auto rows = features_.middleRows(segment.s, m);
    Eigen::MatrixXd gp = rows.transpose() * rows;
    Eigen::VectorXd d = rows.transpose() * y_seg;
    return detail::primal_rss(gp, d, rows, y_seg, lambda);
}

double segment_rss(const SeriesDesign& design, IndexRange segment, const LambdaRule& rule,
                   RssCache& cache) {
    if (auto hit = cache.get(segment)) return *hit;
    const double value = design.rss(segment, rule.at(segment.len()));
    cache.put(segment, value);
    return value;
}

}  // namespace frbs
