#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "frbs/grid.hpp"
#include "frbs/series.hpp"

namespace frbs {

/// Reproducing kernel on [0,1]^2: symmetric, nonnegative definite.
struct Kernel {
    std::function<double(double, double)> eval;
    std::string name;
};

/// First-order Sobolev space W_2^1 kernel,
///   K(s,t) = cosh(s) cosh(1-t) / sinh(1)  for s <= t.
Kernel sobolev_kernel();

/// p x p matrix K(nodes_i, nodes_j); symmetrised to remove evaluator
/// round-off asymmetry.
Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const Grid& grid);

/// (L_K f)(node_i) = sum_j w_j K(node_i, node_j) f_j.
GridFunction kernel_smooth(const Kernel& kernel, const GridFunction& f, const Grid& grid);
GridFunction kernel_smooth(const Eigen::MatrixXd& kmat, const GridFunction& f, const Grid& grid);

/// Segment Gram matrix M_ij = <X_i, L_K X_j> over curves in (s, e].
struct GramMatrix {
    Eigen::MatrixXd m;
    IndexRange segment;
};

GramMatrix gram(const Kernel& kernel, const FunctionalSeries& data, IndexRange segment);
GramMatrix gram(const Eigen::MatrixXd& kmat, const FunctionalSeries& data, IndexRange segment);

}  // namespace frbs
