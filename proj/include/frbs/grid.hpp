#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace frbs {

/// A function sampled on a Grid, one value per node.
using GridFunction = Eigen::VectorXd;

/// Evenly spaced nodes on [0,1] with trapezoid quadrature weights.
/// Weights sum to 1; all L2 inner products in the library go through them.
struct Grid {
    int p = 0;
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;

    bool same_as(const Grid& other) const {
        return p == other.p;
    }
};

/// Half-open integer index range (s, e], 0 <= s < e <= n.
struct IndexRange {
    int s = 0;
    int e = 0;
    int len() const { return e - s; }
    bool contains(int t) const { return s < t && t <= e; }
    bool inside(const IndexRange& outer) const { return outer.s <= s && e <= outer.e; }
    bool operator==(const IndexRange& o) const { return s == o.s && e == o.e; }
};

Grid make_grid(int p);

/// Trapezoid approximation of the L2 inner product: sum_i w_i f_i g_i.
/// The accumulation order is fixed, so inner_l2(f,g) == inner_l2(g,f) bitwise.
double inner_l2(const GridFunction& f, const GridFunction& g, const Grid& grid);

inline void check_on_grid(const GridFunction& f, const Grid& grid, const char* what) {
    if (f.size() != grid.p)
        throw std::invalid_argument(std::string(what) + ": function not sampled on this grid");
}

}  // namespace frbs
