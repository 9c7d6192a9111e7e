#pragma once

#include <Eigen/Dense>

#include "frbs/grid.hpp"

namespace frbs {

/// n scalar responses paired with n covariate curves sampled on one shared
/// grid. Row j of x holds X_{j+1} on the grid (0-based rows; index ranges
/// (s, e] follow the 1-based time convention, so range (s, e] covers rows
/// s..e-1).
struct FunctionalSeries {
    Eigen::VectorXd y;   // n
    Eigen::MatrixXd x;   // n x p
    Grid grid;

    int n() const { return static_cast<int>(y.size()); }

    void check_range(const IndexRange& seg, const char* what) const {
        if (!(0 <= seg.s && seg.s < seg.e && seg.e <= n()))
            throw std::invalid_argument(std::string(what) + ": bad segment (s,e]");
    }
};

}  // namespace frbs
