#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frbs/series.hpp"

namespace frbs {

/// Synthetic-data recipe: functional AR(1) covariates on n_terms cosine
/// modes with eigenvalues m^-2, piecewise slope alternating between two
/// smoothness levels scaled by c_beta.
struct ScenarioSpec {
    int n = 400;
    int p = 200;
    std::vector<int> change_points;  // strictly inside (0, n)
    double c_beta = 1.0;
    double ar_coeff = 0.3;
    int n_terms = 50;
    std::uint64_t seed = 0;
};

struct GroundTruth {
    std::vector<int> change_points;
    std::vector<GridFunction> slope_segments;  // change count + 1 entries
    std::vector<double> kappa_sq_true;         // one per change
};

/// phi_1 = 1, phi_{m+1}(t) = sqrt(2) cos(m pi t), sampled on the grid.
GridFunction eigenfunction(int m, const Grid& grid);

struct SimulatedData {
    FunctionalSeries data;
    GroundTruth truth;
};

/// Draws (y, X) from the scenario recipe; bit-identical for a fixed seed.
SimulatedData generate(const ScenarioSpec& spec);

/// "S1": one change at n/2. "S2": changes at n/4 and 5n/8. p = 200.
ScenarioSpec scenario_presets(const std::string& name, int n, double c_beta, std::uint64_t seed);

}  // namespace frbs
