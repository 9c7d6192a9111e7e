#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "frbs/detect.hpp"

namespace frbs {

/// Per-replication evaluation record.
struct EvalReport {
    int k_hat = 0;
    int k_true = 0;
    bool under = false;
    bool over = false;
    double hausdorff_pre = 0.0;
    double hausdorff_fin = 0.0;
    std::vector<bool> covered;    // per true change, only when k_hat == k_true
    std::vector<double> widths;   // matching widths
};

/// Scaled Hausdorff distance between estimated and true change points with
/// the boundary augmentation est + {1, n+1}, true + {0, n}.
double hausdorff(const std::vector<int>& estimates, const std::vector<int>& truths, int n);

/// Closed-interval containment indicator.
bool coverage(std::pair<double, double> interval, int eta_true);

struct CrossValidationResult {
    double lambda = 0.0;
    double tau = 0.0;
    // loss_table[i][j] = validation loss at (lambda_grid[i], tau_grid[j])
    std::vector<std::vector<double>> loss_table;
};

/// Odd/even split tuning of (lambda, tau): FRBS runs on the odd-indexed
/// half, the even-indexed half scores squared prediction error against the
/// fitted segment slopes. Ties resolve to the smaller lambda, then tau.
CrossValidationResult cross_validate(const FunctionalSeries& data, const Kernel& kernel,
                                     const std::vector<double>& lambda_grid,
                                     const std::vector<double>& tau_grid,
                                     const DetectorConfig& config);

/// The paper-style tuning grids: lambda in {0.1..0.5}, tau in
/// {1, 1.5, 2, 2.5, 3} * n^{2/5}.
std::vector<double> default_lambda_grid();
std::vector<double> default_tau_grid(int n);

struct DetectionSummary {
    double prop_under = 0.0;
    double prop_over = 0.0;
    double mean_h_pre = 0.0;
    double sd_h_pre = 0.0;
    double mean_h_fin = 0.0;
    double sd_h_fin = 0.0;
    int n_exact = 0;  // replications with k_hat == k_true
    std::optional<double> mean_coverage;  // over exact replications only
    std::optional<double> mean_width;
};

DetectionSummary detection_summary(const std::vector<EvalReport>& reports);

}  // namespace frbs
