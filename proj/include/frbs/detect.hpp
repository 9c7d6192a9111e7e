#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "frbs/segment.hpp"

namespace frbs {

/// Tuning state for the full detection pipeline. Fields left unset fall back
/// to the documented rules: tau = 2 n^{2/5}, delta = n/10, q by default_q.
struct DetectorConfig {
    LambdaRule lambda_rule = LambdaRule::constant(0.2);
    std::optional<double> tau;
    std::optional<int> delta;
    int margin = 10;
    int min_fit_len = 10;
    double alpha = 0.05;
    int mc_budget = 2000;  // B
    std::optional<int> q;
    std::uint64_t seed = 0;
    int threads = 1;
    std::size_t cache_capacity = 512;

    double tau_for(int n) const;
    int delta_for(int n) const;
};

/// Preliminary estimators with, for each one, the seeded interval and
/// statistic value that produced it.
struct PreliminarySet {
    struct Provenance {
        IndexRange interval;
        double value = 0.0;
    };
    std::vector<int> estimators;  // strictly increasing
    std::vector<Provenance> provenance;
};

/// Narrowest-over-threshold recursion on precomputed per-interval scan
/// results. Within the active window, among fully contained intervals whose
/// statistic exceeds tau, the shortest (ties: leftmost) wins; its argmax is
/// recorded and both sides are searched recursively.
PreliminarySet frbs_from_stats(const std::vector<ScanResult>& stats, int n, double tau);

PreliminarySet frbs(const SeriesDesign& design, const SeededIntervalSet& intervals,
                    const DetectorConfig& config);

/// Union of the last-layer seeded intervals containing eta_hat; widened with
/// the nearest last-layer neighbour when only one contains it.
IndexRange refined_interval(int eta_hat, const SeededIntervalSet& intervals);

struct RefinedChangePoint {
    int k = 0;
    IndexRange search;  // (s_k, e_k]
    int eta_hat = 0;
    int eta_tilde = 0;
    SegmentFit fit_left;   // on (s_k, eta_hat]
    SegmentFit fit_right;  // on (eta_hat, e_k]
    bool degraded = false;  // a half-segment was too short; eta_tilde = eta_hat
    bool has_fits = false;
};

/// Local refinement: eta_tilde = argmin_t Q_k(t) with
///   Q_k(t) = sum_{j<=t} (y_j - <X_j, beta_L>)^2 + sum_{j>t} (y_j - <X_j, beta_R>)^2
/// over t in (s_k, e_k), computed by prefix sums of the two residual streams.
/// Ties resolve to the t closest to eta_hat, then to the smallest t. A
/// minimizer on the scan boundary degrades to the preliminary estimator
/// (flagged), as does a half-segment shorter than min_fit_len.
RefinedChangePoint refine(const SeriesDesign& design, int eta_hat, IndexRange search,
                          const DetectorConfig& config);

}  // namespace frbs
