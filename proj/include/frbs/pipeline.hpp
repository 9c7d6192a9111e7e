#pragma once

#include <string>
#include <vector>

#include "frbs/detect.hpp"
#include "frbs/evaluate.hpp"
#include "frbs/inference.hpp"

namespace frbs {

inline constexpr const char* kVersion = "0.1.0";

/// Full pipeline output for one series: preliminary and refined estimators
/// plus per-change inference.
struct ChangePointReport {
    std::vector<int> preliminary;
    std::vector<int> refined;
    std::vector<IndexRange> search_intervals;  // (s_k, e_k] per change
    std::vector<bool> refine_degraded;
    std::vector<InferenceResult> inference;
    std::vector<bool> inference_ok;
    std::vector<std::string> inference_note;
    double lambda_used = 0.0;
    bool lambda_is_decay = false;
    double omega_used = 0.0;
    double r_used = 1.0;
    double tau_used = 0.0;
    int delta_used = 0;
    double alpha = 0.05;
    int mc_budget = 0;
    std::uint64_t seed = 0;
    bool tuned_by_cv = false;
};

/// Runs tune (optional) -> FRBS -> refinement -> inference.
ChangePointReport detect_changes(const FunctionalSeries& data, const Kernel& kernel,
                                 DetectorConfig config, bool run_cv);

/// Per-replication evaluation of a report against a known truth.
EvalReport evaluate_report(const ChangePointReport& report, const std::vector<int>& truth,
                           int n);

}  // namespace frbs
