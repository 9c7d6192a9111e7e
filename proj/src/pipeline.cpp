#include "frbs/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "frbs/rng.hpp"

namespace frbs {

ChangePointReport detect_changes(const FunctionalSeries& data, const Kernel& kernel,
                                 DetectorConfig config, bool run_cv) {
    const int n = data.n();
    ChangePointReport report;
    report.seed = config.seed;
    report.alpha = config.alpha;
    report.mc_budget = config.mc_budget;

    if (run_cv) {
        CrossValidationResult cv = cross_validate(data, kernel, default_lambda_grid(),
                                                  default_tau_grid(n), config);
        config.lambda_rule = LambdaRule::constant(cv.lambda);
        config.tau = cv.tau;
        report.tuned_by_cv = true;
    }
    report.lambda_is_decay = config.lambda_rule.kind == LambdaRule::Kind::Decay;
    report.lambda_used = config.lambda_rule.value;
    report.omega_used = config.lambda_rule.omega;
    report.r_used = config.lambda_rule.r;
    report.tau_used = config.tau_for(n);
    report.delta_used = config.delta_for(n);

    SeriesDesign design(data, kernel);
    SeededIntervalSet intervals = seeded_intervals(n, report.delta_used);
    PreliminarySet prelim = frbs(design, intervals, config);
    report.preliminary = prelim.estimators;
    if (prelim.estimators.empty()) return report;

    // refinement
    std::vector<RefinedChangePoint> refined;
    std::vector<int> refined_etas;
    for (std::size_t k = 0; k < prelim.estimators.size(); ++k) {
        IndexRange search = refined_interval(prelim.estimators[k], intervals);
        RefinedChangePoint rcp = refine(design, prelim.estimators[k], search, config);
        rcp.k = static_cast<int>(k);
        refined_etas.push_back(rcp.eta_tilde);
        report.refined.push_back(rcp.eta_tilde);
        report.search_intervals.push_back(search);
        report.refine_degraded.push_back(rcp.degraded);
        refined.push_back(std::move(rcp));
    }

    // inference per change
    int q = config.q ? *config.q : std::max(2, default_q(report.search_intervals));
    for (std::size_t k = 0; k < refined.size(); ++k) {
        InferenceResult inf;
        inf.k = static_cast<int>(k);
        inf.q = q;
        inf.alpha = config.alpha;
        std::string note;
        bool ok = false;
        if (!refined[k].has_fits) {
            note = "no slope fits on the refined interval halves";
        } else {
            CovarianceOperator cov = sample_cov(data, refined[k].search);
            inf.kappa_sq_hat =
                estimate_kappa_sq(refined[k].fit_left, refined[k].fit_right, cov, data.grid);
            if (inf.kappa_sq_hat <= 0.0) {
                note = "estimated change size is zero";
            } else {
                try {
                    inf.sigma_inf_sq_hat =
                        lrv(design, std::sqrt(inf.kappa_sq_hat), refined[k].fit_left,
                            refined[k].fit_right, refined_etas, q, config.lambda_rule);
                    std::vector<double> samples = simulate_argmin(
                        std::sqrt(inf.sigma_inf_sq_hat), n, config.mc_budget,
                        mix_seed(config.seed, 0xC1u, static_cast<std::uint64_t>(k)),
                        config.threads);
                    auto [lo, hi] =
                        confidence_interval(refined[k].eta_tilde, inf.kappa_sq_hat, samples,
                                            config.alpha);
                    inf.lo = lo;
                    inf.hi = hi;
                    inf.degenerate = lo == hi;
                    ok = true;
                } catch (const InsufficientDataError& e) {
                    note = e.what();
                }
            }
        }
        report.inference.push_back(inf);
        report.inference_ok.push_back(ok);
        report.inference_note.push_back(note);
    }
    return report;
}

EvalReport evaluate_report(const ChangePointReport& report, const std::vector<int>& truth,
                           int n) {
    EvalReport ev;
    ev.k_hat = static_cast<int>(report.refined.size());
    ev.k_true = static_cast<int>(truth.size());
    ev.under = ev.k_hat < ev.k_true;
    ev.over = ev.k_hat > ev.k_true;
    ev.hausdorff_pre = hausdorff(report.preliminary, truth, n);
    ev.hausdorff_fin = hausdorff(report.refined, truth, n);
    if (ev.k_hat == ev.k_true) {
        for (std::size_t k = 0; k < truth.size(); ++k) {
            if (k < report.inference.size() && report.inference_ok[k]) {
                const auto& inf = report.inference[k];
                ev.covered.push_back(coverage({inf.lo, inf.hi}, truth[k]));
                ev.widths.push_back(inf.hi - inf.lo);
            }
        }
    }
    return ev;
}

}  // namespace frbs
