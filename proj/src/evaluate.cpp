#include "frbs/evaluate.hpp"

#include <cmath>
#include <limits>

#include "frbs/errors.hpp"

namespace frbs {

namespace {

double max_min_distance(const std::vector<int>& from, const std::vector<int>& to) {
    double worst = 0.0;
    for (int a : from) {
        double nearest = std::numeric_limits<double>::infinity();
        for (int b : to) nearest = std::min(nearest, static_cast<double>(std::abs(a - b)));
        worst = std::max(worst, nearest);
    }
    return worst;
}

}  // namespace

double hausdorff(const std::vector<int>& estimates, const std::vector<int>& truths, int n) {
    if (n < 1) throw std::invalid_argument("hausdorff: n must be >= 1");
    std::vector<int> est = estimates;
    est.push_back(1);
    est.push_back(n + 1);
    std::vector<int> tru = truths;
    tru.push_back(0);
    tru.push_back(n);
    const double d = std::max(max_min_distance(est, tru), max_min_distance(tru, est));
    return d / static_cast<double>(n);
}

bool coverage(std::pair<double, double> interval, int eta_true) {
    if (interval.first > interval.second)
        throw std::invalid_argument("coverage: interval must have lo <= hi");
    return interval.first <= eta_true && eta_true <= interval.second;
}

std::vector<double> default_lambda_grid() { return {0.1, 0.2, 0.3, 0.4, 0.5}; }

std::vector<double> default_tau_grid(int n) {
    // grid spans the same range as tuning the halved log-likelihood-ratio
    // over {1, 1.5, 2, 2.5, 3} n^{2/5}; W here is the full RSS difference
    // (twice the log ratio), so the candidates are doubled to match
    const double base = std::pow(static_cast<double>(n), 0.4);
    return {2.0 * base, 3.0 * base, 4.0 * base, 5.0 * base, 6.0 * base};
}

CrossValidationResult cross_validate(const FunctionalSeries& data, const Kernel& kernel,
                                     const std::vector<double>& lambda_grid,
                                     const std::vector<double>& tau_grid,
                                     const DetectorConfig& config) {
    if (lambda_grid.empty() || tau_grid.empty())
        throw std::invalid_argument("cross_validate: empty grid");
    const int n = data.n();
    if (n < 2 * config.min_fit_len)
        throw std::invalid_argument("cross_validate: series too short to split");

    // odd-indexed half trains, even-indexed half scores (1-based indices)
    const int n_train = (n + 1) / 2;
    const int n_test = n / 2;
    FunctionalSeries train;
    train.grid = data.grid;
    train.y.resize(n_train);
    train.x.resize(n_train, data.grid.p);
    for (int i = 0; i < n_train; ++i) {
        train.y[i] = data.y[2 * i];
        train.x.row(i) = data.x.row(2 * i);
    }

    SeriesDesign train_design(train, kernel);
    SeededIntervalSet intervals = seeded_intervals(n_train, config.delta_for(n_train));

    CrossValidationResult result;
    result.loss_table.assign(lambda_grid.size(),
                             std::vector<double>(tau_grid.size(),
                                                 std::numeric_limits<double>::quiet_NaN()));
    double best_loss = std::numeric_limits<double>::infinity();
    bool any_ok = false;

    for (std::size_t li = 0; li < lambda_grid.size(); ++li) {
        DetectorConfig cv_config = config;
        cv_config.lambda_rule = LambdaRule::constant(lambda_grid[li]);
        ScanEngine engine(train_design, cv_config.lambda_rule, cv_config.margin,
                          cv_config.min_fit_len);
        const std::vector<ScanResult> stats = engine.scan_all(intervals, config.threads);

        for (std::size_t ti = 0; ti < tau_grid.size(); ++ti) {
            try {
                PreliminarySet prelim = frbs_from_stats(stats, n_train, tau_grid[ti]);

                // segment fits between consecutive train change points
                std::vector<int> bounds = {0};
                for (int b : prelim.estimators) bounds.push_back(b);
                bounds.push_back(n_train);
                std::vector<GridFunction> slopes;
                for (std::size_t sgi = 0; sgi + 1 < bounds.size(); ++sgi) {
                    IndexRange seg{bounds[sgi], bounds[sgi + 1]};
                    slopes.push_back(
                        train_design.fit(seg, lambda_grid[li]).slope);
                }

                double loss = 0.0;
                for (int i = 0; i < n_test; ++i) {
                    // test 1-based index 2(i+1) maps to train index i+1
                    const int train_idx = i + 1;
                    std::size_t sgi = 0;
                    while (sgi + 2 < bounds.size() && train_idx > bounds[sgi + 1]) ++sgi;
                    const auto x_test = data.x.row(2 * i + 1).transpose();
                    const double pred = inner_l2(x_test, slopes[sgi], data.grid);
                    const double err = data.y[2 * i + 1] - pred;
                    loss += err * err;
                }
                result.loss_table[li][ti] = loss;
                any_ok = true;
                if (loss < best_loss) {  // strict: ties keep smaller lambda, then tau
                    best_loss = loss;
                    result.lambda = lambda_grid[li];
                    result.tau = tau_grid[ti];
                }
            } catch (const SingularSystemError&) {
                // leave NaN in the loss table; configuration is skipped
            }
        }
    }
    if (!any_ok) throw TuningError("cross_validate: every (lambda, tau) configuration failed");
    return result;
}

DetectionSummary detection_summary(const std::vector<EvalReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("detection_summary: no reports");
    DetectionSummary s;
    double sum_pre = 0.0, sum_fin = 0.0;
    for (const auto& r : reports) {
        s.prop_under += r.under ? 1.0 : 0.0;
        s.prop_over += r.over ? 1.0 : 0.0;
        sum_pre += r.hausdorff_pre;
        sum_fin += r.hausdorff_fin;
    }
    const double nr = static_cast<double>(reports.size());
    s.prop_under /= nr;
    s.prop_over /= nr;
    s.mean_h_pre = sum_pre / nr;
    s.mean_h_fin = sum_fin / nr;
    double var_pre = 0.0, var_fin = 0.0;
    for (const auto& r : reports) {
        var_pre += (r.hausdorff_pre - s.mean_h_pre) * (r.hausdorff_pre - s.mean_h_pre);
        var_fin += (r.hausdorff_fin - s.mean_h_fin) * (r.hausdorff_fin - s.mean_h_fin);
    }
    if (reports.size() > 1) {
        s.sd_h_pre = std::sqrt(var_pre / (nr - 1.0));
        s.sd_h_fin = std::sqrt(var_fin / (nr - 1.0));
    }

    double cov_sum = 0.0, width_sum = 0.0;
    long cov_count = 0, width_count = 0;
    for (const auto& r : reports) {
        if (r.k_hat != r.k_true) continue;
        ++s.n_exact;
        for (bool c : r.covered) {
            cov_sum += c ? 1.0 : 0.0;
            ++cov_count;
        }
        for (double w : r.widths) {
            width_sum += w;
            ++width_count;
        }
    }
    if (cov_count > 0) s.mean_coverage = cov_sum / static_cast<double>(cov_count);
    if (width_count > 0) s.mean_width = width_sum / static_cast<double>(width_count);
    return s;
}

}  // namespace frbs
