#include "frbs/detect.hpp"

#include <algorithm>
#include <cmath>

namespace frbs {

double DetectorConfig::tau_for(int n) const {
    if (tau) return *tau;
    // midpoint of the tuning grid (see default_tau_grid for the scale)
    return 4.0 * std::pow(static_cast<double>(n), 0.4);
}

int DetectorConfig::delta_for(int n) const {
    if (delta) return *delta;
    return std::max(2, n / 10);
}

namespace {

void frbs_recurse(const std::vector<ScanResult>& stats, IndexRange window, double tau,
                  PreliminarySet& out) {
    int best = -1;
    for (int m = 0; m < static_cast<int>(stats.size()); ++m) {
        const ScanResult& r = stats[m];
        if (!r.valid || !r.interval.inside(window)) continue;
        if (!(r.max_value > tau)) continue;
        if (best < 0 || r.interval.len() < stats[best].interval.len() ||
            (r.interval.len() == stats[best].interval.len() && r.interval.s < stats[best].interval.s))
            best = m;  // shortest wins, ties to the leftmost start
    }
    if (best < 0) return;
    const ScanResult& chosen = stats[best];
    out.estimators.push_back(chosen.argmax_b);
    out.provenance.push_back({chosen.interval, chosen.max_value});
    frbs_recurse(stats, {window.s, chosen.argmax_b}, tau, out);
    frbs_recurse(stats, {chosen.argmax_b, window.e}, tau, out);
}

}  // namespace

PreliminarySet frbs_from_stats(const std::vector<ScanResult>& stats, int n, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("frbs: tau must be > 0");
    PreliminarySet out;
    frbs_recurse(stats, {0, n}, tau, out);
    // sort estimators, carrying provenance along
    std::vector<int> order(out.estimators.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return out.estimators[a] < out.estimators[b]; });
    PreliminarySet sorted;
    for (int i : order) {
        sorted.estimators.push_back(out.estimators[i]);
        sorted.provenance.push_back(out.provenance[i]);
    }
    return sorted;
}

PreliminarySet frbs(const SeriesDesign& design, const SeededIntervalSet& intervals,
                    const DetectorConfig& config) {
    const int n = design.data().n();
    if (intervals.n != n) throw std::invalid_argument("frbs: interval set built for different n");
    ScanEngine engine(design, config.lambda_rule, config.margin, config.min_fit_len);
    const std::vector<ScanResult> stats = engine.scan_all(intervals, config.threads);
    return frbs_from_stats(stats, n, config.tau_for(n));
}

IndexRange refined_interval(int eta_hat, const SeededIntervalSet& intervals) {
    const auto& last = intervals.last_layer();
    if (last.empty()) throw std::invalid_argument("refined_interval: empty last layer");
    if (!(0 < eta_hat && eta_hat < intervals.n))
        throw std::invalid_argument("refined_interval: eta_hat must lie in (0, n)");

    std::vector<const IndexRange*> containing;
    for (const auto& iv : last)
        if (iv.contains(eta_hat)) containing.push_back(&iv);

    if (containing.empty()) {
        // eta between rounded intervals; fall back to the nearest one
        const IndexRange* nearest = &last.front();
        double best = 1e300;
        for (const auto& iv : last) {
            const double mid = 0.5 * (iv.s + iv.e);
            const double dist = std::abs(mid - eta_hat);
            if (dist < best) {
                best = dist;
                nearest = &iv;
            }
        }
        containing.push_back(nearest);
    }
    if (containing.size() == 1) {
        // boundary effect: widen with the nearest neighbouring interval
        const IndexRange& own = *containing.front();
        const IndexRange* neighbour = nullptr;
        double best = 1e300;
        for (const auto& iv : last) {
            if (&iv == containing.front()) continue;
            const double mid = 0.5 * (iv.s + iv.e);
            const double dist = std::abs(mid - eta_hat);
            if (dist < best) {
                best = dist;
                neighbour = &iv;
            }
        }
        if (neighbour) containing.push_back(neighbour);
        else return own;
    }
    int s = containing.front()->s, e = containing.front()->e;
    for (const auto* iv : containing) {
        s = std::min(s, iv->s);
        e = std::max(e, iv->e);
    }
    return {s, e};
}

RefinedChangePoint refine(const SeriesDesign& design, int eta_hat, IndexRange search,
                          const DetectorConfig& config) {
    const FunctionalSeries& data = design.data();
    data.check_range(search, "refine");
    if (!(search.s < eta_hat && eta_hat <= search.e))
        throw std::invalid_argument("refine: eta_hat outside (s_k, e_k]");

    RefinedChangePoint out;
    out.search = search;
    out.eta_hat = eta_hat;
    out.eta_tilde = eta_hat;

    const IndexRange left{search.s, eta_hat};
    const IndexRange right{eta_hat, search.e};
    if (left.len() >= 1 && right.len() >= 1) {
        out.fit_left = design.fit(left, config.lambda_rule.at(left.len()));
        out.fit_right = design.fit(right, config.lambda_rule.at(right.len()));
        out.has_fits = true;
    }
    if (left.len() < config.min_fit_len || right.len() < config.min_fit_len || !out.has_fits) {
        out.degraded = true;
        return out;
    }

    // prefix sums of the two squared-residual streams over (s_k, e_k]
    const int L = search.len();
    Eigen::VectorXd wl = data.grid.weights.cwiseProduct(out.fit_left.slope);
    Eigen::VectorXd wr = data.grid.weights.cwiseProduct(out.fit_right.slope);
    std::vector<double> pref_l(L + 1, 0.0), pref_r(L + 1, 0.0);
    for (int i = 0; i < L; ++i) {
        const int row = search.s + i;
        const double rl = data.y[row] - data.x.row(row).dot(wl);
        const double rr = data.y[row] - data.x.row(row).dot(wr);
        pref_l[i + 1] = pref_l[i] + rl * rl;
        pref_r[i + 1] = pref_r[i] + rr * rr;
    }

    double best_q = 0.0;
    int best_t = -1;
    for (int t = search.s + 1; t <= search.e - 1; ++t) {
        const int i = t - search.s;
        const double q = pref_l[i] + (pref_r[L] - pref_r[i]);
        if (best_t < 0 || q < best_q ||
            (q == best_q && std::abs(t - eta_hat) < std::abs(best_t - eta_hat))) {
            best_q = q;
            best_t = t;
        }
    }
    // a minimizer on the scan boundary means the window shows no interior
    // change; keep the preliminary estimator instead of chasing the edge
    if (best_t <= search.s + 1 || best_t >= search.e - 1) {
        out.degraded = true;
        return out;
    }
    out.eta_tilde = best_t;
    return out;
}

}  // namespace frbs
