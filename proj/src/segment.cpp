#include "frbs/segment.hpp"

#include <cmath>

#include "frbs/parallel.hpp"

namespace frbs {

std::vector<IndexRange> SeededIntervalSet::all() const {
    std::vector<IndexRange> flat;
    for (const auto& layer : layers) flat.insert(flat.end(), layer.begin(), layer.end());
    return flat;
}

int SeededIntervalSet::total() const {
    int count = 0;
    for (const auto& layer : layers) count += static_cast<int>(layer.size());
    return count;
}

SeededIntervalSet seeded_intervals(int n, int delta) {
    if (delta <= 0 || delta >= n)
        throw std::invalid_argument("seeded_intervals: need 0 < delta < n");
    int ceil_log2 = 0;
    while (static_cast<long long>(delta) << ceil_log2 < n) ++ceil_log2;

    SeededIntervalSet set;
    set.n = n;
    set.delta = delta;
    set.layer_count = ceil_log2 + 1;
    set.layers.resize(set.layer_count);
    for (int k = 1; k <= set.layer_count; ++k) {
        const double l = n / std::pow(2.0, k - 1);
        const double b = n / std::pow(2.0, k);
        auto& layer = set.layers[k - 1];
        const long long count = (1ll << k) - 1;
        for (long long i = 1; i <= count; ++i) {
            const double start = (i - 1) * b;
            IndexRange iv{static_cast<int>(std::ceil(start)),
                          static_cast<int>(std::floor(start + l))};
            if (iv.e <= iv.s + 1) {
                ++set.dropped_degenerate;
                continue;
            }
            if (!layer.empty() && layer.back() == iv) continue;  // rounding duplicate
            layer.push_back(iv);
        }
    }
    return set;
}

ScanEngine::ScanEngine(const SeriesDesign& design, LambdaRule rule, int margin, int min_fit_len)
    : design_(&design), rule_(rule), margin_(std::max(margin, min_fit_len)),
      min_fit_len_(min_fit_len) {}

void ScanEngine::rss_sweep(int base, int dir, int lo, int hi, std::vector<double>& out) const {
    const FunctionalSeries& data = design_->data();
    const int p = data.grid.p;
    const int mcap = std::min(hi, p);

    // Gram corner with rows ordered in growth direction, so the segment of
    // length m is the leading m x m block.
    Eigen::MatrixXd corner(mcap, mcap);
    Eigen::VectorXd y_ord(hi);
    if (dir > 0) {
        corner = design_->kernel_image().middleRows(base, mcap) *
                 design_->weighted_curves().middleRows(base, mcap).transpose();
        y_ord = data.y.segment(base, hi);
    } else {
        Eigen::MatrixXd awk_rev =
            design_->kernel_image().middleRows(base - mcap, mcap).colwise().reverse();
        Eigen::MatrixXd aw_rev =
            design_->weighted_curves().middleRows(base - mcap, mcap).colwise().reverse();
        corner = awk_rev * aw_rev.transpose();
        y_ord = data.y.segment(base - hi, hi).reverse();
    }
    corner = ((corner + corner.transpose()) * 0.5).eval();

    const bool need_primal = hi > p;
    Eigen::MatrixXd gp;
    Eigen::VectorXd d;
    if (need_primal) {
        gp.setZero(p, p);
        d.setZero(p);
    }

    Eigen::MatrixXd sys;
    for (int m = 1; m <= hi; ++m) {
        const int row = dir > 0 ? base + m - 1 : base - m;
        if (need_primal) {
            const auto phi = design_->features().row(row);
            gp.selfadjointView<Eigen::Lower>().rankUpdate(phi.transpose());
            d += y_ord[m - 1] * phi.transpose();
        }
        if (m < lo) continue;
        const double lambda = rule_.at(m);
        double rss;
        if (m <= p) {
            sys = corner.topLeftCorner(m, m);
            Eigen::VectorXd c = detail::solve_dual(sys, y_ord.head(m), lambda, nullptr);
            rss = (y_ord.head(m) - sys * c).squaredNorm();
        } else {
            const Eigen::MatrixXd gp_full = gp.selfadjointView<Eigen::Lower>();
            const int lo_row = dir > 0 ? base : base - m;
            rss = detail::primal_rss(gp_full, d, design_->features().middleRows(lo_row, m),
                                     data.y.segment(lo_row, m), lambda);
        }
        out[m - lo] = rss;
    }
}

std::vector<std::pair<int, double>> ScanEngine::w_curve(IndexRange interval) const {
    design_->data().check_range(interval, "w_curve");
    const int s = interval.s, e = interval.e, L = interval.len();
    std::vector<std::pair<int, double>> curve;
    const int tlo = s + margin_ + 1;
    const int thi = e - margin_ - 1;
    if (tlo > thi || L < min_fit_len_) return curve;

    const double rss_full = design_->rss(interval, rule_.at(L));

    const int mlo = margin_ + 1;
    const int mhi = L - margin_ - 1;
    std::vector<double> rss_left(mhi - mlo + 1), rss_right(mhi - mlo + 1);
    rss_sweep(s, +1, mlo, mhi, rss_left);
    rss_sweep(e, -1, mlo, mhi, rss_right);

    curve.reserve(thi - tlo + 1);
    for (int t = tlo; t <= thi; ++t) {
        const double w = rss_full - rss_left[t - s - mlo] - rss_right[e - t - mlo];
        curve.emplace_back(t, w);
    }
    return curve;
}

ScanResult ScanEngine::scan(IndexRange interval) const {
    ScanResult res;
    res.interval = interval;
    const auto curve = w_curve(interval);
    if (curve.empty()) return res;
    res.valid = true;
    res.argmax_b = curve.front().first;
    res.max_value = curve.front().second;
    for (const auto& [t, w] : curve) {
        if (w > res.max_value) {  // strict: ties resolve to the smallest t
            res.max_value = w;
            res.argmax_b = t;
        }
    }
    return res;
}

std::vector<ScanResult> ScanEngine::scan_all(const SeededIntervalSet& set, int threads) const {
    const std::vector<IndexRange> intervals = set.all();
    std::vector<ScanResult> results(intervals.size());
    parallel_for(static_cast<int>(intervals.size()), threads,
                 [&](int i) { results[i] = scan(intervals[i]); });
    return results;
}

std::optional<double> w_stat(const SeriesDesign& design, int s, int t, int e,
                             const LambdaRule& rule, RssCache& cache, int min_fit_len) {
    if (!(s < t && t < e)) throw std::invalid_argument("w_stat: need s < t < e");
    if (t - s < min_fit_len || e - t < min_fit_len || e - s < min_fit_len) return std::nullopt;
    const double full = segment_rss(design, {s, e}, rule, cache);
    const double left = segment_rss(design, {s, t}, rule, cache);
    const double right = segment_rss(design, {t, e}, rule, cache);
    return full - left - right;
}

double population_w(const GridFunction& beta_left, const GridFunction& beta_right,
                    const CovarianceOperator& cov, const Grid& grid, int s, int t, int e,
                    int eta) {
    if (!(s < t && t < e) || !(s < eta && eta < e))
        throw std::invalid_argument("population_w: need s < t < e and eta in (s, e)");
    GridFunction diff = beta_left - beta_right;
    const double kappa_sq = cov_form(cov, diff, diff, grid);
    const double ds = t, de = e, dss = s, deta = eta;
    if (t <= eta)
        return (ds - dss) * (de - deta) * (de - deta) / ((de - dss) * (de - ds)) * kappa_sq;
    return (de - ds) * (deta - dss) * (deta - dss) / ((de - dss) * (ds - dss)) * kappa_sq;
}

}  // namespace frbs
