#pragma once

#include <optional>
#include <vector>

#include "frbs/inference.hpp"
#include "frbs/regress.hpp"

namespace frbs {

/// Deterministic multi-resolution interval collection. Layer k holds the
/// 2^k - 1 intervals ( ceil((i-1) b_k), floor((i-1) b_k + l_k) ] with
/// l_k = n / 2^(k-1), b_k = l_k / 2; degenerate intervals (e <= s + 1) are
/// dropped and counted, duplicates within a layer deduplicated.
struct SeededIntervalSet {
    int n = 0;
    int delta = 0;
    int layer_count = 0;  // M = ceil(log2(n/delta)) + 1
    std::vector<std::vector<IndexRange>> layers;
    int dropped_degenerate = 0;

    const std::vector<IndexRange>& last_layer() const { return layers.back(); }
    std::vector<IndexRange> all() const;
    int total() const;
};

SeededIntervalSet seeded_intervals(int n, int delta);

/// Scan outcome on one seeded interval: the maximizing split b and the
/// statistic value there. Intervals too short to admit any valid split are
/// marked invalid (treated as statistic 0 by the detector).
struct ScanResult {
    IndexRange interval;
    int argmax_b = -1;
    double max_value = 0.0;
    bool valid = false;
};

/// Evaluates the likelihood-ratio statistic
///   W_t^{s,e} = rss(s,e] - rss(s,t] - rss(t,e]
/// over seeded intervals. The split scan reuses one Gram corner per side and
/// switches to the p x p ridge form once a segment outgrows the grid size, so
/// a full interval costs O(sum min(m,p)^3) instead of refitting from scratch.
class ScanEngine {
public:
    ScanEngine(const SeriesDesign& design, LambdaRule rule, int margin, int min_fit_len);

    /// (t, W_t) for every admissible split s + margin < t < e - margin.
    std::vector<std::pair<int, double>> w_curve(IndexRange interval) const;

    ScanResult scan(IndexRange interval) const;

    /// Scans every interval of the set; slot i of the result corresponds to
    /// set.all()[i]. Thread count does not affect the values.
    std::vector<ScanResult> scan_all(const SeededIntervalSet& set, int threads) const;

    int margin() const { return margin_; }

private:
    // RSS of (s, s+m] for m = lo..hi given the interval base s (dir = +1) or
    // of (e-m, e] given base e (dir = -1); out[m - lo] receives the value.
    void rss_sweep(int base, int dir, int lo, int hi, std::vector<double>& out) const;

    const SeriesDesign* design_;
    LambdaRule rule_;
    int margin_;
    int min_fit_len_;
};

/// W statistic through the public per-segment path (cache-backed); returns
/// nullopt when any of the three segments is shorter than min_fit_len.
std::optional<double> w_stat(const SeriesDesign& design, int s, int t, int e,
                             const LambdaRule& rule, RssCache& cache, int min_fit_len);

/// Population statistic for a piecewise-constant truth with a single change
/// at eta in (s, e): the tent
///   W_t = (t-s)(e-eta)^2 / ((e-s)(e-t)) kappa^2   for t <= eta
/// (mirrored for t >= eta), with kappa^2 = Sigma[bL - bR, bL - bR].
double population_w(const GridFunction& beta_left, const GridFunction& beta_right,
                    const CovarianceOperator& cov, const Grid& grid, int s, int t, int e,
                    int eta);

}  // namespace frbs
