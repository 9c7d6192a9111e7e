#include "frbs/inference.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "frbs/errors.hpp"
#include "frbs/parallel.hpp"
#include "frbs/rng.hpp"

namespace frbs {

CovarianceOperator sample_cov(const FunctionalSeries& data, IndexRange segment) {
    data.check_range(segment, "sample_cov");
    const int m = segment.len();
    const auto rows = data.x.middleRows(segment.s, m);
    Eigen::MatrixXd sigma = (rows.transpose() * rows) / static_cast<double>(m);
    sigma = ((sigma + sigma.transpose()) * 0.5).eval();
    return CovarianceOperator{std::move(sigma), segment};
}

double cov_form(const CovarianceOperator& cov, const GridFunction& f, const GridFunction& g,
                const Grid& grid) {
    check_on_grid(f, grid, "cov_form");
    check_on_grid(g, grid, "cov_form");
    Eigen::VectorXd wf = grid.weights.cwiseProduct(f);
    Eigen::VectorXd wg = grid.weights.cwiseProduct(g);
    return wf.dot(cov.matrix * wg);
}

double estimate_kappa_sq(const SegmentFit& fit_left, const SegmentFit& fit_right,
                         const CovarianceOperator& cov, const Grid& grid) {
    GridFunction diff = fit_left.slope - fit_right.slope;
    const double v = cov_form(cov, diff, diff, grid);
    return v > 0.0 ? v : 0.0;
}

int default_q(const std::vector<IndexRange>& refined_intervals) {
    if (refined_intervals.empty())
        throw std::invalid_argument("default_q: need at least one refined interval");
    int span = 0;
    for (const auto& iv : refined_intervals) span = std::max(span, iv.len());
    return static_cast<int>(std::ceil(std::pow(static_cast<double>(span), 0.4) / 2.0));
}

std::vector<int> lrv_block_starts(int n, int q, const std::vector<int>& refined_etas) {
    if (q < 2) throw std::invalid_argument("lrv: q must be >= 2");
    const int nblocks = n / (2 * q);
    std::set<int> removed;
    for (int eta : refined_etas) {
        const int i = eta / (2 * q);  // block index containing eta (0-based)
        for (int d = -1; d <= 1; ++d) removed.insert(i + d);
    }
    std::vector<int> starts;
    for (int i = 0; i < nblocks; ++i)
        if (!removed.count(i)) starts.push_back(2 * q * i);
    return starts;
}

double lrv_accumulate(std::span<const double> z, std::span<const int> block_starts, int q) {
    if (block_starts.empty()) throw InsufficientDataError("lrv: no surviving blocks");
    const double scale = std::sqrt(2.0) / std::sqrt(static_cast<double>(q));
    double acc = 0.0;
    for (int m : block_starts) {
        double s = 0.0;
        for (int j = m; j < m + q; ++j) s += z[j] - z[j + q];
        const double f = scale * s;
        acc += f * f;
    }
    return acc / static_cast<double>(block_starts.size());
}

double lrv(const SeriesDesign& design, double kappa_hat, const SegmentFit& fit_left,
           const SegmentFit& fit_right, const std::vector<int>& refined_etas, int q,
           const LambdaRule& rule) {
    if (kappa_hat <= 0.0) throw std::invalid_argument("lrv: kappa_hat must be > 0");
    const FunctionalSeries& data = design.data();
    const int n = data.n();
    std::vector<int> starts = lrv_block_starts(n, q, refined_etas);
    if (starts.empty()) throw InsufficientDataError("lrv: no surviving blocks");

    GridFunction diff = fit_left.slope - fit_right.slope;
    Eigen::VectorXd wdiff = data.grid.weights.cwiseProduct(diff);
    std::vector<double> z(static_cast<std::size_t>(n), 0.0);
    for (int m : starts) {
        SegmentFit block_fit = design.fit({m, m + 2 * q}, rule.at(2 * q));
        for (int j = m; j < m + 2 * q; ++j) {
            const double proj = data.x.row(j).dot(wdiff);
            const double resid = data.y[j] - block_fit.fitted[j - m];
            z[j] = proj * resid / kappa_hat;
        }
    }
    return lrv_accumulate(z, starts, q);
}

std::vector<double> simulate_argmin(double sigma_hat, int n, int B, std::uint64_t seed,
                                    int threads, long kmax_override) {
    if (B < 1) throw std::invalid_argument("simulate_argmin: B must be >= 1");
    if (sigma_hat < 0.0) throw std::invalid_argument("simulate_argmin: sigma_hat must be >= 0");
    std::vector<double> out(static_cast<std::size_t>(B), 0.0);
    if (sigma_hat == 0.0) return out;  // |r| alone is minimized at 0

    const double cap = 2e6;
    long kmax = kmax_override > 0
                    ? kmax_override
                    : static_cast<long>(std::min(
                          cap, std::ceil(n * std::max(5.0, 30.0 * sigma_hat * sigma_hat))));
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    const double inv_n = 1.0 / static_cast<double>(n);

    parallel_for(B, threads, [&](int b) {
        double best = 0.0, best_r = 0.0;  // r = 0 objective is exactly 0
        // positive side first, then negative; each side has its own stream so
        // enlarging kmax only extends the walks
        for (int side = 0; side < 2; ++side) {
            NormalSampler normal(mix_seed(seed, static_cast<std::uint64_t>(b), side));
            const double sign = side == 0 ? 1.0 : -1.0;
            double walk = 0.0;
            for (long k = 1; k <= kmax; ++k) {
                walk += normal() * inv_sqrt_n;
                const double r = sign * k * inv_n;
                const double obj = k * inv_n + sigma_hat * walk;
                // strict < keeps the smallest |r| among ties; checking the
                // positive side first and replacing on negative-side ties
                // implements "ties -> smallest |r|, then negative side"
                if (obj < best || (side == 1 && obj == best && std::abs(r) <= std::abs(best_r))) {
                    best = obj;
                    best_r = r;
                }
            }
        }
        out[static_cast<std::size_t>(b)] = best_r;
    });
    return out;
}

double empirical_quantile(std::vector<double> samples, double prob) {
    if (samples.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
    if (prob < 0.0 || prob > 1.0) throw std::invalid_argument("empirical_quantile: bad prob");
    std::sort(samples.begin(), samples.end());
    const double h = (static_cast<double>(samples.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= samples.size()) return samples.back();
    const double frac = h - static_cast<double>(lo);
    return samples[lo] + frac * (samples[lo + 1] - samples[lo]);
}

std::pair<double, double> confidence_interval(double eta_tilde, double kappa_sq_hat,
                                              const std::vector<double>& samples, double alpha) {
    if (samples.empty()) throw std::invalid_argument("confidence_interval: empty sample");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("confidence_interval: bad alpha");
    if (!(kappa_sq_hat > 0.0))
        throw std::invalid_argument("confidence_interval: kappa_sq_hat must be > 0");
    const double qlo = empirical_quantile(samples, alpha / 2.0);
    const double qhi = empirical_quantile(samples, 1.0 - alpha / 2.0);
    return {eta_tilde + qlo / kappa_sq_hat, eta_tilde + qhi / kappa_sq_hat};
}

}  // namespace frbs
