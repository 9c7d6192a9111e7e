#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "frbs/regress.hpp"
#include "frbs/series.hpp"

namespace frbs {

/// Sample second-moment operator of the curves in a segment:
/// matrix_{ij} = (1/m) sum_t X_t(u_i) X_t(u_j).
struct CovarianceOperator {
    Eigen::MatrixXd matrix;
    IndexRange segment;
};

CovarianceOperator sample_cov(const FunctionalSeries& data, IndexRange segment);

/// Quadratic form Sigma[f, g] = f^T W Sigma W g (both integrals by quadrature).
double cov_form(const CovarianceOperator& cov, const GridFunction& f, const GridFunction& g,
                const Grid& grid);

/// Plug-in change size: kappa^2 = Sigma[beta_L - beta_R, beta_L - beta_R].
double estimate_kappa_sq(const SegmentFit& fit_left, const SegmentFit& fit_right,
                         const CovarianceOperator& cov, const Grid& grid);

/// Block half-width rule q = ceil(max_k(e_k - s_k)^{2/5} / 2).
int default_q(const std::vector<IndexRange>& refined_intervals);

/// Differenced-block average driving the long-run variance estimate:
/// F_I = sqrt(2) q^{-1/2} sum_{j=m+1}^{m+q} (Z_j - Z_{j+q}) over each kept
/// block (m, m+2q]; returns the mean of F_I^2. z is the full-length stream
/// (1-based index j stored at z[j-1]); block_starts holds each kept m.
double lrv_accumulate(std::span<const double> z, std::span<const int> block_starts, int q);

/// Kept block starts after removing, for every refined estimator, the block
/// containing it and its two neighbours.
std::vector<int> lrv_block_starts(int n, int q, const std::vector<int>& refined_etas);

/// Block-type long-run variance estimate for one change point.
double lrv(const SeriesDesign& design, double kappa_hat, const SegmentFit& fit_left,
           const SegmentFit& fit_right, const std::vector<int>& refined_etas, int q,
           const LambdaRule& rule);

/// Monte-Carlo draws of argmin_r (|r| + sigma_hat * W(r)) over a two-sided
/// random walk discretized at r = k/n. Bit-reproducible for a fixed seed and
/// independent of thread count; kmax_override = 0 uses the default
/// truncation min(ceil(n * max(5, 30 sigma_hat^2)), 2e6) steps per side.
std::vector<double> simulate_argmin(double sigma_hat, int n, int B, std::uint64_t seed,
                                    int threads = 1, long kmax_override = 0);

/// Linear-interpolation empirical quantile of a sample (type-7).
double empirical_quantile(std::vector<double> samples, double prob);

/// Confidence interval (eta + q_{a/2}/kappa^2, eta + q_{1-a/2}/kappa^2).
std::pair<double, double> confidence_interval(double eta_tilde, double kappa_sq_hat,
                                              const std::vector<double>& samples, double alpha);

/// Everything inference produces for one change point.
struct InferenceResult {
    int k = 0;
    double kappa_sq_hat = 0.0;
    double sigma_inf_sq_hat = 0.0;
    int q = 0;
    double lo = 0.0;
    double hi = 0.0;
    double alpha = 0.05;
    bool degenerate = false;  // all argmin samples equal -> zero-width interval
};

}  // namespace frbs
