#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <list>
#include <optional>
#include <unordered_map>

#include "frbs/errors.hpp"
#include "frbs/kernel.hpp"
#include "frbs/series.hpp"

namespace frbs {

/// Penalty rule: either a single constant lambda (what cross-validation
/// selects) or the decay rule lambda_m = omega * m^(-2r/(2r+1)).
struct LambdaRule {
    enum class Kind { Constant, Decay };
    Kind kind = Kind::Constant;
    double value = 0.2;
    double omega = 1.0;
    double r = 1.0;

    double at(int m) const;

    static LambdaRule constant(double v) { return {Kind::Constant, v, 0.0, 1.0}; }
    static LambdaRule decay(double omega, double r) { return {Kind::Decay, 0.0, omega, r}; }
};

/// Penalized slope fit on one index segment: representer coefficients c
/// solving (M + m*lambda*I) c = y_seg, the slope on the grid, fitted values
/// M c, and the residual sum of squares.
struct SegmentFit {
    IndexRange segment;
    double lambda = 0.0;
    Eigen::VectorXd coeffs;
    GridFunction slope;
    Eigen::VectorXd fitted;
    double rss = 0.0;
    bool used_pinv = false;  // lambda = 0 fell back to a pseudo-inverse solve
};

SegmentFit fit_slope(const FunctionalSeries& data, const Eigen::MatrixXd& kmat,
                     IndexRange segment, double lambda, const GramMatrix& gram);

/// <x_new, slope> by quadrature.
double predict(const SegmentFit& fit, const GridFunction& x_new, const Grid& grid);

/// Least-recently-used cache of per-segment RSS values, keyed by (s, e].
/// One cache is tied to one (data, lambda rule) pair.
class RssCache {
public:
    explicit RssCache(std::size_t capacity = 512) : capacity_(capacity) {}

    std::optional<double> get(IndexRange seg);
    void put(IndexRange seg, double rss);
    std::size_t size() const { return map_.size(); }

private:
    static std::uint64_t key(IndexRange seg) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(seg.s)) << 32) |
               static_cast<std::uint32_t>(seg.e);
    }
    std::size_t capacity_;
    std::list<std::pair<std::uint64_t, double>> order_;
    std::unordered_map<std::uint64_t, std::list<std::pair<std::uint64_t, double>>::iterator> map_;
};

/// Precomputed per-series quadrature state shared by every segment fit:
/// the p x p kernel matrix, the weighted curve matrix A W, its kernel image
/// A W K, and the feature rows A W^{1/2} V S^{1/2} from the eigendecomposition
/// of W^{1/2} K W^{1/2}. Immutable after construction; safe to share across
/// threads.
class SeriesDesign {
public:
    SeriesDesign(const FunctionalSeries& data, const Kernel& kernel);

    const FunctionalSeries& data() const { return *data_; }
    const Eigen::MatrixXd& kmat() const { return kmat_; }
    const Eigen::MatrixXd& weighted_curves() const { return aw_; }
    const Eigen::MatrixXd& kernel_image() const { return awk_; }
    const Eigen::MatrixXd& features() const { return features_; }

    GramMatrix gram(IndexRange segment) const;
    SegmentFit fit(IndexRange segment, double lambda) const;

    /// RSS of the penalized fit on (s, e]. Solves the m x m representer
    /// system when m <= p and the equivalent p x p ridge system otherwise.
    double rss(IndexRange segment, double lambda) const;

private:
    const FunctionalSeries* data_;
    Eigen::MatrixXd kmat_;
    Eigen::MatrixXd aw_;
    Eigen::MatrixXd awk_;
    Eigen::MatrixXd features_;
};

/// RSS via the cache; lambda picked by the rule from the segment length.
double segment_rss(const SeriesDesign& design, IndexRange segment, const LambdaRule& rule,
                   RssCache& cache);

namespace detail {
/// Dual solve used by both fit and scan paths: coefficients of
/// (M + m*lambda*I) c = y_seg with the lambda = 0 pseudo-inverse fallback.
Eigen::VectorXd solve_dual(const Eigen::MatrixXd& gram_block, const Eigen::VectorXd& y_seg,
                           double lambda, bool* used_pinv);
/// RSS of the p x p ridge system (G + m*lambda*I) theta = d for a segment
/// given its feature rows; exact primal form of the representer solution.
double primal_rss(const Eigen::MatrixXd& gp, const Eigen::VectorXd& d,
                  const Eigen::Ref<const Eigen::MatrixXd>& feat_rows,
                  const Eigen::Ref<const Eigen::VectorXd>& y_seg, double lambda);
}  // namespace detail

}  // namespace frbs
