#include <doctest.h>

#include <cmath>
#include <random>

#include "frbs/regress.hpp"
#include "frbs/simulate.hpp"

using namespace frbs;

namespace {

FunctionalSeries random_series(int n, int p, unsigned seed, double noise = 1.0) {
    FunctionalSeries data;
    data.grid = make_grid(p);
    data.x.resize(n, p);
    data.y.resize(n);
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < p; ++i) data.x(j, i) = g(eng);
        data.y[j] = noise * g(eng);
    }
    return data;
}

double objective(const FunctionalSeries& data, const GramMatrix& g, const Eigen::VectorXd& c,
                 double lambda) {
    const int m = g.segment.len();
    const Eigen::VectorXd fitted = g.m * c;
    const Eigen::VectorXd y = data.y.segment(g.segment.s, m);
    return (y - fitted).squaredNorm() / m + lambda * c.dot(g.m * c);
}

}  // namespace

TEST_CASE("lambda rule forms") {
    LambdaRule c = LambdaRule::constant(0.3);
    CHECK(c.at(5) == 0.3);
    CHECK(c.at(500) == 0.3);
    LambdaRule d = LambdaRule::decay(2.0, 1.0);
    CHECK(d.at(8) == doctest::Approx(2.0 * std::pow(8.0, -2.0 / 3.0)));
    CHECK_THROWS_AS(c.at(0), std::invalid_argument);
}

TEST_CASE("fit_slope on zero response returns the zero fit") {
    FunctionalSeries data = random_series(20, 50, 1);
    data.y.setZero();
    SeriesDesign design(data, sobolev_kernel());
    SegmentFit fit = design.fit({0, 20}, 0.2);
    CHECK(fit.coeffs.cwiseAbs().maxCoeff() == 0.0);
    CHECK(fit.slope.cwiseAbs().maxCoeff() == 0.0);
    CHECK(fit.rss == 0.0);
}

TEST_CASE("huge penalty shrinks the slope away") {
    FunctionalSeries data = random_series(25, 60, 2);
    SeriesDesign design(data, sobolev_kernel());
    SegmentFit fit = design.fit({0, 25}, 1e8);
    const double total = data.y.squaredNorm();
    CHECK(std::abs(fit.rss - total) <= 1e-3 * total);
}

TEST_CASE("normal equations and first-order optimality") {
    FunctionalSeries data = random_series(30, 40, 3);
    SeriesDesign design(data, sobolev_kernel());
    const double lambda = 0.2;
    GramMatrix g = design.gram({0, 30});
    SegmentFit fit = fit_slope(data, design.kmat(), {0, 30}, lambda, g);

    Eigen::MatrixXd sys = g.m;
    sys.diagonal().array() += 30 * lambda;
    const Eigen::VectorXd y = data.y.head(30);
    CHECK((sys * fit.coeffs - y).norm() <= 1e-8 * y.norm());

    // perturbations in the representer span never improve the objective
    const double base = objective(data, g, fit.coeffs, lambda);
    std::mt19937_64 eng(11);
    std::normal_distribution<double> n01(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        Eigen::VectorXd delta(30);
        for (int i = 0; i < 30; ++i) delta[i] = n01(eng);
        delta *= 1e-3 / delta.norm();
        CHECK(objective(data, g, fit.coeffs + delta, lambda) >= base - 1e-12);
    }

    // objective recomposition from parts
    const double recomputed = fit.rss / 30 + lambda * fit.coeffs.dot(g.m * fit.coeffs);
    CHECK(recomputed == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("fit_slope is deterministic") {
    FunctionalSeries data = random_series(18, 30, 4);
    SeriesDesign design(data, sobolev_kernel());
    SegmentFit a = design.fit({2, 18}, 0.4);
    SegmentFit b = design.fit({2, 18}, 0.4);
    CHECK((a.coeffs - b.coeffs).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("predict agrees with fitted values and is linear") {
    FunctionalSeries data = random_series(22, 45, 5);
    SeriesDesign design(data, sobolev_kernel());
    SegmentFit fit = design.fit({0, 22}, 0.3);

    GridFunction zero = GridFunction::Zero(45);
    CHECK(predict(fit, zero, data.grid) == 0.0);

    for (int j : {0, 7, 21}) {
        const GridFunction xj = data.x.row(j).transpose();
        CHECK(predict(fit, xj, data.grid) ==
              doctest::Approx(fit.fitted[j]).epsilon(1e-8));
    }
    const GridFunction x0 = data.x.row(0).transpose();
    CHECK(predict(fit, (2.5 * x0).eval(), data.grid) ==
          doctest::Approx(2.5 * predict(fit, x0, data.grid)).epsilon(1e-12));
}

TEST_CASE("slope recomputation matches the representer expansion") {
    FunctionalSeries data = random_series(15, 35, 6);
    SeriesDesign design(data, sobolev_kernel());
    SegmentFit fit = design.fit({0, 15}, 0.25);
    // slope(u) = sum_j c_j (L_K X_j)(u)
    GridFunction recomposed = GridFunction::Zero(35);
    for (int j = 0; j < 15; ++j) {
        GridFunction lkx = kernel_smooth(design.kmat(), data.x.row(j).transpose(), data.grid);
        recomposed += fit.coeffs[j] * lkx;
    }
    CHECK((recomposed - fit.slope).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("noiseless interpolation with tiny lambda") {
    // constant beta = 1, y_j = <X_j, 1>, m > p
    FunctionalSeries data = random_series(40, 20, 7);
    GridFunction one = GridFunction::Ones(20);
    for (int j = 0; j < 40; ++j)
        data.y[j] = inner_l2(data.x.row(j).transpose(), one, data.grid);
    SeriesDesign design(data, sobolev_kernel());
    const double rss = design.rss({0, 40}, 1e-8);
    CHECK(rss <= 1e-6 * data.y.squaredNorm());
}

TEST_CASE("rss is monotone nondecreasing in lambda") {
    FunctionalSeries data = random_series(26, 30, 8);
    SeriesDesign design(data, sobolev_kernel());
    double prev = -1.0;
    for (double lambda : {0.05, 0.1, 0.5, 1.0, 5.0}) {
        const double rss = design.rss({0, 26}, lambda);
        CHECK(rss >= prev);
        prev = rss;
    }
}

TEST_CASE("primal and dual rss agree across the dispatch boundary") {
    // m > p exercises the p x p ridge route; compare with the m x m route
    FunctionalSeries data = random_series(50, 12, 9);
    SeriesDesign design(data, sobolev_kernel());
    const double lambda = 0.17;
    const double primal = design.rss({0, 50}, lambda);
    GramMatrix g = design.gram({0, 50});
    SegmentFit dual = fit_slope(data, design.kmat(), {0, 50}, lambda, g);
    CHECK(primal == doctest::Approx(dual.rss).epsilon(1e-9));
}

TEST_CASE("singular system at lambda zero raises with condition estimate") {
    // duplicated curves make M rank-deficient; y chosen outside its range
    FunctionalSeries data = random_series(6, 25, 10);
    data.x.row(1) = data.x.row(0);
    data.y[0] = 1.0;
    data.y[1] = -1.0;
    SeriesDesign design(data, sobolev_kernel());
    GramMatrix g = design.gram({0, 2});
    CHECK_THROWS_AS(fit_slope(data, design.kmat(), {0, 2}, 0.0, g), SingularSystemError);

    // consistent y stays solvable
    data.y[1] = 1.0;
    SegmentFit fit = fit_slope(data, design.kmat(), {0, 2}, 0.0, g);
    CHECK(fit.rss <= 1e-10);

    // a zero curve makes M exactly singular: the Cholesky cannot pass and the
    // pseudo-inverse fallback is flagged
    FunctionalSeries zdata = random_series(4, 25, 12);
    zdata.x.row(0).setZero();
    zdata.y[0] = 0.0;
    SeriesDesign zdesign(zdata, sobolev_kernel());
    GramMatrix zg = zdesign.gram({0, 3});
    SegmentFit zfit = fit_slope(zdata, zdesign.kmat(), {0, 3}, 0.0, zg);
    CHECK(zfit.used_pinv);
    CHECK(zfit.rss <= 1e-8);
}

TEST_CASE("segment_rss caches by segment") {
    FunctionalSeries data = random_series(30, 25, 11);
    SeriesDesign design(data, sobolev_kernel());
    LambdaRule rule = LambdaRule::constant(0.2);
    RssCache cache(4);
    const double a = segment_rss(design, {0, 15}, rule, cache);
    const double b = segment_rss(design, {0, 15}, rule, cache);
    CHECK(a == b);
    CHECK(cache.size() == 1);
    // capacity eviction
    for (int e = 16; e < 24; ++e) segment_rss(design, {0, e}, rule, cache);
    CHECK(cache.size() == 4);
}
