#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "frbs/io.hpp"
#include "frbs/simulate.hpp"

using namespace frbs;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/frbs_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("dataset csv round trip") {
    SimulatedData sim = generate(scenario_presets("S1", 30, 1.0, 3));
    TempFile f("dataset.csv");
    write_dataset_csv(f.path, sim.data);
    FunctionalSeries back = read_dataset_csv(f.path);
    CHECK(back.n() == 30);
    CHECK(back.grid.p == 200);
    CHECK((back.y - sim.data.y).cwiseAbs().maxCoeff() == 0.0);  // %.17g is lossless
    CHECK((back.x - sim.data.x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dataset csv rejects malformed input") {
    TempFile f("bad.csv");
    {
        std::ofstream out(f.path);
        out << "y,x_0,x_1\n1.0,2.0,3.0\n4.0,oops,6.0\n";
    }
    CHECK_THROWS_AS(read_dataset_csv(f.path), std::invalid_argument);
    {
        std::ofstream out(f.path);
        out << "y,x_0,x_1\n1.0,2.0\n";  // short row
    }
    CHECK_THROWS_AS(read_dataset_csv(f.path), std::invalid_argument);
    {
        std::ofstream out(f.path);
        out << "z,x_0\n1.0,2.0\n";  // wrong header
    }
    CHECK_THROWS_AS(read_dataset_csv(f.path), std::invalid_argument);
    CHECK_THROWS_AS(read_dataset_csv("/tmp/frbs_no_such_file.csv"), std::invalid_argument);
}

TEST_CASE("truth sidecar round trip") {
    ScenarioSpec spec = scenario_presets("S2", 800, 1.0, 11);
    SimulatedData sim = generate(spec);
    TempFile f("truth.json");
    write_truth_json(f.path, spec, sim.truth);
    TruthFile t = read_truth_json(f.path);
    CHECK(t.n == 800);
    CHECK(t.change_points == std::vector<int>{200, 500});
    REQUIRE(t.kappa_sq_true.size() == 2);
    CHECK(t.kappa_sq_true[0] == doctest::Approx(1.074144205680798));
}

TEST_CASE("report json round trip keeps the arrays sorted") {
    ChangePointReport report;
    report.seed = 42;
    report.preliminary = {100, 250};
    report.refined = {103, 248};
    report.search_intervals = {{90, 112}, {240, 260}};
    report.refine_degraded = {false, false};
    report.inference_ok = {true, false};
    report.inference_note = {"", "estimated change size is zero"};
    InferenceResult a;
    a.k = 0;
    a.kappa_sq_hat = 1.1;
    a.sigma_inf_sq_hat = 3.9;
    a.q = 3;
    a.alpha = 0.05;
    a.lo = 95.5;
    a.hi = 110.25;
    report.inference.push_back(a);
    report.inference.push_back(InferenceResult{});
    report.tau_used = 22.0;
    report.delta_used = 40;

    TempFile f("report.json");
    write_report_json(f.path, report);
    ChangePointReport back = read_report_json(f.path);
    CHECK(back.preliminary == report.preliminary);
    CHECK(back.refined == report.refined);
    CHECK(back.inference_ok == report.inference_ok);
    CHECK(back.inference[0].lo == a.lo);
    CHECK(back.inference[0].hi == a.hi);
    CHECK(back.inference[0].kappa_sq_hat == a.kappa_sq_hat);
    CHECK(back.inference_note[1] == "estimated change size is zero");
}

TEST_CASE("price preprocessing") {
    SUBCASE("constant prices give the zero dataset") {
        std::vector<double> prices(30, 100.0);
        FunctionalSeries data = prep_price_series(prices);
        CHECK(data.n() == 30 - 21);
        CHECK(data.grid.p == 20);
        CHECK(data.y.cwiseAbs().maxCoeff() == 0.0);
        CHECK(data.x.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("log-ratio arithmetic on a crafted row") {
        std::vector<double> prices(22, 100.0);
        prices[21] = 110.0;  // day 22 jumps 10%
        FunctionalSeries data = prep_price_series(prices);
        REQUIRE(data.n() == 1);
        CHECK(data.y[0] == doctest::Approx(100.0 * std::log(1.1)).epsilon(1e-12));
        // X_22(1) = 100 log(P_21 / P_1) = 0 for flat history
        CHECK(data.x(0, 0) == 0.0);
    }

    SUBCASE("row-count identity of the real dataset shape") {
        std::vector<double> prices(1271, 50.0);
        CHECK(prep_price_series(prices).n() == 1250);
    }

    SUBCASE("rejects short or nonpositive inputs") {
        CHECK_THROWS_AS(prep_price_series(std::vector<double>(21, 1.0)), std::invalid_argument);
        std::vector<double> bad(30, 1.0);
        bad[7] = 0.0;
        CHECK_THROWS_AS(prep_price_series(bad), std::invalid_argument);
    }
}
