#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "frbs/io.hpp"
#include "frbs/pipeline.hpp"
#include "frbs/segment.hpp"
#include "frbs/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPipeline = 1;
constexpr int kExitInput = 2;

struct CommonFlags {
    double lambda = -1.0;   // <0: tune by CV
    double tau = -1.0;      // <0: tune by CV / default rule
    int delta = 0;
    double omega = 0.0;     // >0 switches the penalty to the decay rule
    double r = 1.0;
    double alpha = 0.05;
    int mc_budget = 2000;
    int q = 0;
    std::uint64_t seed = 0;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--lambda", f.lambda, "constant ridge penalty (omit to tune by CV)");
    cmd->add_option("--tau", f.tau, "detection threshold (omit to tune by CV)");
    cmd->add_option("--delta", f.delta, "seeded-interval spacing (default n/10)");
    cmd->add_option("--omega", f.omega, "use decay penalty omega*m^(-2r/(2r+1)) instead");
    cmd->add_option("--r", f.r, "smoothness exponent for the decay penalty")->capture_default_str();
    cmd->add_option("--alpha", f.alpha, "confidence level for intervals")->capture_default_str();
    cmd->add_option("--B", f.mc_budget, "Monte-Carlo budget per change point")->capture_default_str();
    cmd->add_option("--q", f.q, "LRV block half-width (default from refined spans)");
    cmd->add_option("--seed", f.seed, "seed for all randomness")->capture_default_str();
    cmd->add_option("--threads", f.threads, "worker threads")->capture_default_str();
}

frbs::DetectorConfig to_config(const CommonFlags& f) {
    frbs::DetectorConfig cfg;
    if (f.omega > 0.0)
        cfg.lambda_rule = frbs::LambdaRule::decay(f.omega, f.r);
    else if (f.lambda >= 0.0)
        cfg.lambda_rule = frbs::LambdaRule::constant(f.lambda);
    if (f.tau >= 0.0) cfg.tau = f.tau;
    if (f.delta > 0) cfg.delta = f.delta;
    cfg.alpha = f.alpha;
    cfg.mc_budget = f.mc_budget;
    if (f.q > 0) cfg.q = f.q;
    cfg.seed = f.seed;
    cfg.threads = f.threads;
    return cfg;
}

int run_detect(const std::string& input, const std::string& output, const CommonFlags& flags) {
    frbs::FunctionalSeries data;
    try {
        data = frbs::read_dataset_csv(input);
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    }
    try {
        frbs::DetectorConfig cfg = to_config(flags);
        // cross-validation tunes (lambda, tau) jointly; a partial override
        // keeps the given value and the default rule fills the other
        const bool run_cv = flags.omega <= 0.0 && flags.lambda < 0.0 && flags.tau < 0.0;
        frbs::ChangePointReport report =
            frbs::detect_changes(data, frbs::sobolev_kernel(), cfg, run_cv);
        frbs::write_report_json(output, report);
        std::cout << "detected " << report.refined.size() << " change point(s); report written to "
                  << output << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return kExitPipeline;
    }
}

int run_simulate(const std::string& scenario, int n, double c_beta, std::uint64_t seed,
                 const std::string& out, const std::string& truth_out) {
    try {
        frbs::ScenarioSpec spec = frbs::scenario_presets(scenario, n, c_beta, seed);
        frbs::SimulatedData sim = frbs::generate(spec);
        frbs::write_dataset_csv(out, sim.data);
        if (!truth_out.empty()) frbs::write_truth_json(truth_out, spec, sim.truth);
        std::cout << "wrote " << sim.data.n() << " rows to " << out << "\n";
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return kExitPipeline;
    }
}

int run_scan(const std::string& input, const std::string& out, double lambda, int s, int e) {
    frbs::FunctionalSeries data;
    try {
        data = frbs::read_dataset_csv(input);
    } catch (const std::exception& ex) {
        std::cerr << "input error: " << ex.what() << "\n";
        return kExitInput;
    }
    try {
        if (e <= 0) e = data.n();
        frbs::SeriesDesign design(data, frbs::sobolev_kernel());
        frbs::ScanEngine engine(design, frbs::LambdaRule::constant(lambda), 10, 10);
        const auto curve = engine.w_curve({s, e});
        std::ofstream fout(out);
        if (!fout) throw std::invalid_argument("cannot write " + out);
        fout << "t,w\n";
        char buf[32];
        for (const auto& [t, w] : curve) {
            std::snprintf(buf, sizeof buf, "%.17g", w);
            fout << t << ',' << buf << "\n";
        }
        std::cout << "wrote " << curve.size() << " statistic values to " << out << "\n";
        return kExitOk;
    } catch (const std::exception& ex) {
        std::cerr << "pipeline error: " << ex.what() << "\n";
        return kExitPipeline;
    }
}

int run_evaluate(const std::string& report_path, const std::string& truth_path,
                 const std::string& out_path) {
    frbs::ChangePointReport report;
    frbs::TruthFile truth;
    try {
        report = frbs::read_report_json(report_path);
        truth = frbs::read_truth_json(truth_path);
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    }
    try {
        frbs::EvalReport ev = frbs::evaluate_report(report, truth.change_points, truth.n);
        std::printf("k_hat=%d k_true=%d under=%d over=%d\n", ev.k_hat, ev.k_true,
                    ev.under ? 1 : 0, ev.over ? 1 : 0);
        std::printf("hausdorff_pre=%.6f hausdorff_fin=%.6f\n", ev.hausdorff_pre,
                    ev.hausdorff_fin);
        for (std::size_t k = 0; k < ev.covered.size(); ++k)
            std::printf("change %zu: covered=%d width=%.3f\n", k, ev.covered[k] ? 1 : 0,
                        ev.widths[k]);
        if (!out_path.empty()) frbs::write_metrics_json(out_path, ev);
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return kExitPipeline;
    }
}

int run_prep(const std::string& input, const std::string& out) {
    try {
        const auto prices = frbs::read_price_csv(input);
        frbs::FunctionalSeries data = frbs::prep_price_series(prices);
        frbs::write_dataset_csv(out, data);
        std::cout << "wrote " << data.n() << " rows to " << out << "\n";
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return kExitPipeline;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"change point detection for scalar-on-function regression time series"};
    app.require_subcommand(1);

    // detect
    auto* detect = app.add_subcommand("detect", "detect change points and build intervals");
    std::string det_in, det_out = "report.json";
    CommonFlags det_flags;
    detect->add_option("--input", det_in, "dataset CSV")->required();
    detect->add_option("--output", det_out, "report JSON path")->capture_default_str();
    add_common(detect, det_flags);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
    std::string sim_scenario = "S1", sim_out = "data.csv", sim_truth;
    int sim_n = 400;
    double sim_cbeta = 1.0;
    std::uint64_t sim_seed = 0;
    simulate->add_option("--scenario", sim_scenario, "S1 or S2")->capture_default_str();
    simulate->add_option("--n", sim_n, "series length")->capture_default_str();
    simulate->add_option("--cbeta", sim_cbeta, "jump size parameter")->capture_default_str();
    simulate->add_option("--seed", sim_seed, "rng seed")->capture_default_str();
    simulate->add_option("--out", sim_out, "dataset CSV path")->capture_default_str();
    simulate->add_option("--truth", sim_truth, "truth sidecar JSON path");

    // scan
    auto* scan = app.add_subcommand("scan", "emit the (t, W_t) statistic curve for an interval");
    std::string scan_in, scan_out = "scan.csv";
    double scan_lambda = 0.2;
    int scan_s = 0, scan_e = 0;
    scan->add_option("--input", scan_in, "dataset CSV")->required();
    scan->add_option("--out", scan_out, "curve CSV path")->capture_default_str();
    scan->add_option("--lambda", scan_lambda, "constant ridge penalty")->capture_default_str();
    scan->add_option("--s", scan_s, "interval start (default 0)")->capture_default_str();
    scan->add_option("--e", scan_e, "interval end (default n)");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "score a report against a truth sidecar");
    std::string eval_report, eval_truth, eval_out;
    evaluate->add_option("--report", eval_report, "report JSON")->required();
    evaluate->add_option("--truth", eval_truth, "truth sidecar JSON")->required();
    evaluate->add_option("--out", eval_out, "metrics JSON path (optional)");

    // prep-sp500
    auto* prep = app.add_subcommand("prep-sp500", "turn a price series into a lag-curve dataset");
    std::string prep_in, prep_out = "dataset.csv";
    prep->add_option("--input", prep_in, "CSV with a 'price' column")->required();
    prep->add_option("--out", prep_out, "dataset CSV path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInput;
    }

    if (detect->parsed()) return run_detect(det_in, det_out, det_flags);
    if (simulate->parsed())
        return run_simulate(sim_scenario, sim_n, sim_cbeta, sim_seed, sim_out, sim_truth);
    if (scan->parsed()) return run_scan(scan_in, scan_out, scan_lambda, scan_s, scan_e);
    if (evaluate->parsed()) return run_evaluate(eval_report, eval_truth, eval_out);
    if (prep->parsed()) return run_prep(prep_in, prep_out);
    return kExitInput;
}
