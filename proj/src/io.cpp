#include "frbs/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace frbs {

using nlohmann::json;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_cell(const std::string& cell, int line_no) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("csv: non-numeric cell on line " + std::to_string(line_no));
    }
    while (pos < cell.size() && (cell[pos] == ' ' || cell[pos] == '\r')) ++pos;
    if (pos != cell.size())
        throw std::invalid_argument("csv: non-numeric cell on line " + std::to_string(line_no));
    return v;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

FunctionalSeries read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open dataset file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("dataset file is empty: " + path);
    const auto header = split_csv_line(strip_cr(line));
    if (header.size() < 2 || header[0] != "y")
        throw std::invalid_argument("dataset header must be y,x_0,...,x_{p-1}");
    const int p = static_cast<int>(header.size()) - 1;
    for (int i = 0; i < p; ++i)
        if (header[i + 1] != "x_" + std::to_string(i))
            throw std::invalid_argument("dataset header must be y,x_0,...,x_{p-1}");

    std::vector<double> ys;
    std::vector<double> xs;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = strip_cr(line);
        if (stripped.empty()) continue;
        const auto cells = split_csv_line(stripped);
        if (static_cast<int>(cells.size()) != p + 1)
            throw std::invalid_argument("csv: wrong cell count on line " + std::to_string(line_no));
        ys.push_back(parse_cell(cells[0], line_no));
        for (int i = 0; i < p; ++i) xs.push_back(parse_cell(cells[i + 1], line_no));
        if (!std::isfinite(ys.back()))
            throw std::invalid_argument("csv: non-finite value on line " + std::to_string(line_no));
    }
    const int n = static_cast<int>(ys.size());
    if (n < 2) throw std::invalid_argument("dataset has fewer than 2 rows");

    FunctionalSeries data;
    data.grid = make_grid(p);
    data.y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
    data.x = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        xs.data(), n, p);
    if (!data.x.allFinite())
        throw std::invalid_argument("dataset contains non-finite covariate values");
    return data;
}

void write_dataset_csv(const std::string& path, const FunctionalSeries& data) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write dataset file: " + path);
    out << "y";
    for (int i = 0; i < data.grid.p; ++i) out << ",x_" << i;
    out << "\n";
    char buf[32];
    for (int j = 0; j < data.n(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", data.y[j]);
        out << buf;
        for (int i = 0; i < data.grid.p; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", data.x(j, i));
            out << ',' << buf;
        }
        out << "\n";
    }
}

void write_truth_json(const std::string& path, const ScenarioSpec& spec,
                      const GroundTruth& truth) {
    json doc;
    doc["schema"] = 1;
    doc["n"] = spec.n;
    doc["p"] = spec.p;
    doc["c_beta"] = spec.c_beta;
    doc["seed"] = spec.seed;
    doc["change_points"] = truth.change_points;
    doc["kappa_sq_true"] = truth.kappa_sq_true;
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write truth file: " + path);
    out << doc.dump(2) << "\n";
}

TruthFile read_truth_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open truth file: " + path);
    json doc = json::parse(in);
    TruthFile t;
    t.n = doc.at("n").get<int>();
    t.change_points = doc.at("change_points").get<std::vector<int>>();
    if (doc.contains("kappa_sq_true"))
        t.kappa_sq_true = doc.at("kappa_sq_true").get<std::vector<double>>();
    return t;
}

static json report_json(const ChangePointReport& report) {
    json doc;
    doc["schema"] = 1;
    doc["version"] = kVersion;
    doc["seed"] = report.seed;
    json cfg;
    cfg["lambda_rule"] = report.lambda_is_decay ? "decay" : "constant";
    if (report.lambda_is_decay) {
        cfg["omega"] = report.omega_used;
        cfg["r"] = report.r_used;
    } else {
        cfg["lambda"] = report.lambda_used;
    }
    cfg["tau"] = report.tau_used;
    cfg["delta"] = report.delta_used;
    cfg["alpha"] = report.alpha;
    cfg["mc_budget"] = report.mc_budget;
    cfg["tuned_by_cv"] = report.tuned_by_cv;
    doc["config"] = cfg;
    doc["preliminary"] = report.preliminary;
    doc["refined"] = report.refined;
    json changes = json::array();
    for (std::size_t k = 0; k < report.refined.size(); ++k) {
        json c;
        c["index"] = k;
        c["preliminary"] = report.preliminary[k];
        c["refined"] = report.refined[k];
        c["search"] = {report.search_intervals[k].s, report.search_intervals[k].e};
        c["refine_degraded"] = static_cast<bool>(report.refine_degraded[k]);
        c["inference_ok"] = static_cast<bool>(report.inference_ok[k]);
        if (report.inference_ok[k]) {
            const auto& inf = report.inference[k];
            c["kappa_sq"] = inf.kappa_sq_hat;
            c["sigma_inf_sq"] = inf.sigma_inf_sq_hat;
            c["q"] = inf.q;
            c["alpha"] = inf.alpha;
            c["ci"] = {inf.lo, inf.hi};
            c["degenerate"] = inf.degenerate;
        } else {
            c["note"] = report.inference_note[k];
        }
        changes.push_back(c);
    }
    doc["changes"] = changes;
    return doc;
}

std::string report_to_json_string(const ChangePointReport& report) {
    return report_json(report).dump(2);
}

void write_report_json(const std::string& path, const ChangePointReport& report) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write report file: " + path);
    out << report_to_json_string(report) << "\n";
}

ChangePointReport read_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open report file: " + path);
    json doc = json::parse(in);
    ChangePointReport report;
    report.seed = doc.at("seed").get<std::uint64_t>();
    report.preliminary = doc.at("preliminary").get<std::vector<int>>();
    report.refined = doc.at("refined").get<std::vector<int>>();
    report.tau_used = doc.at("config").at("tau").get<double>();
    report.delta_used = doc.at("config").at("delta").get<int>();
    report.alpha = doc.at("config").at("alpha").get<double>();
    for (const auto& c : doc.at("changes")) {
        report.search_intervals.push_back(
            {c.at("search")[0].get<int>(), c.at("search")[1].get<int>()});
        report.refine_degraded.push_back(c.at("refine_degraded").get<bool>());
        const bool ok = c.at("inference_ok").get<bool>();
        report.inference_ok.push_back(ok);
        InferenceResult inf;
        inf.k = c.at("index").get<int>();
        if (ok) {
            inf.kappa_sq_hat = c.at("kappa_sq").get<double>();
            inf.sigma_inf_sq_hat = c.at("sigma_inf_sq").get<double>();
            inf.q = c.at("q").get<int>();
            inf.alpha = c.at("alpha").get<double>();
            inf.lo = c.at("ci")[0].get<double>();
            inf.hi = c.at("ci")[1].get<double>();
            report.inference_note.emplace_back();
        } else {
            report.inference_note.push_back(c.value("note", ""));
        }
        report.inference.push_back(inf);
    }
    return report;
}

void write_metrics_json(const std::string& path, const EvalReport& metrics) {
    json doc;
    doc["schema"] = 1;
    doc["k_hat"] = metrics.k_hat;
    doc["k_true"] = metrics.k_true;
    doc["under"] = metrics.under;
    doc["over"] = metrics.over;
    doc["hausdorff_pre"] = metrics.hausdorff_pre;
    doc["hausdorff_fin"] = metrics.hausdorff_fin;
    doc["covered"] = metrics.covered;
    doc["widths"] = metrics.widths;
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write metrics file: " + path);
    out << doc.dump(2) << "\n";
}

FunctionalSeries prep_price_series(const std::vector<double>& prices) {
    const int t_max = static_cast<int>(prices.size());
    if (t_max < 22)
        throw std::invalid_argument("prep: need at least 22 price rows");
    for (double pr : prices)
        if (!(pr > 0.0)) throw std::invalid_argument("prep: prices must be positive");

    const int p = 20;
    const int n = t_max - 21;
    FunctionalSeries data;
    data.grid = make_grid(p);
    data.y.resize(n);
    data.x.resize(n, p);
    for (int j = 22; j <= t_max; ++j) {  // 1-based day index
        const int row = j - 22;
        data.y[row] = 100.0 * std::log(prices[j - 1] / prices[j - 2]);
        for (int k = 1; k <= p; ++k)
            data.x(row, k - 1) = 100.0 * std::log(prices[j - k - 1] / prices[j - 22]);
    }
    return data;
}

std::vector<double> read_price_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open price file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("price file is empty: " + path);
    const auto header = split_csv_line(strip_cr(line));
    int col = -1;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == "price") col = static_cast<int>(i);
    if (col < 0) throw std::invalid_argument("price file needs a 'price' column");
    std::vector<double> prices;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = strip_cr(line);
        if (stripped.empty()) continue;
        const auto cells = split_csv_line(stripped);
        if (col >= static_cast<int>(cells.size()))
            throw std::invalid_argument("price: short row on line " + std::to_string(line_no));
        prices.push_back(parse_cell(cells[col], line_no));
    }
    return prices;
}

}  // namespace frbs
