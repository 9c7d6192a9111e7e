#pragma once

#include <string>
#include <vector>

#include "frbs/pipeline.hpp"
#include "frbs/simulate.hpp"

namespace frbs {

/// Dataset CSV layout: header "y,x_0,...,x_{p-1}", one row per time index.
FunctionalSeries read_dataset_csv(const std::string& path);
void write_dataset_csv(const std::string& path, const FunctionalSeries& data);

void write_truth_json(const std::string& path, const ScenarioSpec& spec,
                      const GroundTruth& truth);
struct TruthFile {
    int n = 0;
    std::vector<int> change_points;
    std::vector<double> kappa_sq_true;
};
TruthFile read_truth_json(const std::string& path);

std::string report_to_json_string(const ChangePointReport& report);
void write_report_json(const std::string& path, const ChangePointReport& report);
ChangePointReport read_report_json(const std::string& path);

void write_metrics_json(const std::string& path, const EvalReport& metrics);

/// S&P-style preprocessing: from a CSV with a "price" column, build
/// y_j = 100 log(P_j / P_{j-1}) and the 20-point lag curve
/// X_j(k) = 100 log(P_{j-k} / P_{j-21}), emitted for j = 22..T.
FunctionalSeries prep_price_series(const std::vector<double>& prices);
std::vector<double> read_price_csv(const std::string& path);

}  // namespace frbs
