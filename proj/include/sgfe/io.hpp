#pragma once

#include <string>

#include <json.hpp>

#include "sgfe/problem.hpp"
#include "sgfe/solvers.hpp"
#include "sgfe/types.hpp"

namespace sgfe {

using ordered_json = nlohmann::ordered_json;

// shortest round-trip decimal representation, deterministic across runs
std::string format_double(double v);

ordered_json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const ordered_json& j,
                                  const ExperimentConfig& defaults);
ExperimentConfig load_config_file(const std::string& path,
                                  const ExperimentConfig& defaults);

void write_text_file(const std::string& path, const std::string& content);

ordered_json solve_report_json(const SolveReport& rep);

// coordinate-format matrix export, 1-based indices
void write_matrix_market(const std::string& path, const SpMat& A);
void write_vector_market(const std::string& path, const Vec& v);

}  // namespace sgfe
