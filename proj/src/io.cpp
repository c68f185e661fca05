#include "sgfe/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sgfe {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

ordered_json config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["level"] = cfg.level;
  j["M"] = cfg.M;
  j["k"] = cfg.k;
  j["sigma"] = cfg.sigma;
  j["nu0"] = cfg.nu0;
  j["b1"] = cfg.b1;
  j["b2"] = cfg.b2;
  j["solver"] = cfg.solver;
  j["ratio"] = cfg.ratio;
  j["laplacian"] = cfg.laplacian;
  j["tolerance"] = cfg.tolerance;
  j["max_iters"] = cfg.max_iters;
  j["seed"] = cfg.seed;
  j["pressure_projection"] = cfg.pressure_projection;
  j["out_dir"] = cfg.out_dir;
  j["workers"] = cfg.workers;
  return j;
}

ExperimentConfig config_from_json(const ordered_json& j,
                                  const ExperimentConfig& defaults) {
  ExperimentConfig cfg = defaults;
  auto get = [&j](const char* key, auto& target) {
    if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
  };
  get("level", cfg.level);
  get("M", cfg.M);
  get("k", cfg.k);
  get("sigma", cfg.sigma);
  get("nu0", cfg.nu0);
  get("b1", cfg.b1);
  get("b2", cfg.b2);
  get("solver", cfg.solver);
  get("ratio", cfg.ratio);
  get("laplacian", cfg.laplacian);
  get("tolerance", cfg.tolerance);
  get("max_iters", cfg.max_iters);
  get("seed", cfg.seed);
  get("pressure_projection", cfg.pressure_projection);
  get("out_dir", cfg.out_dir);
  get("workers", cfg.workers);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path,
                                  const ExperimentConfig& defaults) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("config parse error in " + path + ": " + e.what());
  }
  return config_from_json(j, defaults);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

ordered_json solve_report_json(const SolveReport& rep) {
  ordered_json j;
  j["solver"] = rep.solver;
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["final_relres"] = rep.final_relres;
  j["scaling"] = rep.scaling;
  j["wall_seconds"] = rep.wall_seconds;
  ordered_json counts;
  for (const auto& [k, v] : rep.op_counts) counts[k] = v;
  j["op_counts"] = counts;
  return j;
}

void write_matrix_market(const std::string& path, const SpMat& A) {
  std::ostringstream os;
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      os << (it.row() + 1) << " " << (it.col() + 1) << " "
         << format_double(it.value()) << "\n";
    }
  }
  write_text_file(path, os.str());
}

void write_vector_market(const std::string& path, const Vec& v) {
  std::ostringstream os;
  os << "%%MatrixMarket matrix array real general\n";
  os << v.size() << " 1\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    os << format_double(v[i]) << "\n";
  }
  write_text_file(path, os.str());
}

}  // namespace sgfe
