#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "sgfe/analysis.hpp"
#include "sgfe/assembly.hpp"
#include "sgfe/chaos.hpp"
#include "sgfe/io.hpp"
#include "sgfe/problem.hpp"

namespace {

using namespace sgfe;

constexpr int kExitOk = 0;
constexpr int kExitNoConvergence = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitBadConfig = 4;

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

void add_common_options(CLI::App* cmd, ExperimentConfig& cfg) {
  cmd->add_option("--level", cfg.level, "mesh refinement level")
      ->check(CLI::Range(1, 12));
  cmd->add_option("--M", cfg.M, "number of expansion terms")
      ->check(CLI::Range(0, 64));
  cmd->add_option("--k", cfg.k, "polynomial chaos degree")
      ->check(CLI::Range(0, 10));
  cmd->add_option("--sigma", cfg.sigma, "fluctuation amplitude")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--nu0", cfg.nu0, "mean viscosity")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--b1", cfg.b1, "correlation length, first direction")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--b2", cfg.b2, "correlation length, second direction")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--solver", cfg.solver,
                  "minres | bpcg-ana | bpcg-num | bpcg-ratio[:r]");
  cmd->add_option("--ratio", cfg.ratio, "scaling ratio for bpcg-ratio")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--laplacian", cfg.laplacian,
                  "velocity block: exact | exact-mean | multigrid");
  cmd->add_option("--tol", cfg.tolerance, "relative residual tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", cfg.max_iters, "iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", cfg.seed, "random seed for spectral estimates");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--workers", cfg.workers, "worker threads for sweeps")
      ->check(CLI::Range(1, 64));
  cmd->add_flag("--no-pressure-projection",
                [&cfg](std::int64_t) { cfg.pressure_projection = false; },
                "keep the per-mode constant pressure component");
}

void validate_config(const ExperimentConfig& cfg) {
  try {
    canonical_solver_name(cfg.solver);
    parse_lap_mode(cfg.laplacian);
  } catch (const std::exception& e) {
    throw CLI::ValidationError("config", e.what());
  }
  if (cfg.M > 0 && cfg.k < 1) {
    throw CLI::ValidationError("config", "chaos degree must be >= 1 when M > 0");
  }
}

ordered_json instance_json(const Instance& inst) {
  ordered_json j;
  j["Q"] = inst.basis.Q;
  j["N_u"] = inst.fem.N_u;
  j["N_p"] = inst.fem.N_p;
  j["total_dofs"] = inst.op.total_size();
  j["chi"] = inst.kle.chi_total;
  j["nu_lower"] = inst.kle.nu_lower;
  j["nu_upper"] = inst.kle.nu_upper;
  j["sigma_star"] = inst.kle.sigma_star;
  j["variance_capture"] = inst.kle.variance_capture;
  j["reference_window"] = {inst.delta_ref, inst.Delta_ref};
  j["a_star_estimate"] = inst.a_star;
  j["a_used"] = inst.a_used;
  j["scaling_detail"] = inst.scaling_detail;
  return j;
}

// mean and variance of the velocity at the domain center, read off the
// chaos coefficients: mean = zero-index block, variance = sum of squares
// of the remaining blocks
ordered_json center_velocity_stats(const Instance& inst, const Vec& z) {
  const Mesh& mesh = inst.mesh;
  int n = mesh.n, np2 = 2 * n + 1;
  int center = n * np2 + n;
  int n2 = mesh.num_p2();
  double mean_x = 0, mean_y = 0, var_x = 0, var_y = 0;
  for (int beta = 0; beta < inst.basis.Q; ++beta) {
    Vec full = extend_with_zeros(
        mesh, z.segment(static_cast<Eigen::Index>(beta) * inst.fem.N_u,
                        inst.fem.N_u));
    if (beta == 0) full += inst.fem.lifting_u0;
    double ux = full[center], uy = full[n2 + center];
    if (beta == 0) {
      mean_x = ux;
      mean_y = uy;
    } else {
      var_x += ux * ux;
      var_y += uy * uy;
    }
  }
  ordered_json j;
  j["mean"] = {mean_x, mean_y};
  j["variance"] = {var_x, var_y};
  j["mean_magnitude"] = std::sqrt(mean_x * mean_x + mean_y * mean_y);
  j["variance_total"] = var_x + var_y;
  return j;
}

int cmd_solve(const ExperimentConfig& cfg) {
  auto inst = build_instance(cfg);
  Vec z;
  SolveReport rep = run_solver(*inst, z);

  ordered_json j;
  j["config"] = config_to_json(cfg);
  j["instance"] = instance_json(*inst);
  j["result"] = solve_report_json(rep);
  j["center_velocity"] = center_velocity_stats(*inst, z);
  write_text_file(out_path(cfg, "report.json"), j.dump(2) + "\n");

  std::ostringstream csv;
  csv << "# config " << config_to_json(cfg).dump() << "\n";
  csv << "iteration,relative_residual\n";
  for (size_t i = 0; i < rep.residual_history.size(); ++i) {
    csv << (i + 1) << "," << format_double(rep.residual_history[i]) << "\n";
  }
  write_text_file(out_path(cfg, "residuals.csv"), csv.str());

  std::cout << rep.solver << ": " << (rep.converged ? "converged" : "NOT converged")
            << " in " << rep.iterations << " iterations, relative residual "
            << rep.final_relres << "\n";
  return rep.converged ? kExitOk : kExitNoConvergence;
}

struct SweepTask {
  ExperimentConfig cfg;
  std::string param;
  std::string value;
  std::string solver;
};

int cmd_sweep(const ExperimentConfig& base, const std::string& param,
              const std::vector<std::string>& values,
              const std::vector<std::string>& solvers) {
  std::vector<SweepTask> tasks;
  for (const auto& v : values) {
    for (const auto& s : solvers) {
      SweepTask t;
      t.cfg = base;
      t.cfg.solver = s;
      t.param = param;
      t.value = v;
      t.solver = s;
      if (param == "sigma") t.cfg.sigma = std::stod(v);
      else if (param == "level" || param == "h") t.cfg.level = std::stoi(v);
      else if (param == "M") t.cfg.M = std::stoi(v);
      else if (param == "k") t.cfg.k = std::stoi(v);
      else if (param == "nu0") t.cfg.nu0 = std::stod(v);
      else if (param == "tol") t.cfg.tolerance = std::stod(v);
      else throw CLI::ValidationError("--param", "unknown sweep parameter " + param);
      tasks.push_back(std::move(t));
    }
  }

  struct Row {
    bool done = false;
    bool failed = false;
    std::string error;
    double coupling_max = 0.0;
    SolveReport rep;
  };
  std::vector<Row> rows(tasks.size());
  std::atomic<size_t> next{0};
  int nw = std::max(1, base.workers);
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        auto inst = build_instance(tasks[i].cfg);
        if (!inst->G.empty()) {
          rows[i].coupling_max = coupling_extreme_eigs(inst->G[0]).second;
        }
        Vec z;
        rows[i].rep = run_solver(*inst, z);
      } catch (const std::exception& e) {
        rows[i].failed = true;
        rows[i].error = e.what();
      }
      rows[i].done = true;
    }
  };
  if (nw == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::ostringstream csv;
  csv << "# config " << config_to_json(base).dump() << "\n";
  csv << "param,value,solver,iterations,converged,final_relres,scaling,"
         "coupling_max_eig,failed\n";
  bool all_converged = true;
  for (size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    const auto& r = rows[i];
    csv << t.param << "," << t.value << "," << t.solver << ",";
    if (r.failed) {
      csv << "0,false,nan,nan,nan,true\n";
      all_converged = false;
    } else {
      csv << r.rep.iterations << "," << (r.rep.converged ? "true" : "false")
          << "," << format_double(r.rep.final_relres) << ","
          << format_double(r.rep.scaling) << ","
          << format_double(r.coupling_max) << ",false\n";
      all_converged = all_converged && r.rep.converged;
    }
  }
  std::string path = out_path(base, "sweep_" + param + ".csv");
  write_text_file(path, csv.str());
  std::cout << "wrote " << path << " (" << tasks.size() << " rows)\n";
  for (size_t i = 0; i < tasks.size(); ++i) {
    if (rows[i].failed) {
      std::cout << "  " << tasks[i].param << "=" << tasks[i].value << " "
                << tasks[i].solver << " failed: " << rows[i].error << "\n";
    }
  }
  return all_converged ? kExitOk : kExitNoConvergence;
}

int cmd_scaling_study(const ExperimentConfig& base,
                      const std::vector<double>& ratios) {
  ExperimentConfig cfg = base;
  cfg.solver = "bpcg-ratio";
  cfg.ratio = ratios.empty() ? 1.0 : ratios.front();
  auto inst = build_instance(cfg);
  double a_star = inst->a_star;
  // the row the analytical scaling rule would have picked
  double a_ana = inst->kle.nu_lower * inst->delta_ref;
  std::vector<std::pair<double, bool>> grid;
  for (double r : ratios) grid.emplace_back(r, false);
  if (a_ana > 0.0) grid.emplace_back(a_ana / a_star, true);
  std::ostringstream csv;
  csv << "# config " << config_to_json(base).dump() << "\n";
  csv << "ratio,a_star,a_used,iterations,converged,failed,final_relres,"
         "analytical\n";
  int best_iters = -1;
  double best_ratio = 0;
  for (auto [r, is_ana] : grid) {
    bool failed = false;
    SolveReport rep;
    try {
      inst->a_used = r * a_star;
      inst->p2.scaling = inst->a_used;
      inst->h.scaling = inst->a_used;
      Vec z;
      rep = run_solver(*inst, z);
      rep.scaling = inst->a_used;
    } catch (const std::exception& e) {
      failed = true;
    }
    const char* mark = is_ana ? "true" : "false";
    csv << format_double(r) << "," << format_double(a_star) << ",";
    if (failed) {
      csv << format_double(r * a_star) << ",0,false,true,nan," << mark << "\n";
    } else {
      csv << format_double(rep.scaling) << "," << rep.iterations << ","
          << (rep.converged ? "true" : "false") << ",false,"
          << format_double(rep.final_relres) << "," << mark << "\n";
      if (!is_ana && rep.converged &&
          (best_iters < 0 || rep.iterations < best_iters)) {
        best_iters = rep.iterations;
        best_ratio = r;
      }
    }
  }
  std::string path = out_path(base, "scaling_study.csv");
  write_text_file(path, csv.str());
  std::cout << "wrote " << path << "\n";
  if (best_iters >= 0) {
    std::cout << "best ratio " << best_ratio << " with " << best_iters
              << " iterations\n";
  }
  return kExitOk;
}

int cmd_verify_bounds(const ExperimentConfig& base, bool single_point) {
  std::vector<ExperimentConfig> points;
  if (single_point) {
    points.push_back(base);
  } else {
    for (int level : {1, 2})
      for (int M : {1, 2})
        for (int k : {1, 2})
          for (double sigma : {0.0, 0.1}) {
            ExperimentConfig c = base;
            c.level = level;
            c.M = M;
            c.k = k;
            c.sigma = sigma;
            points.push_back(c);
          }
  }
  std::vector<VerifyReport> reports;
  ordered_json index = ordered_json::array();
  bool all_pass = true;
  int idx = 0;
  for (const auto& p : points) {
    ordered_json entry;
    entry["config"] = config_to_json(p);
    try {
      VerifyReport rep = verify_instance(p);
      reports.push_back(rep);
      ordered_json checks = ordered_json::array();
      for (const auto& c : rep.checks) {
        ordered_json cj;
        cj["name"] = c.name;
        cj["bound_lo"] = c.bound_lo;
        cj["bound_hi"] = c.bound_hi;
        cj["measured_min"] = c.measured_min;
        cj["measured_max"] = c.measured_max;
        cj["margin_lo"] = c.margin_lo;
        cj["margin_hi"] = c.margin_hi;
        cj["tolerance"] = c.tolerance;
        cj["pass"] = c.pass;
        if (!c.note.empty()) cj["note"] = c.note;
        checks.push_back(cj);
      }
      entry["chi"] = rep.chi;
      entry["gamma"] = rep.gamma;
      entry["reference_window"] = {rep.delta_ref, rep.Delta_ref};
      entry["checks"] = checks;
      entry["all_pass"] = rep.all_pass;
      all_pass = all_pass && rep.all_pass;
      std::cout << "point " << idx << " (level " << p.level << ", M " << p.M
                << ", k " << p.k << ", sigma " << p.sigma << "): "
                << (rep.all_pass ? "pass" : "FAIL") << "\n";
    } catch (const std::exception& e) {
      entry["skipped"] = e.what();
      std::cout << "point " << idx << " skipped: " << e.what() << "\n";
    }
    index.push_back(entry);
    ++idx;
  }
  write_text_file(out_path(base, "bounds.json"), index.dump(2) + "\n");
  write_text_file(out_path(base, "bounds.md"), verify_report_markdown(reports));
  std::cout << (all_pass ? "all bounds verified" : "BOUND VIOLATION detected")
            << "\n";
  return all_pass ? kExitOk : kExitNoConvergence;
}

int cmd_export(const ExperimentConfig& cfg) {
  auto inst = build_instance(cfg);
  if (inst->op.total_size() > 200000) {
    throw std::runtime_error("instance too large to export");
  }
  write_matrix_market(out_path(cfg, "A0.mtx"), inst->fem.A0);
  for (size_t m = 0; m < inst->fem.A_fluct.size(); ++m) {
    write_matrix_market(out_path(cfg, "A" + std::to_string(m + 1) + ".mtx"),
                        inst->fem.A_fluct[m]);
  }
  write_matrix_market(out_path(cfg, "B.mtx"), inst->fem.B);
  write_matrix_market(out_path(cfg, "Mp.mtx"), inst->fem.M_p);
  for (size_t m = 0; m < inst->G.size(); ++m) {
    write_matrix_market(out_path(cfg, "G" + std::to_string(m + 1) + ".mtx"),
                        inst->G[m]);
  }
  write_vector_market(out_path(cfg, "rhs.mtx"), inst->rhs);
  ordered_json j;
  j["config"] = config_to_json(cfg);
  j["instance"] = instance_json(*inst);
  write_text_file(out_path(cfg, "export.json"), j.dump(2) + "\n");
  std::cout << "exported factor matrices to " << cfg.out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  ExperimentConfig cfg;

  // resolve --config before the regular pass so flags override file values
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        cfg = load_config_file(argv[i + 1], cfg);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
      }
    }
  }

  CLI::App app{"stochastic Galerkin saddle-point solver bench"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file")
      ->expected(1);

  auto* solve = app.add_subcommand("solve", "run one solver on one instance");
  add_common_options(solve, cfg);
  solve->add_option("--config", config_path, "JSON config file");

  auto* sweep = app.add_subcommand("sweep", "parameter sweep, long-format CSV");
  add_common_options(sweep, cfg);
  sweep->add_option("--config", config_path, "JSON config file");
  std::string sweep_param = "sigma";
  std::vector<std::string> sweep_values{"0.05", "0.1", "0.15"};
  std::vector<std::string> sweep_solvers{"minres", "bpcg-ana", "bpcg-num"};
  sweep->add_option("--param", sweep_param,
                    "sigma | level | h | M | k | nu0 | tol");
  sweep->add_option("--values", sweep_values, "sweep values")->delimiter(',');
  sweep->add_option("--solvers", sweep_solvers, "solvers to compare")
      ->delimiter(',');

  auto* scaling = app.add_subcommand(
      "scaling-study", "iteration count against the scaling ratio");
  add_common_options(scaling, cfg);
  scaling->add_option("--config", config_path, "JSON config file");
  std::vector<double> ratios{0.2, 0.4, 0.6, 0.8, 0.9, 0.95, 1.0, 1.05, 1.2};
  scaling->add_option("--ratios", ratios, "ratios of the estimated extreme")
      ->delimiter(',');

  auto* verify = app.add_subcommand("verify-bounds",
                                    "brute-force eigenvalue bound checks");
  add_common_options(verify, cfg);
  verify->add_option("--config", config_path, "JSON config file");
  bool verify_single = false;
  verify->add_flag("--single", verify_single,
                   "verify only the configured point, not the default grid");

  auto* exportc = app.add_subcommand("export-matrices",
                                     "write the factor matrices to disk");
  add_common_options(exportc, cfg);
  exportc->add_option("--config", config_path, "JSON config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadConfig;
  }

  try {
    validate_config(cfg);
    if (solve->parsed()) return cmd_solve(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg, sweep_param, sweep_values,
                                          sweep_solvers);
    if (scaling->parsed()) return cmd_scaling_study(cfg, ratios);
    if (verify->parsed()) return cmd_verify_bounds(cfg, verify_single);
    if (exportc->parsed()) return cmd_export(cfg);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::exception& e) {
    // feasibility guards and numerical failures surface here
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  }
  return kExitBadConfig;
}
