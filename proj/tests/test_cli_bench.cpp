#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "sgfe/io.hpp"

using namespace sgfe;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(SGFE_CLI_PATH) + " " + args +
                    " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& tag) {
  fs::path d = fs::temp_directory_path() /
               ("sgfe_cli_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

const char* kTiny = "--level 1 --M 1 --k 1 --sigma 0.05 --laplacian exact";

}  // namespace

TEST_SUITE("cli_bench") {

TEST_CASE("exit codes") {
  fs::path d = fresh_dir("codes");
  CHECK(run_cli(std::string("solve ") + kTiny + " --solver minres --out " +
                (d / "ok").string()) == 0);
  CHECK(run_cli(std::string("solve ") + kTiny +
                " --solver minres --max-iters 1 --tol 1e-14 --out " +
                (d / "stall").string()) == 2);
  CHECK(run_cli("solve --level 1 --M 1 --k 1 --sigma 0.9 --laplacian exact"
                " --solver minres --out " +
                (d / "bad_field").string()) == 3);
  CHECK(run_cli(std::string("solve ") + kTiny + " --solver huh") == 4);
  CHECK(run_cli("nonsense") == 4);
  CHECK(run_cli("") == 4);
  CHECK(run_cli("solve --level 0") == 4);
  CHECK(run_cli("solve --config /definitely/not/there.json") == 4);
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("solve artifacts") {
  fs::path d = fresh_dir("solve");
  REQUIRE(run_cli(std::string("solve ") + kTiny +
                  " --solver minres --tol 1e-8 --out " + d.string()) == 0);

  json rep = load_json(d / "report.json");
  CHECK(rep["config"]["level"] == 1);
  CHECK(rep["config"]["solver"] == "minres");
  CHECK(rep["config"]["tolerance"] == 1e-8);
  CHECK(rep["instance"]["Q"] == 2);
  CHECK(rep["instance"]["N_u"] == 18);
  CHECK(rep["instance"]["N_p"] == 9);
  CHECK(rep["result"]["converged"] == true);
  CHECK(rep["result"]["final_relres"].get<double>() <= 1e-8);
  CHECK(rep["center_velocity"].contains("mean"));
  CHECK(rep["center_velocity"].contains("variance_total"));

  auto rows = lines_of(slurp(d / "residuals.csv"));
  int iters = rep["result"]["iterations"].get<int>();
  REQUIRE(static_cast<int>(rows.size()) == iters + 2);
  CHECK(rows[0].rfind("# config", 0) == 0);
  CHECK(rows[1] == "iteration,relative_residual");
  CHECK(rows[2].rfind("1,", 0) == 0);

  // zero amplitude has exactly zero velocity variance at the probe
  fs::path dz = fresh_dir("solve_flat");
  REQUIRE(run_cli("solve --level 1 --M 1 --k 1 --sigma 0 --laplacian exact"
                  " --solver bpcg-num --out " +
                  dz.string()) == 0);
  json flat = load_json(dz / "report.json");
  CHECK(flat["center_velocity"]["variance_total"].get<double>() == 0.0);
}

TEST_CASE("config files resolve before flags") {
  fs::path d = fresh_dir("config");
  {
    std::ofstream out(d / "cfg.json");
    out << R"({"level": 1, "M": 1, "k": 1, "sigma": 0.05,
               "solver": "minres", "laplacian": "exact", "tolerance": 1e-8})";
  }
  REQUIRE(run_cli("solve --config " + (d / "cfg.json").string() +
                  " --sigma 0.1 --out " + (d / "out").string()) == 0);
  json rep = load_json(d / "out" / "report.json");
  CHECK(rep["config"]["sigma"] == 0.1);   // flag wins
  CHECK(rep["config"]["level"] == 1);     // file beats the default
  CHECK(rep["config"]["tolerance"] == 1e-8);
}

TEST_CASE("repeated runs emit identical artifacts") {
  fs::path d = fresh_dir("det");
  std::string cmd = std::string("solve ") + kTiny +
                    " --solver bpcg-num --out " + d.string();
  REQUIRE(run_cli(cmd) == 0);
  std::string first_res = slurp(d / "residuals.csv");
  std::string first_rep = slurp(d / "report.json");
  REQUIRE(run_cli(cmd) == 0);
  CHECK(slurp(d / "residuals.csv") == first_res);

  // wall time may differ; everything else must not
  json a = json::parse(first_rep), b = load_json(d / "report.json");
  a["result"].erase("wall_seconds");
  b["result"].erase("wall_seconds");
  CHECK(a == b);
}

TEST_CASE("parameter sweeps") {
  fs::path d = fresh_dir("sweep");
  REQUIRE(run_cli(std::string("sweep ") + kTiny +
                  " --param sigma --values 0.05,0.1"
                  " --solvers minres,bpcg-num --out " +
                  d.string()) == 0);
  auto rows = lines_of(slurp(d / "sweep_sigma.csv"));
  REQUIRE(rows.size() >= 2);
  CHECK(rows[1] ==
        "param,value,solver,iterations,converged,final_relres,scaling,"
        "coupling_max_eig,failed");
  REQUIRE(rows.size() == 6);  // config line, header, 2 values x 2 solvers
  for (size_t i = 2; i < rows.size(); ++i) {
    CHECK(rows[i].find("sigma,") == 0);
    std::vector<std::string> fields;
    std::stringstream fs_(rows[i]);
    std::string f;
    while (std::getline(fs_, f, ',')) fields.push_back(f);
    REQUIRE(fields.size() == 9);
    CHECK(fields[4] == "true");   // converged
    CHECK(fields[8] == "false");  // failed
    // degree-one coupling factor has extreme eigenvalue one
    CHECK(std::stod(fields[7]) == doctest::Approx(1.0).epsilon(1e-10));
  }

  fs::path d4 = fresh_dir("sweep4");
  REQUIRE(run_cli(std::string("sweep ") + kTiny +
                  " --param sigma --values 0.05,0.1"
                  " --solvers minres,bpcg-num --workers 4 --out " +
                  d4.string()) == 0);
  auto rows4 = lines_of(slurp(d4 / "sweep_sigma.csv"));
  REQUIRE(rows4.size() == rows.size());
  for (size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows4[i] == rows[i]);  // worker count changes nothing but the echo
  }
}

TEST_CASE("scaling ratio study") {
  fs::path d = fresh_dir("ratio");
  REQUIRE(run_cli(std::string("scaling-study ") + kTiny +
                  " --ratios 0.8,1.0 --out " + d.string()) == 0);
  auto rows = lines_of(slurp(d / "scaling_study.csv"));
  CHECK(rows[1] ==
        "ratio,a_star,a_used,iterations,converged,failed,final_relres,"
        "analytical");
  REQUIRE(rows.size() == 5);  // two requested ratios plus the analytical row
  int analytical = 0, plain = 0;
  for (size_t i = 2; i < rows.size(); ++i) {
    if (rows[i].size() >= 5 && rows[i].substr(rows[i].size() - 5) == ",true")
      ++analytical;
    else
      ++plain;
  }
  CHECK(analytical == 1);
  CHECK(plain == 2);
}

TEST_CASE("bound verification command") {
  fs::path d = fresh_dir("bounds");
  REQUIRE(run_cli("verify-bounds --single --level 1 --M 1 --k 1 --sigma 0.1"
                  " --laplacian exact --out " +
                  d.string()) == 0);
  json idx = load_json(d / "bounds.json");
  REQUIRE(idx.is_array());
  REQUIRE(idx.size() == 1);
  CHECK(idx[0]["all_pass"] == true);
  CHECK(idx[0]["checks"].size() >= 7);
  std::string md = slurp(d / "bounds.md");
  CHECK(md.find("# Eigenvalue bound verification") != std::string::npos);
  CHECK(md.find("| check |") != std::string::npos);
}

TEST_CASE("matrix export") {
  fs::path d = fresh_dir("export");
  REQUIRE(run_cli("export-matrices --level 1 --M 2 --k 1 --sigma 0.1"
                  " --laplacian exact --out " +
                  d.string()) == 0);
  for (const char* name : {"A0.mtx", "A1.mtx", "A2.mtx", "B.mtx", "Mp.mtx",
                           "G1.mtx", "G2.mtx", "rhs.mtx", "export.json"}) {
    CHECK(fs::exists(d / name));
  }
  auto a0 = lines_of(slurp(d / "A0.mtx"));
  CHECK(a0[0] == "%%MatrixMarket matrix coordinate real general");
  CHECK(a0[1].rfind("18 18 ", 0) == 0);

  // with three chaos modes each coupling factor has one symmetric pair
  for (const char* name : {"G1.mtx", "G2.mtx"}) {
    auto g = lines_of(slurp(d / name));
    CHECK(g[1].rfind("3 3 2", 0) == 0);
    CHECK(g[2].find(" 1") != std::string::npos);
  }

  auto rhs = lines_of(slurp(d / "rhs.mtx"));
  CHECK(rhs[0] == "%%MatrixMarket matrix array real general");
  json info = load_json(d / "export.json");
  int total = info["instance"]["total_dofs"].get<int>();
  CHECK(static_cast<int>(rhs.size()) == total + 2);
}

TEST_CASE("number and config serialization") {
  for (double v : {0.1, 1.0, 1e-6, 2.0 / 3.0, -3.25, 0.0, 1234.5678e-12}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(1.0) == "1");

  ExperimentConfig cfg;
  cfg.level = 3;
  cfg.M = 5;
  cfg.k = 4;
  cfg.sigma = 0.123;
  cfg.solver = "bpcg-ana";
  cfg.ratio = 0.77;
  cfg.laplacian = "exact-mean";
  cfg.tolerance = 1e-9;
  cfg.max_iters = 321;
  cfg.seed = 99;
  cfg.pressure_projection = false;
  cfg.out_dir = "elsewhere";
  cfg.workers = 3;
  ExperimentConfig back = config_from_json(config_to_json(cfg), {});
  CHECK(back.level == cfg.level);
  CHECK(back.M == cfg.M);
  CHECK(back.k == cfg.k);
  CHECK(back.sigma == cfg.sigma);
  CHECK(back.solver == cfg.solver);
  CHECK(back.ratio == cfg.ratio);
  CHECK(back.laplacian == cfg.laplacian);
  CHECK(back.tolerance == cfg.tolerance);
  CHECK(back.max_iters == cfg.max_iters);
  CHECK(back.seed == cfg.seed);
  CHECK(back.pressure_projection == cfg.pressure_projection);
  CHECK(back.out_dir == cfg.out_dir);
  CHECK(back.workers == cfg.workers);
}

TEST_CASE("matrix market round trip") {
  fs::path d = fresh_dir("mtx");
  SpMat A(3, 2);
  std::vector<Triplet> t = {{0, 0, 1.5}, {2, 1, -0.25}, {1, 1, 4.0}};
  A.setFromTriplets(t.begin(), t.end());
  write_matrix_market((d / "a.mtx").string(), A);
  auto rows = lines_of(slurp(d / "a.mtx"));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "%%MatrixMarket matrix coordinate real general");
  CHECK(rows[1] == "3 2 3");
  int found = 0;
  for (size_t i = 2; i < rows.size(); ++i) {
    std::istringstream is(rows[i]);
    int r, c;
    std::string val;
    is >> r >> c >> val;
    for (const auto& trip : t) {
      if (trip.row() + 1 == r && trip.col() + 1 == c) {
        CHECK(std::stod(val) == trip.value());
        ++found;
      }
    }
  }
  CHECK(found == 3);
}

}  // TEST_SUITE
