#include <doctest.h>

#include <cmath>
#include <string>

#include "oracles.hpp"
#include "sgfe/analysis.hpp"

using namespace sgfe;

namespace {

ExperimentConfig anchor_config() {
  ExperimentConfig cfg;
  cfg.level = 2;
  cfg.M = 2;
  cfg.k = 2;
  cfg.sigma = 0.1;
  cfg.laplacian = "exact";
  cfg.solver = "minres";
  return cfg;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("bound formulas at pinned inputs") {
  KleExpansion kle = build_kle_2d(1.0, 1.0, 2, 1.0, 0.1);

  auto vel = bound_velocity_pencil(kle, 1.0, 1.0);
  CHECK(vel.first == doctest::Approx(0.7741793198191468).epsilon(1e-9));
  CHECK(vel.second == doctest::Approx(1.225820680180853).epsilon(1e-9));
  // the window scales with the reference pencil
  auto vel2 = bound_velocity_pencil(kle, 0.9, 1.1);
  CHECK(vel2.first == doctest::Approx(0.9 * vel.first).epsilon(1e-12));
  CHECK(vel2.second == doctest::Approx(1.1 * vel.second).epsilon(1e-12));

  double gamma = 0.446246;
  auto schur = bound_schur(kle, gamma);
  CHECK(schur.first == doctest::Approx(0.08122537649088293).epsilon(1e-9));
  CHECK(schur.second == doctest::Approx(2.5833808121705095).epsilon(1e-9));

  auto approx = bound_approx_schur(1.0, 1.0, gamma);
  CHECK(approx.first == doctest::Approx(0.099567746258).epsilon(1e-9));
  CHECK(approx.second == doctest::Approx(2.0).epsilon(1e-12));

  BlockdiagInterval bd = blockdiag_interval(0.8, 1.3, 0.4, 1.9);
  CHECK(bd.neg_lo == doctest::Approx(-1.0352700094407323).epsilon(1e-12));
  CHECK(bd.neg_hi == doctest::Approx(-0.2569178573608527).epsilon(1e-12));
  CHECK(bd.pos_lo == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(bd.pos_hi == doctest::Approx(2.173975065412817).epsilon(1e-12));

  BlocktriInterval bt = blocktri_interval(0.95, 0.8, 1.3, 0.1, 1.8);
  CHECK(bt.applicable);
  CHECK(bt.lo == doctest::Approx(0.09578521202864565).epsilon(1e-12));
  CHECK(bt.hi == doctest::Approx(4.024404653199056).epsilon(1e-12));
  CHECK(bt.zeta1 == doctest::Approx(-3.024404653199056).epsilon(1e-12));
  CHECK(bt.zeta2 == doctest::Approx(0.9042147879713544).epsilon(1e-12));

  // spread ratio below one can push the discriminant negative
  BlocktriInterval degenerate = blocktri_interval(2.0, 1.0, 1.0, 0.25, 0.25);
  CHECK(!degenerate.applicable);
}

TEST_CASE("wider input amplitude widens every interval") {
  KleExpansion lo = build_kle_2d(1.0, 1.0, 2, 1.0, 0.05);
  KleExpansion hi = build_kle_2d(1.0, 1.0, 2, 1.0, 0.15);
  auto vlo = bound_velocity_pencil(lo, 1.0, 1.0);
  auto vhi = bound_velocity_pencil(hi, 1.0, 1.0);
  CHECK(vhi.first < vlo.first);
  CHECK(vhi.second > vlo.second);

  double gamma = 0.446246;
  auto slo = bound_schur(lo, gamma);
  auto shi = bound_schur(hi, gamma);
  CHECK(shi.first < slo.first);
  CHECK(shi.second > slo.second);

  BlockdiagInterval blo =
      blockdiag_interval(vlo.first, vlo.second, slo.first, slo.second);
  BlockdiagInterval bhi =
      blockdiag_interval(vhi.first, vhi.second, shi.first, shi.second);
  CHECK(bhi.neg_lo < blo.neg_lo);
  CHECK(bhi.neg_hi > blo.neg_hi);
  CHECK(bhi.pos_lo < blo.pos_lo);
  CHECK(bhi.pos_hi > blo.pos_hi);
}

TEST_CASE("measured inf-sup constant of the mean problem") {
  Mesh mesh = build_structured_mesh(2);
  FeMatrices fem = assemble_taylor_hood(mesh, 1.0, {});
  build_cavity_rhs(mesh, fem, cavity_lid_profile);
  InfSup is = measure_infsup(fem);
  CHECK(is.gamma == doctest::Approx(0.446246).epsilon(1e-5));
  CHECK(is.deflated <= 1e-12);
  CHECK(is.min_nonzero == doctest::Approx(is.gamma * is.gamma).epsilon(1e-12));
  CHECK(is.max_eig <= kThetaSqUpper + 1e-12);
  CHECK(is.max_eig > 1.0);

  Mesh coarse = build_structured_mesh(1);
  FeMatrices cfem = assemble_taylor_hood(coarse, 1.0, {});
  build_cavity_rhs(coarse, cfem, cavity_lid_profile);
  InfSup cis = measure_infsup(cfem);
  CHECK(cis.gamma > 0.3);
  CHECK(cis.gamma < 0.8);
}

TEST_CASE("brute force verification passes on the anchor instance") {
  for (const char* lap : {"exact", "exact-mean", "multigrid"}) {
    ExperimentConfig cfg = anchor_config();
    cfg.laplacian = lap;
    VerifyReport rep = verify_instance(cfg);
    CHECK(rep.all_pass);
    CHECK(rep.chi == doctest::Approx(1.30377630491).epsilon(1e-9));
    CHECK(rep.gamma == doctest::Approx(0.446246).epsilon(1e-5));
    CHECK(rep.a_star > 0.0);
    REQUIRE(rep.checks.size() >= 7);
    for (const auto& c : rep.checks) {
      CHECK(c.pass);
      CHECK(c.margin_lo >= -c.tolerance);
      CHECK(c.margin_hi >= -c.tolerance);
    }
  }
}

TEST_CASE("verification check names and anchor windows") {
  VerifyReport rep = verify_instance(anchor_config());
  const char* names[] = {"pressure_mass",       "velocity_pencil",
                         "schur_pencil",        "approx_schur_pencil",
                         "blockdiag_pencil",    "blocktri_pencil",
                         "h_inner_product"};
  REQUIRE(rep.checks.size() == 7);
  for (size_t i = 0; i < 7; ++i) {
    CHECK(rep.checks[i].name == names[i]);
  }

  // the measured velocity window sits inside the bound with a real margin
  const BoundCheck& vel = rep.checks[1];
  CHECK(vel.measured_min >= vel.bound_lo[0] - 1e-10);
  CHECK(vel.measured_max <= vel.bound_hi[0] + 1e-10);
  CHECK(vel.measured_min == doctest::Approx(0.870124).epsilon(1e-4));
  CHECK(vel.measured_max - vel.measured_min < 0.3);
  // and the bound is reasonably tight on this instance
  CHECK(vel.bound_hi[0] - vel.bound_lo[0] < 0.5);
}

TEST_CASE("degenerate amplitude collapses the velocity window") {
  ExperimentConfig cfg = anchor_config();
  cfg.sigma = 0.0;
  cfg.laplacian = "exact-mean";
  VerifyReport rep = verify_instance(cfg);
  CHECK(rep.all_pass);
  const BoundCheck& vel = rep.checks[1];
  CHECK(vel.measured_max - vel.measured_min <= 1e-10);
  CHECK(vel.measured_min == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("growing amplitude moves the measured extremes outward") {
  double prev_min = 2.0, prev_max = 0.0;
  for (double sigma : {0.05, 0.1, 0.15}) {
    ExperimentConfig cfg = anchor_config();
    cfg.sigma = sigma;
    VerifyReport rep = verify_instance(cfg);
    CHECK(rep.all_pass);
    const BoundCheck& vel = rep.checks[1];
    CHECK(vel.measured_min < prev_min);
    CHECK(vel.measured_max > prev_max);
    prev_min = vel.measured_min;
    prev_max = vel.measured_max;
  }
}

TEST_CASE("oversized instances are refused") {
  ExperimentConfig cfg = anchor_config();
  cfg.level = 3;
  cfg.M = 6;
  CHECK_THROWS_AS(verify_instance(cfg), std::runtime_error);
}

TEST_CASE("report rendering") {
  VerifyReport rep = verify_instance(anchor_config());
  std::string md = verify_report_markdown({rep});
  CHECK(md.find("# Eigenvalue bound verification") != std::string::npos);
  CHECK(md.find("velocity_pencil") != std::string::npos);
  CHECK(md.find("blocktri_pencil") != std::string::npos);
  CHECK(md.find("| check |") != std::string::npos);
  CHECK(md.find("level 2") != std::string::npos);
  CHECK(md.find("yes") != std::string::npos);
}

}  // TEST_SUITE
