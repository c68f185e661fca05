#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "sgfe/assembly.hpp"
#include "sgfe/mesh.hpp"
#include "sgfe/quadrature.hpp"

using namespace sgfe;

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Mat dense(const SpMat& s) { return Mat(s); }

}  // namespace

TEST_SUITE("mesh_fem") {

TEST_CASE("grid sizes and coordinates") {
  Mesh m1 = build_structured_mesh(1);
  CHECK(m1.n == 2);
  CHECK(m1.num_p1() == 9);
  CHECK(m1.num_p2() == 25);
  CHECK(static_cast<int>(m1.tri_p1.size()) == 8);
  CHECK(m1.num_interior_p2() == 9);

  Mesh m3 = build_structured_mesh(3);
  CHECK(m3.n == 8);
  CHECK(m3.num_p1() == 81);
  CHECK(m3.num_interior_p2() == 225);
  CHECK(static_cast<int>(m3.tri_p1.size()) == 128);

  // domain is the centered unit square
  int np2 = 2 * m1.n + 1;
  int center = m1.n * np2 + m1.n;
  CHECK(m1.p2_coords[center][0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(m1.p2_coords[center][1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(m1.p2_coords[0][0] == doctest::Approx(-0.5));
  CHECK(m1.p2_coords[0][1] == doctest::Approx(-0.5));
  CHECK(m1.p2_boundary[0]);
  CHECK(!m1.p2_boundary[center]);
  CHECK(m1.p2_interior_index[center] >= 0);
  CHECK(static_cast<int>(m1.interior_p2.size()) == m1.num_interior_p2());

  double area = 0.0;
  for (size_t t = 0; t < m1.tri_p1.size(); ++t) {
    double a = m1.triangle_area(static_cast<int>(t));
    CHECK(a > 0.0);  // consistent orientation
    CHECK(a == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
    area += a;
  }
  CHECK(area == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("triangle quadrature is exact to degree five") {
  const auto& q = tri_quadrature_7();
  double wsum = 0.0;
  for (const auto& p : q) wsum += p.w;
  CHECK(wsum == doctest::Approx(0.5).epsilon(1e-15));

  // int_T l1^a l2^b over the reference triangle = a! b! / (a+b+2)!
  for (int a = 0; a + 0 <= 5; ++a) {
    for (int b = 0; a + b <= 5; ++b) {
      double got = 0.0;
      for (const auto& p : q) {
        got += p.w * std::pow(p.l1, a) * std::pow(p.l2, b);
      }
      double want = factorial(a) * factorial(b) / factorial(a + b + 2);
      CHECK(std::abs(got - want) < 1e-15);
    }
  }
}

TEST_CASE("gauss rules") {
  std::vector<double> x, w;
  gauss_legendre(6, 0.0, 1.0, x, w);
  double v = 0.0;
  for (size_t i = 0; i < x.size(); ++i) v += w[i] * std::pow(x[i], 10);
  CHECK(v == doctest::Approx(1.0 / 11.0).epsilon(1e-14));

  // the independent rule in the test oracle agrees node by node
  std::vector<double> ox, ow;
  oracle::gauss_rule(12, -1.0, 1.0, ox, ow);
  gauss_legendre(12, -1.0, 1.0, x, w);
  REQUIRE(x.size() == ox.size());
  for (size_t i = 0; i < x.size(); ++i) {
    CHECK(std::abs(x[i] - ox[i]) < 1e-14);
    CHECK(std::abs(w[i] - ow[i]) < 1e-14);
  }
}

TEST_CASE("stiffness matches independent assembly") {
  Mesh mesh = build_structured_mesh(1);
  auto unit = [](double, double) { return 1.0; };
  auto vary = [](double x, double y) { return 1.0 + 0.3 * x + 0.2 * y * y; };

  for (auto& coeff : {ScalarField(unit), ScalarField(vary)}) {
    SpMat K = assemble_scalar_stiffness(mesh, coeff);
    Mat Ko = oracle::scalar_stiffness_dense(mesh, coeff);
    double scale = Ko.cwiseAbs().maxCoeff();
    CHECK((dense(K) - Ko).cwiseAbs().maxCoeff() < 1e-12 * scale);
  }

  SpMat K = assemble_scalar_stiffness(mesh, unit);
  CHECK((dense(K) - dense(K).transpose()).cwiseAbs().maxCoeff() < 1e-14);
  Vec ones = Vec::Ones(mesh.num_p2());
  CHECK((K * ones).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("divergence and pressure mass") {
  Mesh mesh = build_structured_mesh(2);
  SpMat B = assemble_divergence_full(mesh);
  Mat Bo = oracle::divergence_dense(mesh);
  CHECK((dense(B) - Bo).cwiseAbs().maxCoeff() < 1e-13);

  // divergence-free inputs are annihilated: constants and the shear (y, 0)
  int n2 = mesh.num_p2();
  Vec c = Vec::Ones(2 * n2);
  CHECK((B * c).cwiseAbs().maxCoeff() < 1e-13);
  Vec shear = Vec::Zero(2 * n2);
  for (int i = 0; i < n2; ++i) shear[i] = mesh.p2_coords[i][1];
  CHECK((B * shear).cwiseAbs().maxCoeff() < 1e-13);

  SpMat Mp;
  Vec Dp;
  assemble_pressure_mass(mesh, Mp, Dp);
  Mat Mo = oracle::pressure_mass_dense(mesh);
  CHECK((dense(Mp) - Mo).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(dense(Mp).sum() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK((Dp - dense(Mp).diagonal()).cwiseAbs().maxCoeff() < 1e-15);

  // mass versus its diagonal stays inside the classical [1/2, 2] window
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(dense(Mp),
                                                  Mat(Dp.asDiagonal()));
  CHECK(es.eigenvalues().minCoeff() >= 0.5 - 1e-12);
  CHECK(es.eigenvalues().maxCoeff() <= 2.0 + 1e-12);
}

TEST_CASE("velocity blocks and weighted factors") {
  Mesh mesh = build_structured_mesh(1);
  auto field = [](double x, double y) { return 0.2 * x + 0.1 * y; };
  FeMatrices fem = assemble_taylor_hood(mesh, 2.5, {ScalarField(field)});
  CHECK(fem.N_u == 2 * mesh.num_interior_p2());
  CHECK(fem.N_p == mesh.num_p1());

  // constant viscosity scales the unit operator
  CHECK((dense(fem.A0) - 2.5 * dense(fem.A)).cwiseAbs().maxCoeff() < 1e-12);

  // both components see the same scalar operator, no cross coupling
  int ni = mesh.num_interior_p2();
  Mat A = dense(fem.A);
  CHECK((A.block(0, 0, ni, ni) - A.block(ni, ni, ni, ni)).cwiseAbs().maxCoeff() <
        1e-14);
  CHECK(A.block(0, ni, ni, ni).cwiseAbs().maxCoeff() == 0.0);

  Mat Kf = oracle::scalar_stiffness_dense(mesh, field);
  Mat Af = dense(fem.A_fluct[0]);
  Mat Kfi = dense(interior_scalar_matrix(mesh, fem.K_fluct_full[0]));
  CHECK((Af.block(0, 0, ni, ni) - Kfi).cwiseAbs().maxCoeff() < 1e-14);
  double scale = Kf.cwiseAbs().maxCoeff();
  CHECK((dense(fem.K_fluct_full[0]) - Kf).cwiseAbs().maxCoeff() < 1e-12 * scale);
}

TEST_CASE("cavity boundary data") {
  Mesh mesh = build_structured_mesh(2);
  FeMatrices fem = assemble_taylor_hood(mesh, 1.0, {});
  build_cavity_rhs(mesh, fem, cavity_lid_profile);

  auto lid = cavity_lid_profile(0.0);
  CHECK(lid[0] == doctest::Approx(1.0));
  CHECK(cavity_lid_profile(0.5)[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(cavity_lid_profile(-0.5)[0] == doctest::Approx(0.0).epsilon(1e-15));

  int n2 = mesh.num_p2();
  for (int i = 0; i < n2; ++i) {
    double x = mesh.p2_coords[i][0], y = mesh.p2_coords[i][1];
    double want = (std::abs(y - 0.5) < 1e-14)
                      ? 1.0 - 16.0 * x * x * x * x
                      : 0.0;
    CHECK(std::abs(fem.lifting_u0[i] - want) < 1e-14);
    CHECK(fem.lifting_u0[n2 + i] == 0.0);  // lid moves horizontally
  }

  // compatibility and consistency of the derived loads
  CHECK(std::abs(fem.rhs_t.sum()) < 1e-12);
  CHECK((fem.rhs_t + fem.B_full * fem.lifting_u0).cwiseAbs().maxCoeff() <
        1e-13);
  Vec kl(2 * n2);
  kl.head(n2) = fem.K_mean_full * fem.lifting_u0.head(n2);
  kl.tail(n2) = fem.K_mean_full * fem.lifting_u0.tail(n2);
  CHECK((fem.rhs_f + restrict_to_interior(mesh, kl)).cwiseAbs().maxCoeff() <
        1e-13);
}

TEST_CASE("interior restriction roundtrip") {
  Mesh mesh = build_structured_mesh(2);
  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  Vec r(2 * mesh.num_interior_p2());
  for (int i = 0; i < r.size(); ++i) r[i] = g(rng);
  Vec full = extend_with_zeros(mesh, r);
  CHECK(full.size() == 2 * mesh.num_p2());
  for (int i = 0; i < mesh.num_p2(); ++i) {
    if (mesh.p2_boundary[i]) {
      CHECK(full[i] == 0.0);
      CHECK(full[mesh.num_p2() + i] == 0.0);
    }
  }
  Vec back = restrict_to_interior(mesh, full);
  CHECK((back - r).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("oracle point evaluation reproduces quadratics") {
  Mesh mesh = build_structured_mesh(2);
  Vec coeffs(mesh.num_p2());
  auto f = [](double x, double y) { return x * x + 0.5 * y - 0.25 * x * y; };
  for (int i = 0; i < mesh.num_p2(); ++i) {
    coeffs[i] = f(mesh.p2_coords[i][0], mesh.p2_coords[i][1]);
  }
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int t = 0; t < 20; ++t) {
    double x = u(rng), y = u(rng);
    CHECK(std::abs(oracle::fe_eval(mesh, coeffs, x, y) - f(x, y)) < 1e-13);
  }
}

}  // TEST_SUITE
