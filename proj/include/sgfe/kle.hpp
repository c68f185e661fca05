#pragma once

#include <vector>

#include "sgfe/types.hpp"

namespace sgfe {

// One eigenpair of the 1D exponential-covariance operator
// (C f)(x) = int_{-a}^{a} exp(-|x-z|/b) f(z) dz on [-a, a].
// Eigenvalues are 2c/(omega^2 + c^2) with c = 1/b, where omega solves the
// classical transcendental equations: cosine family  omega*tan(omega*a) = c,
// sine family  omega + c*tan(omega*a) = 0. Modes are L2-normalized.
struct Pair1D {
  double lambda = 0.0;
  double omega = 0.0;
  bool even = true;      // cosine family
  double inv_norm = 0.0; // 1/sqrt(int mode_raw^2)
  double sup = 0.0;      // sup |mode| on [-a, a], analytic

  double eval(double x) const;
};

std::vector<Pair1D> solve_1d_eigenpairs(double corr_length, double half_width,
                                        int count);

struct KleTerm {
  double lambda = 0.0;  // 2D eigenvalue, product of two 1D ones
  int i = 0, j = 0;     // indices into the directional pools
  double chi = 0.0;     // sup |sqrt(lambda) * mode|, analytic
  double chi_grid = 0.0;  // 201x201 sample estimate (cross-check)
};

struct KleExpansion {
  double nu0 = 1.0;
  double sigma = 0.0;
  double b1 = 1.0, b2 = 1.0;
  double half_width = 0.5;
  int M = 0;
  std::vector<Pair1D> pool1, pool2;
  std::vector<KleTerm> terms;
  double chi_total = 0.0;      // sum of chi over retained terms
  double chi_grid_total = 0.0;
  double nu_lower = 0.0, nu_upper = 0.0;
  bool is_positive = false;
  double sigma_star = 0.0;     // sigma at which nu_lower hits zero
  double variance_capture = 0.0;

  double mode(int m, double x, double y) const;
  // nu(x, y; parameter vector), yvec entries in [-sqrt(3), sqrt(3)]
  double evaluate(double x, double y, const Vec& yvec) const;
};

KleExpansion build_kle_2d(double b1, double b2, int M, double nu0,
                          double sigma);

struct Positivity {
  bool is_positive = false;
  double nu_lower = 0.0;
  double nu_upper = 0.0;
};
Positivity check_positivity(const KleExpansion& kle);

}  // namespace sgfe
