#pragma once

#include <string>
#include <vector>

#include "sgfe/kle.hpp"
#include "sgfe/problem.hpp"
#include "sgfe/types.hpp"

namespace sgfe {

// Analytic eigenvalue bounds for the preconditioned operators, phrased in
// terms of the input-field envelope chi, the reference-pencil window
// [delta, Delta], the inf-sup constant gamma of the mean problem, and the
// pressure mass-vs-diagonal window [theta^2, Theta^2] = [1/2, 2].

inline constexpr double kThetaSq = 0.5;
inline constexpr double kThetaSqUpper = 2.0;

// velocity-block pencil (A_blk, I (x) Atilde_blk)
std::pair<double, double> bound_velocity_pencil(const KleExpansion& kle,
                                                double delta, double Delta);

// Schur pencil (B_blk A_blk^{-1} B_blk^T, I (x) diag(M_p)), nonzero part
std::pair<double, double> bound_schur(const KleExpansion& kle, double gamma);

// approximated Schur pencil (B_blk (I (x) Atilde)^{-1} B_blk^T, same diag)
std::pair<double, double> bound_approx_schur(double delta, double Delta,
                                             double gamma);

struct BlockdiagInterval {
  double neg_lo = 0.0;  // -a
  double neg_hi = 0.0;  // -b
  double pos_lo = 0.0;  // c
  double pos_hi = 0.0;  // d
};
BlockdiagInterval blockdiag_interval(double dhat, double Dhat, double th,
                                     double Th);

struct BlocktriInterval {
  double lo = 0.0;  // 1 - zeta2
  double hi = 0.0;  // 1 - zeta1
  double zeta1 = 0.0, zeta2 = 0.0;
  bool applicable = false;  // discriminants nonnegative
};
// a_delta in (0, 1]: the scaling is a = a_delta * dhat
BlocktriInterval blocktri_interval(double a_delta, double dhat, double Dhat,
                                   double schur_lo, double schur_hi);

// Measured inf-sup data of the mean finite element problem (dense path).
struct InfSup {
  double gamma = 0.0;        // sqrt of smallest nonzero eigenvalue
  double min_nonzero = 0.0;  // of (B A^{-1} B^T, M_p)
  double max_eig = 0.0;
  double deflated = 0.0;     // the eigenvalue treated as zero
};
InfSup measure_infsup(const FeMatrices& fem);

// One brute-force containment check: measured spectrum against an interval
// (or union of two for the indefinite case).
struct BoundCheck {
  std::string name;
  std::vector<double> bound_lo, bound_hi;    // one or two intervals
  double measured_min = 0.0, measured_max = 0.0;
  double margin_lo = 0.0, margin_hi = 0.0;   // distance into the interval
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct VerifyReport {
  ExperimentConfig cfg;
  double chi = 0.0;
  double gamma = 0.0;
  double delta_ref = 1.0, Delta_ref = 1.0;
  double a_star = 0.0;
  std::vector<BoundCheck> checks;
  bool all_pass = false;
};

// Brute-force verification of every spectral bound on one small instance.
// Dense eigensolves throughout; throws if the instance is too large.
VerifyReport verify_instance(const ExperimentConfig& cfg);

std::string verify_report_markdown(const std::vector<VerifyReport>& reports);

}  // namespace sgfe
