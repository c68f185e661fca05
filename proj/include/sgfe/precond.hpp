#pragma once

#include <memory>
#include <string>

#include <Eigen/SparseCholesky>

#include "sgfe/kron.hpp"
#include "sgfe/multigrid.hpp"
#include "sgfe/types.hpp"

namespace sgfe {

// Velocity-block approximation A-tilde: either an exact factorization of a
// reference Laplacian (unit-coefficient or mean-weighted) or one symmetric
// multigrid V-cycle per scalar component.
enum class LapMode { ExactUnweighted, ExactMean, Multigrid };

LapMode parse_lap_mode(const std::string& name);
std::string lap_mode_name(LapMode mode);

class LaplacianPrecond {
 public:
  static LaplacianPrecond make_exact(LapMode mode, const FeMatrices& fem,
                                     CountersPtr counters);
  static LaplacianPrecond make_multigrid(int level, CountersPtr counters);

  // action of A-tilde^{-1} on one reduced velocity vector (both components)
  void apply_velocity(const Vec& r, Vec& z) const;
  // action on a single scalar interior vector
  void apply_scalar(const Vec& r, Vec& z) const;

  LapMode mode() const { return mode_; }
  // reference matrix (scalar interior); null in multigrid mode
  const SpMat* scalar_matrix() const;
  const MultigridHierarchy* hierarchy() const { return hier_.get(); }
  int scalar_size() const { return ns_; }

 private:
  LapMode mode_ = LapMode::ExactUnweighted;
  int ns_ = 0;
  std::shared_ptr<SpMat> mat_;  // scalar interior reference matrix
  std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> factor_;
  std::shared_ptr<MultigridHierarchy> hier_;
  CountersPtr counters_;
};

// Block diagonal preconditioner  P1 = diag(I (x) A-tilde, I (x) diag(M_p)).
// Block triangular preconditioner  P2 = [ a*I (x) A-tilde, 0; B_blk, -S ]
// with S = I (x) diag(M_p). Both act block by block across chaos modes.
struct BlockPrecond {
  const SaddleOperator* op = nullptr;
  LaplacianPrecond lap;
  Vec Dp;             // pressure diagonal, one finite element block
  double scaling = 1.0;  // the "a" factor (block triangular only)
  CountersPtr counters;

  // z = P1^{-1} r on the full saddle vector
  void apply_diag_inv(const Vec& r, Vec& z) const;
  // z = P2^{-1} r; uses one A-tilde block solve, one coupled divergence
  // apply and one diagonal Schur solve
  void apply_tri_inv(const Vec& r, Vec& z) const;

  // helpers on the velocity part only: z = (I (x) A-tilde)^{-1} r
  void apply_atilde_blocks(const Vec& r, Vec& z) const;
  void apply_schur_inv(const Vec& r, Vec& z) const;  // pressure part
};

BlockPrecond make_block_precond(const SaddleOperator& op, LaplacianPrecond lap,
                                const Vec& Dp, double scaling,
                                CountersPtr counters);

// The inner product operator behind the conjugate gradient variant:
// H = diag(A_blk - a*I (x) A-tilde,  I (x) diag(M_p)).
// Applying it needs the reference matrix, so it is available in the exact
// modes only; the solver itself never applies H directly.
struct HOperator {
  const SaddleOperator* op = nullptr;
  const SpMat* atilde_scalar = nullptr;  // may be null (multigrid)
  Vec Dp;
  double scaling = 1.0;

  bool can_apply() const { return atilde_scalar != nullptr; }
  void apply(const Vec& x, Vec& out) const;
};

HOperator make_h_operator(const SaddleOperator& op, const LaplacianPrecond& lap,
                          const Vec& Dp, double scaling);

}  // namespace sgfe
