#pragma once

#include <vector>

#include "sgfe/assembly.hpp"
#include "sgfe/chaos.hpp"
#include "sgfe/types.hpp"

namespace sgfe {

// Matrix-free action of the coupled saddle-point system
//
//   [ A_blk  Bt_blk ] [u]   A_blk  = I (x) A0 + sum_m G_m (x) A_m
//   [ B_blk  0      ] [p],  B_blk  = I (x) B
//
// Vectors are stored block by block: the velocity part is Q panels of length
// N_u, the pressure part Q panels of length N_p. Panel evaluation never forms
// the large matrix; each apply reshapes the vector into an N x Q matrix,
// multiplies the finite element factor on the left and the (small, sparse)
// coupling factor on the right.
struct SaddleOperator {
  const FeMatrices* fem = nullptr;
  const std::vector<SpMat>* G = nullptr;
  int Q = 0;
  int Nu = 0, Np = 0;
  CountersPtr counters;

  int velocity_size() const { return Q * Nu; }
  int pressure_size() const { return Q * Np; }
  int total_size() const { return Q * (Nu + Np); }

  void apply_A(const Vec& u, Vec& out) const;
  void apply_B(const Vec& u, Vec& out) const;   // velocity -> pressure
  void apply_Bt(const Vec& p, Vec& out) const;  // pressure -> velocity
  void apply(const Vec& x, Vec& out) const;     // full saddle action
};

SaddleOperator make_saddle_operator(const FeMatrices& fem,
                                    const std::vector<SpMat>& G, int Q,
                                    CountersPtr counters);

// Right-hand side for the driven-cavity problem with the stored lifting:
// mean-mode forcing plus the coupling-weighted fluctuation lift terms.
Vec build_saddle_rhs(const FeMatrices& fem, const std::vector<SpMat>& G, int Q);

// Dense assembly of the coupled blocks for small instances (cross-checks).
struct DenseBlocks {
  Mat A;   // Q*Nu x Q*Nu
  Mat B;   // Q*Np x Q*Nu
  Mat C;   // full saddle matrix
};
DenseBlocks assemble_dense_blocks(const SaddleOperator& op, int max_dim = 6000);

// Basis of the pressure null space: e_beta (x) 1 for each chaos mode,
// normalized. Returned as columns.
Mat pressure_kernel_basis(int Q, int Np);

// Remove the per-mode constant pressure component in place.
void project_pressure_blocks(Vec& p, int Q, int Np);

}  // namespace sgfe
