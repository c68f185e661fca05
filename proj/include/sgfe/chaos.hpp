#pragma once

#include <vector>

#include "sgfe/types.hpp"

namespace sgfe {

// Total-degree multivariate Legendre chaos basis, orthonormal with respect to
// the uniform density on [-sqrt(3), sqrt(3)]^M. Multi-indices are listed by
// total degree, lexicographically within each degree, so index 0 is the
// constant mode.
struct ChaosBasis {
  int M = 0;
  int k = 0;
  int Q = 0;
  std::vector<std::vector<int>> indices;

  int find(const std::vector<int>& alpha) const;  // -1 if absent
};

ChaosBasis build_chaos_basis(int M, int k);

// Recurrence coefficient <y psi_{i-1} psi_i> for the scaled Legendre family.
double chaos_recurrence(int i);

// G_m[alpha, beta] = <y_m psi_alpha psi_beta>, one per expansion term, plus
// the identity-coupling convention G_0 = I handled by callers.
std::vector<SpMat> build_coupling_matrices(const ChaosBasis& basis);

// Extreme eigenvalues (min, max) of a symmetric coupling matrix.
std::pair<double, double> coupling_extreme_eigs(const SpMat& G);

}  // namespace sgfe
