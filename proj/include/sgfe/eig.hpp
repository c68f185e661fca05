#pragma once

#include <cstdint>
#include <functional>

#include "sgfe/types.hpp"

namespace sgfe {

using ApplyFn = std::function<void(const Vec&, Vec&)>;

struct EigEstimate {
  double min_eig = 0.0;
  double max_eig = 0.0;
  int iterations = 0;
};

// Extreme eigenvalues of the product operator B*A, where A is symmetric
// positive definite (it doubles as the inner product) and B is symmetric.
// Pass the identity for A to get the ordinary symmetric eigenproblem of B.
// Lanczos with full reorthogonalization, random restarts on breakdown.
EigEstimate lanczos_extreme(int n, const ApplyFn& apply_a,
                            const ApplyFn& apply_b, double tol = 1e-8,
                            int maxit = 160, std::uint64_t seed = 12345);

}  // namespace sgfe
