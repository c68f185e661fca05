#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sgfe/kron.hpp"
#include "sgfe/precond.hpp"
#include "sgfe/types.hpp"

namespace sgfe {

struct SolveConfig {
  double tolerance = 1e-6;
  int max_iters = 500;
  bool pressure_projection = true;
  bool record_history = true;
  // Keep iterating when the nonstandard inner product turns indefinite
  // instead of failing hard. Used by the scaling ratio study, where
  // deliberately oversized scalings are part of the experiment.
  bool permissive_metric = false;
};

struct SolveReport {
  std::string solver;
  bool converged = false;
  int iterations = 0;
  double final_relres = 0.0;
  double scaling = 0.0;  // the "a" factor, when one is used
  double wall_seconds = 0.0;
  bool metric_positivity_lost = false;  // permissive runs only
  std::vector<double> residual_history;         // true relative residuals
  std::vector<double> precond_residual_history; // recurrence estimate
  std::map<std::string, std::uint64_t> op_counts;  // deltas over the solve
};

using IterObserver = std::function<void(int iter, const Vec& z)>;

// Preconditioned minimum residual iteration on the saddle system with the
// block diagonal preconditioner. Stops on the recomputed true residual.
SolveReport minres_solve(const SaddleOperator& op, const BlockPrecond& p1,
                         const Vec& b, const SolveConfig& cfg, Vec& z,
                         const IterObserver& observer = {});

// Conjugate gradients in the nonstandard inner product induced by
// H = diag(A_blk - a*Atilde_blk, S), applied to the block triangular
// preconditioned system. Costs one extra divergence apply per iteration
// compared to the minimum residual iteration and never applies H itself.
// Throws if the inner product loses positivity (scaling too large).
SolveReport bpcg_solve(const SaddleOperator& op, const BlockPrecond& p2,
                       const Vec& b, const SolveConfig& cfg, Vec& z,
                       const IterObserver& observer = {});

// Generic preconditioned minimum residual iteration used by the tests.
SolveReport minres_generic(int n, const std::function<void(const Vec&, Vec&)>& apply_c,
                           const std::function<void(const Vec&, Vec&)>& apply_pinv,
                           const Vec& b, const SolveConfig& cfg, Vec& z,
                           const std::function<void(Vec&)>& project = {},
                           const IterObserver& observer = {});

}  // namespace sgfe
