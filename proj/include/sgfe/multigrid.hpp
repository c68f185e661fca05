#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sgfe/types.hpp"

namespace sgfe {

// Geometric hierarchy for the scalar interior Laplacian on the structured
// criss-cross family. The alternating-diagonal pattern nests under uniform
// refinement, so spaces are nested and the directly assembled coarse matrices
// coincide with their Galerkin projections.
struct MgLevel {
  SpMat A;                                        // interior scalar stiffness
  Eigen::SparseMatrix<double, Eigen::RowMajor> A_row;  // row access for sweeps
  SpMat P;  // prolongation from the next coarser level (empty on coarsest)
  Vec diag;
};

struct MultigridHierarchy {
  int top_level = 0;
  std::vector<MgLevel> levels;  // levels[0] is mesh level 1 (coarsest)
  Eigen::LLT<Mat> coarse_factor;

  // One symmetric V-cycle with zero initial guess: two forward Gauss-Seidel
  // sweeps down, direct solve on the coarsest level, two backward sweeps up.
  void vcycle(const Vec& r, Vec& z) const;
  int size() const { return static_cast<int>(levels.back().A.rows()); }
};

std::shared_ptr<MultigridHierarchy> build_hierarchy(int top_level);

// Prolongation from mesh level (top-1) to top, restricted to interior nodes
// of the scalar P2 space. Exposed for the Galerkin consistency check.
SpMat build_prolongation(int fine_level);

}  // namespace sgfe
