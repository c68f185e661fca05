#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <memory>

namespace sgfe {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Operator application counters. Shared between an operator stack and the
// solvers so that iteration costs can be compared in units of actual
// matrix-vector work, not just iteration counts.
struct OpCounters {
  std::uint64_t apply_A = 0;         // full SG-level velocity operator
  std::uint64_t apply_B = 0;         // SG-level divergence
  std::uint64_t apply_Bt = 0;        // SG-level gradient (transpose)
  std::uint64_t fe_matvec = 0;       // individual FE-factor matvecs inside apply_A
  std::uint64_t sg_rightmult = 0;    // panel x G_m products inside apply_A
  std::uint64_t atilde_solve = 0;    // SG-level blockwise Laplacian preconditioner
  std::uint64_t dp_solve = 0;        // SG-level blockwise diagonal pressure solve
  std::uint64_t vcycle = 0;          // scalar V-cycles
  void reset() { *this = OpCounters{}; }
};

using CountersPtr = std::shared_ptr<OpCounters>;

}  // namespace sgfe
