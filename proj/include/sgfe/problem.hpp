#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "sgfe/assembly.hpp"
#include "sgfe/chaos.hpp"
#include "sgfe/kle.hpp"
#include "sgfe/kron.hpp"
#include "sgfe/mesh.hpp"
#include "sgfe/precond.hpp"
#include "sgfe/solvers.hpp"
#include "sgfe/types.hpp"

namespace sgfe {

struct ExperimentConfig {
  int level = 4;
  int M = 6;
  int k = 2;
  double sigma = 0.1;
  double nu0 = 1.0;
  double b1 = 1.0;
  double b2 = 1.0;
  std::string solver = "bpcg-num";  // minres | bpcg-ana | bpcg-num | bpcg-ratio
  double ratio = 0.9;               // for bpcg-ratio
  std::string laplacian = "multigrid";  // exact | exact-mean | multigrid
  double tolerance = 1e-6;
  int max_iters = 500;
  std::uint64_t seed = 1234;
  bool pressure_projection = true;
  std::string out_dir = "out";
  int workers = 1;
};

// A fully wired problem: mesh, input expansion, chaos coupling, finite
// element blocks, matrix-free operator, preconditioners and right-hand side.
// Not movable; the operators hold pointers into the owned data.
struct Instance {
  ExperimentConfig cfg;
  Mesh mesh;
  KleExpansion kle;
  ChaosBasis basis;
  std::vector<SpMat> G;
  FeMatrices fem;
  CountersPtr counters;
  SaddleOperator op;
  LaplacianPrecond lap;
  BlockPrecond p1;  // block diagonal
  BlockPrecond p2;  // block triangular, scaling resolved
  HOperator h;
  Vec rhs;

  // spectral window of the velocity reference pencil (scalar level) and the
  // scaling bookkeeping
  double delta_ref = 1.0, Delta_ref = 1.0;
  double a_star = 0.0;  // estimated smallest preconditioned eigenvalue
  double a_used = 0.0;
  std::string scaling_detail;

  Instance() = default;
  Instance(const Instance&) = delete;
  Instance& operator=(const Instance&) = delete;
};

std::unique_ptr<Instance> build_instance(const ExperimentConfig& cfg);

// Smallest eigenvalue of the preconditioned velocity pencil of a freshly
// built instance at the given mesh level (other parameters from cfg).
double estimate_a_star(const ExperimentConfig& cfg, int level);

// Certified spectral window [delta, Delta] of the scalar reference pencil
// for the chosen velocity-block mode at this level. Exact modes are (1, 1)
// by construction; the multigrid window is measured and rounded outward.
std::pair<double, double> reference_window(const ExperimentConfig& cfg);

// Run the configured solver; returns the solution (velocity then pressure).
SolveReport run_solver(Instance& inst, Vec& z);

std::string canonical_solver_name(const std::string& s);

}  // namespace sgfe
