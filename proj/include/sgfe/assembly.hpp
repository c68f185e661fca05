#pragma once

#include <functional>
#include <vector>

#include "sgfe/mesh.hpp"
#include "sgfe/types.hpp"

namespace sgfe {

using ScalarField = std::function<double(double, double)>;

// Deterministic FE blocks for Taylor-Hood P2/P1 on a structured mesh.
// Velocity dofs are blocked by component (all x, then all y) and reduced to
// interior nodes; boundary values enter through the lifting machinery below.
// The full (unreduced) scalar factors are kept for lifting loads and tests.
struct FeMatrices {
  SpMat K_unit_full;                // scalar unit-coefficient stiffness
  SpMat K_mean_full;                // weighted by the mean viscosity
  std::vector<SpMat> K_fluct_full;  // weighted by sigma*sqrt(lambda_m)*nu_m
  SpMat B_full;                     // N_p x 2*num_p2, negative divergence

  SpMat A;                    // unit vector Laplacian, N_u x N_u (reduced)
  SpMat A0;                   // mean-weighted
  std::vector<SpMat> A_fluct; // fluctuation-weighted, one per KLE term
  SpMat B;                    // N_p x N_u
  SpMat M_p;                  // pressure mass
  Vec D_p;                    // its diagonal

  Vec lifting_u0;             // full-length 2*num_p2 boundary interpolant
  Vec rhs_f;                  // N_u, mean-block momentum load (= -lift_mean)
  Vec rhs_t;                  // N_p, continuity load (= -B_full*lifting)
  std::vector<Vec> lift_fluct;  // N_u each, K_fluct*lifting restricted

  int N_u = 0;
  int N_p = 0;
};

// Scalar P2 stiffness with a spatially varying coefficient evaluated at
// quadrature points, over all (2n+1)^2 nodes. Throws on non-finite
// coefficient values.
SpMat assemble_scalar_stiffness(const Mesh& mesh, const ScalarField& coeff);

// Vector Laplacian on reduced dofs: blkdiag of the interior scalar stiffness.
SpMat assemble_weighted_vector_laplacian(const Mesh& mesh,
                                         const ScalarField& coeff);

// Interior-node submatrix of a full scalar-node operator.
SpMat interior_scalar_matrix(const Mesh& mesh, const SpMat& K_full);

// Negative divergence, -int q div(v). Full and reduced-column versions.
SpMat assemble_divergence_full(const Mesh& mesh);
SpMat assemble_divergence(const Mesh& mesh);

// Pressure P1 mass matrix and its diagonal.
void assemble_pressure_mass(const Mesh& mesh, SpMat& M_p, Vec& D_p);

FeMatrices assemble_taylor_hood(const Mesh& mesh, double nu0,
                                const std::vector<ScalarField>& fluct_fields);

// Boundary data for the driven cavity: lid profile on the top edge, zero
// elsewhere. Returns (and stores in fem) the lifting interpolant, the
// mean-block momentum load, the continuity load, and the per-term
// fluctuation lifting loads used to build the coupled right-hand side.
struct CavityRhs {
  Vec lifting_u0;
  Vec rhs_f;
  Vec rhs_t;
  std::vector<Vec> lift_fluct;
};
using LidProfile = std::function<std::array<double, 2>(double)>;  // of x1

std::array<double, 2> cavity_lid_profile(double x1);  // (1 - 16 x1^4, 0)

CavityRhs build_cavity_rhs(const Mesh& mesh, FeMatrices& fem,
                           const LidProfile& lid);

// Restrict a full scalar-node vector to interior dofs / prolong back.
Vec restrict_to_interior(const Mesh& mesh, const Vec& full_xy);
Vec extend_with_zeros(const Mesh& mesh, const Vec& reduced_xy);

}  // namespace sgfe
