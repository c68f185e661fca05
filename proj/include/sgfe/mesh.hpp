#pragma once

#include <array>
#include <vector>

#include "sgfe/types.hpp"

namespace sgfe {

// Uniform triangulation of D = [-0.5, 0.5]^2 with n = 2^level cells per side,
// each cell split along a diagonal whose direction alternates with cell
// parity. P1 (pressure) nodes live on the (n+1)^2 vertex grid, P2 scalar
// (velocity component) nodes on the (2n+1)^2 half-step grid. Refining a mesh
// by one level keeps every coarse element a union of four fine elements, so
// the P2 spaces are nested between levels.
struct Mesh {
  int level = 0;
  int n = 0;        // cells per side
  double h = 0.0;   // cell width

  std::vector<std::array<double, 2>> p1_coords;
  std::vector<std::array<double, 2>> p2_coords;
  std::vector<std::array<int, 3>> tri_p1;  // vertex indices, CCW
  std::vector<std::array<int, 6>> tri_p2;  // v0 v1 v2 m01 m12 m02
  std::vector<bool> p1_boundary;
  std::vector<bool> p2_boundary;

  // interior scalar P2 dof numbering (Dirichlet dofs removed)
  std::vector<int> p2_interior_index;  // -1 on boundary
  std::vector<int> interior_p2;        // inverse map

  int num_p1() const { return static_cast<int>(p1_coords.size()); }
  int num_p2() const { return static_cast<int>(p2_coords.size()); }
  int num_interior_p2() const { return static_cast<int>(interior_p2.size()); }
  double triangle_area(int t) const;
};

Mesh build_structured_mesh(int level);

}  // namespace sgfe
