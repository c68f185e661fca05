#pragma once

#include <array>
#include <vector>

namespace sgfe {

// Symmetric 7-point triangle rule, exact to degree 5. Points in barycentric
// coordinates (l0, l1, l2), weights scaled so they sum to the reference
// triangle area 1/2.
struct TriQuadPoint {
  double l0, l1, l2, w;
};
const std::array<TriQuadPoint, 7>& tri_quadrature_7();

// Gauss-Legendre nodes/weights on [a, b], any order (Newton on the Legendre
// recurrence; machine-accurate for the orders used here).
void gauss_legendre(int order, double a, double b, std::vector<double>& x,
                    std::vector<double>& w);

}  // namespace sgfe
