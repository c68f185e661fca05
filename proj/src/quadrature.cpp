#include "sgfe/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace sgfe {

const std::array<TriQuadPoint, 7>& tri_quadrature_7() {
  static const std::array<TriQuadPoint, 7> rule = [] {
    std::array<TriQuadPoint, 7> r{};
    const double s15 = std::sqrt(15.0);
    const double w0 = 9.0 / 80.0;
    const double wa = (155.0 + s15) / 2400.0;
    const double wb = (155.0 - s15) / 2400.0;
    const double aa = (6.0 + s15) / 21.0;   // larger pair coordinate
    const double ab = (9.0 - 2.0 * s15) / 21.0;
    const double ba = (6.0 - s15) / 21.0;
    const double bb = (9.0 + 2.0 * s15) / 21.0;
    int k = 0;
    r[k++] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, w0};
    r[k++] = {ab, aa, aa, wa};
    r[k++] = {aa, ab, aa, wa};
    r[k++] = {aa, aa, ab, wa};
    r[k++] = {bb, ba, ba, wb};
    r[k++] = {ba, bb, ba, wb};
    r[k++] = {ba, ba, bb, wb};
    return r;
  }();
  return rule;
}

void gauss_legendre(int order, double a, double b, std::vector<double>& x,
                    std::vector<double>& w) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order < 1");
  x.assign(order, 0.0);
  w.assign(order, 0.0);
  const int mid = (order + 1) / 2;
  for (int i = 0; i < mid; ++i) {
    // Chebyshev initial guess, Newton on P_n
    double z = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = order * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const double xm = 0.5 * (b + a);
    const double xl = 0.5 * (b - a);
    x[i] = xm - xl * z;
    x[order - 1 - i] = xm + xl * z;
    w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    w[order - 1 - i] = w[i];
  }
}

}  // namespace sgfe
