#include "sgfe/kle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace sgfe {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Bisection + Newton polish on a bracketed root. f must change sign.
template <typename F, typename DF>
double solve_bracketed(F f, DF df, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (!(flo * fhi < 0.0)) {
    throw std::runtime_error("eigenfrequency bracket does not change sign");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if (flo * fm < 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
    if (hi - lo < 1e-13 * (1.0 + hi)) break;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 8; ++it) {
    double fx = f(x);
    double d = df(x);
    if (d == 0.0) break;
    double step = fx / d;
    double xn = x - step;
    if (xn <= lo || xn >= hi) break;  // keep inside bracket
    x = xn;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
  }
  return x;
}

}  // namespace

double Pair1D::eval(double x) const {
  double raw = even ? std::cos(omega * x) : std::sin(omega * x);
  return raw * inv_norm;
}

std::vector<Pair1D> solve_1d_eigenpairs(double corr_length, double half_width,
                                        int count) {
  if (!(corr_length > 0.0) || !(half_width > 0.0)) {
    throw std::runtime_error("correlation length and half width must be positive");
  }
  if (count <= 0) return {};
  const double a = half_width;
  const double c = 1.0 / corr_length;
  const double ca = c * a;

  std::vector<Pair1D> out;
  out.reserve(count);
  // Roots interleave: one cosine root in (n*pi, n*pi + pi/2), one sine root in
  // (n*pi + pi/2, (n+1)*pi), for n = 0, 1, 2, ...  Work in theta = omega * a.
  int produced = 0;
  for (int n = 0; produced < count; ++n) {
    {
      // theta * tan(theta) = c*a
      auto f = [&](double t) { return t * std::tan(t) - ca; };
      auto df = [&](double t) {
        double ct = std::cos(t);
        return std::tan(t) + t / (ct * ct);
      };
      const double eps = 1e-9;
      double theta = solve_bracketed(f, df, n * kPi + eps,
                                     n * kPi + 0.5 * kPi - eps);
      Pair1D p;
      p.even = true;
      p.omega = theta / a;
      p.lambda = 2.0 * c / (p.omega * p.omega + c * c);
      double norm2 = a + std::sin(2.0 * p.omega * a) / (2.0 * p.omega);
      p.inv_norm = 1.0 / std::sqrt(norm2);
      p.sup = p.inv_norm;  // cosine attains 1 at x = 0
      out.push_back(p);
      if (++produced == count) break;
    }
    {
      // tan(theta) = -theta / (c*a)
      auto f = [&](double t) { return std::tan(t) + t / ca; };
      auto df = [&](double t) {
        double ct = std::cos(t);
        return 1.0 / (ct * ct) + 1.0 / ca;
      };
      const double eps = 1e-9;
      double theta = solve_bracketed(f, df, n * kPi + 0.5 * kPi + eps,
                                     (n + 1) * kPi - eps);
      Pair1D p;
      p.even = false;
      p.omega = theta / a;
      p.lambda = 2.0 * c / (p.omega * p.omega + c * c);
      double norm2 = a - std::sin(2.0 * p.omega * a) / (2.0 * p.omega);
      p.inv_norm = 1.0 / std::sqrt(norm2);
      // sin(omega*x) attains 1 inside [-a, a] iff omega*a >= pi/2, which holds
      // for every sine-family root; keep the general expression anyway.
      double peak = (theta >= 0.5 * kPi) ? 1.0 : std::sin(theta);
      p.sup = peak * p.inv_norm;
      out.push_back(p);
      if (++produced == count) break;
    }
  }
  return out;
}

double KleExpansion::mode(int m, double x, double y) const {
  const KleTerm& t = terms.at(m);
  return pool1[t.i].eval(x) * pool2[t.j].eval(y);
}

double KleExpansion::evaluate(double x, double y, const Vec& yvec) const {
  double v = nu0;
  int mm = std::min<int>(M, static_cast<int>(yvec.size()));
  for (int m = 0; m < mm; ++m) {
    v += sigma * std::sqrt(terms[m].lambda) * mode(m, x, y) * yvec[m];
  }
  return v;
}

KleExpansion build_kle_2d(double b1, double b2, int M, double nu0,
                          double sigma) {
  if (M < 0) throw std::runtime_error("number of expansion terms must be >= 0");
  if (!(nu0 > 0.0)) throw std::runtime_error("mean viscosity must be positive");
  if (sigma < 0.0) throw std::runtime_error("sigma must be >= 0");
  KleExpansion kle;
  kle.nu0 = nu0;
  kle.sigma = sigma;
  kle.b1 = b1;
  kle.b2 = b2;
  kle.M = M;
  const double a = kle.half_width;

  if (M > 0) {
    int pool = static_cast<int>(std::ceil(std::sqrt(2.0 * M))) + 2;
    for (int attempt = 0; attempt < 8; ++attempt) {
      // one spare eigenvalue per direction to certify the truncation
      auto p1 = solve_1d_eigenpairs(b1, a, pool + 1);
      auto p2 = solve_1d_eigenpairs(b2, a, pool + 1);
      std::vector<std::tuple<double, int, int>> prods;
      prods.reserve(pool * pool);
      for (int i = 0; i < pool; ++i)
        for (int j = 0; j < pool; ++j)
          prods.emplace_back(p1[i].lambda * p2[j].lambda, i, j);
      std::sort(prods.begin(), prods.end(), [](const auto& l, const auto& r) {
        if (std::get<0>(l) != std::get<0>(r))
          return std::get<0>(l) > std::get<0>(r);
        if (std::get<1>(l) != std::get<1>(r))
          return std::get<1>(l) < std::get<1>(r);
        return std::get<2>(l) < std::get<2>(r);
      });
      if (static_cast<int>(prods.size()) < M) {
        pool += 2;
        continue;
      }
      double smallest_kept = std::get<0>(prods[M - 1]);
      double best_unseen = std::max(p1[0].lambda * p2[pool].lambda,
                                    p1[pool].lambda * p2[0].lambda);
      if (best_unseen > smallest_kept && attempt < 7) {
        pool += 2;
        continue;
      }
      kle.pool1.assign(p1.begin(), p1.begin() + pool);
      kle.pool2.assign(p2.begin(), p2.begin() + pool);
      kle.terms.clear();
      for (int m = 0; m < M; ++m) {
        KleTerm t;
        t.lambda = std::get<0>(prods[m]);
        t.i = std::get<1>(prods[m]);
        t.j = std::get<2>(prods[m]);
        t.chi = std::sqrt(t.lambda) * kle.pool1[t.i].sup * kle.pool2[t.j].sup;
        kle.terms.push_back(t);
      }
      break;
    }
    if (static_cast<int>(kle.terms.size()) != M) {
      throw std::runtime_error("could not certify the leading eigenvalue products");
    }
  }

  // grid cross-check of the sup norms
  const int g = 201;
  for (auto& t : kle.terms) {
    double m1 = 0.0, m2 = 0.0;
    for (int s = 0; s < g; ++s) {
      double x = -a + 2.0 * a * s / (g - 1);
      m1 = std::max(m1, std::abs(kle.pool1[t.i].eval(x)));
      m2 = std::max(m2, std::abs(kle.pool2[t.j].eval(x)));
    }
    t.chi_grid = std::sqrt(t.lambda) * m1 * m2;
  }

  kle.chi_total = 0.0;
  kle.chi_grid_total = 0.0;
  double lam_sum = 0.0;
  for (const auto& t : kle.terms) {
    kle.chi_total += t.chi;
    kle.chi_grid_total += t.chi_grid;
    lam_sum += t.lambda;
  }
  const double sqrt3 = std::sqrt(3.0);
  kle.nu_lower = nu0 - sqrt3 * sigma * kle.chi_total;
  kle.nu_upper = nu0 + sqrt3 * sigma * kle.chi_total;
  kle.is_positive = kle.nu_lower > 0.0;
  kle.sigma_star =
      kle.chi_total > 0.0 ? nu0 / (sqrt3 * kle.chi_total)
                          : std::numeric_limits<double>::infinity();
  // trace of the 2D covariance operator is (2a)^2
  kle.variance_capture = lam_sum / (4.0 * a * a);
  return kle;
}

Positivity check_positivity(const KleExpansion& kle) {
  Positivity p;
  p.nu_lower = kle.nu_lower;
  p.nu_upper = kle.nu_upper;
  p.is_positive = kle.is_positive;
  return p;
}

}  // namespace sgfe
