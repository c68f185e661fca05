#include "sgfe/eig.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace sgfe {

namespace {

EigEstimate dense_product_eigs(int n, const ApplyFn& apply_a,
                               const ApplyFn& apply_b) {
  Mat K(n, n);
  Vec e = Vec::Zero(n), t(n), k(n);
  for (int j = 0; j < n; ++j) {
    e.setZero();
    e[j] = 1.0;
    apply_a(e, t);
    apply_b(t, k);
    K.col(j) = k;
  }
  Eigen::EigenSolver<Mat> es(K);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("dense eigensolve failed");
  }
  EigEstimate r;
  r.min_eig = es.eigenvalues().real().minCoeff();
  r.max_eig = es.eigenvalues().real().maxCoeff();
  r.iterations = n;
  return r;
}

std::pair<double, double> tridiag_extremes(const std::vector<double>& alpha,
                                           const std::vector<double>& beta) {
  int m = static_cast<int>(alpha.size());
  Mat T = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    T(i, i) = alpha[i];
    if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(T);
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(m - 1)};
}

}  // namespace

EigEstimate lanczos_extreme(int n, const ApplyFn& apply_a,
                            const ApplyFn& apply_b, double tol, int maxit,
                            std::uint64_t seed) {
  if (n <= 0) throw std::runtime_error("operator dimension must be positive");
  if (n <= 64) return dense_product_eigs(n, apply_a, apply_b);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  maxit = std::min(maxit, n);

  EigEstimate best;
  bool have_any = false;
  for (int attempt = 0; attempt < 5; ++attempt) {
    std::vector<Vec> V;   // Lanczos vectors, A-orthonormal
    std::vector<Vec> AV;  // their images under A
    std::vector<double> alpha, beta;

    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    Vec q(n);
    apply_a(v, q);
    double nrm = std::sqrt(v.dot(q));
    if (!(nrm > 0.0)) continue;
    v /= nrm;
    q /= nrm;

    double prev_min = 0.0, prev_max = 0.0;
    int stable = 0;
    bool broke_down = false;

    for (int j = 0; j < maxit; ++j) {
      V.push_back(v);
      AV.push_back(q);
      Vec w(n);
      apply_b(q, w);  // K v_j with K = B A
      double a = w.dot(q);
      alpha.push_back(a);
      w -= a * v;
      if (j > 0) w -= beta.back() * V[j - 1];
      for (size_t i = 0; i < V.size(); ++i) {
        double c = AV[i].dot(w);
        w -= c * V[i];
      }
      Vec qw(n);
      apply_a(w, qw);
      double b2 = w.dot(qw);
      if (!(b2 > 0.0) || !std::isfinite(b2)) {
        broke_down = true;
        break;
      }
      double b = std::sqrt(b2);
      auto [mn, mx] = tridiag_extremes(alpha, beta);
      if (j >= 11) {
        bool settled = std::abs(mn - prev_min) <= tol * std::max(1.0, std::abs(mn)) &&
                       std::abs(mx - prev_max) <= tol * std::max(1.0, std::abs(mx));
        stable = settled ? stable + 1 : 0;
        if (stable >= 3) {
          EigEstimate r{mn, mx, j + 1};
          return r;
        }
      }
      prev_min = mn;
      prev_max = mx;
      if (b < 1e-13 * std::max(1.0, std::abs(a))) {
        broke_down = true;
        break;
      }
      beta.push_back(b);
      v = w / b;
      q = qw / b;
    }
    if (!alpha.empty()) {
      auto [mn, mx] = tridiag_extremes(alpha, beta);
      EigEstimate r{mn, mx, static_cast<int>(alpha.size())};
      if (!have_any) {
        best = r;
        have_any = true;
      } else {
        best.min_eig = std::min(best.min_eig, r.min_eig);
        best.max_eig = std::max(best.max_eig, r.max_eig);
        best.iterations += r.iterations;
      }
      if (!broke_down) return best;
    }
  }
  if (!have_any) throw std::runtime_error("eigenvalue iteration failed to start");
  return best;
}

}  // namespace sgfe
