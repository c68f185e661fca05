#include "sgfe/chaos.hpp"

#include <Eigen/Dense>

#include <map>
#include <stdexcept>

#include "sgfe/eig.hpp"

namespace sgfe {

namespace {

void enumerate_degree(int M, int deg, int pos, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
  if (pos == M - 1) {
    cur[pos] = deg;
    out.push_back(cur);
    return;
  }
  for (int d = 0; d <= deg; ++d) {
    cur[pos] = d;
    enumerate_degree(M, deg - d, pos + 1, cur, out);
  }
}

}  // namespace

int ChaosBasis::find(const std::vector<int>& alpha) const {
  for (int q = 0; q < Q; ++q)
    if (indices[q] == alpha) return q;
  return -1;
}

ChaosBasis build_chaos_basis(int M, int k) {
  if (M < 1) throw std::runtime_error("chaos basis needs at least one variable");
  if (k < 0) throw std::runtime_error("polynomial degree must be >= 0");
  ChaosBasis b;
  b.M = M;
  b.k = k;
  std::vector<int> cur(M, 0);
  for (int deg = 0; deg <= k; ++deg) {
    enumerate_degree(M, deg, 0, cur, b.indices);
  }
  b.Q = static_cast<int>(b.indices.size());
  return b;
}

double chaos_recurrence(int i) {
  // <y psi_{i-1} psi_i> for the orthonormal Legendre family on
  // [-sqrt(3), sqrt(3)] with uniform weight; i >= 1.
  if (i < 1) throw std::runtime_error("recurrence index must be >= 1");
  double di = static_cast<double>(i);
  return std::sqrt(3.0) * di / std::sqrt((2.0 * di - 1.0) * (2.0 * di + 1.0));
}

std::vector<SpMat> build_coupling_matrices(const ChaosBasis& basis) {
  std::map<std::vector<int>, int> lookup;
  for (int q = 0; q < basis.Q; ++q) lookup[basis.indices[q]] = q;

  std::vector<SpMat> G(basis.M);
  for (int m = 0; m < basis.M; ++m) {
    std::vector<Triplet> trips;
    for (int q = 0; q < basis.Q; ++q) {
      const auto& alpha = basis.indices[q];
      if (alpha[m] == 0) continue;
      std::vector<int> beta = alpha;
      beta[m] -= 1;
      auto it = lookup.find(beta);
      if (it == lookup.end()) {
        throw std::runtime_error("total-degree basis is not downward closed");
      }
      double v = chaos_recurrence(alpha[m]);
      trips.emplace_back(q, it->second, v);
      trips.emplace_back(it->second, q, v);
    }
    SpMat g(basis.Q, basis.Q);
    g.setFromTriplets(trips.begin(), trips.end());
    g.makeCompressed();
    G[m] = std::move(g);
  }
  return G;
}

std::pair<double, double> coupling_extreme_eigs(const SpMat& G) {
  if (G.rows() > 2000) {
    int n = static_cast<int>(G.rows());
    ApplyFn ident = [](const Vec& x, Vec& y) { y = x; };
    ApplyFn mult = [&G](const Vec& x, Vec& y) { y = G * x; };
    EigEstimate e = lanczos_extreme(n, ident, mult, 1e-10, 400);
    return {e.min_eig, e.max_eig};
  }
  Mat dense = Mat(G);
  Eigen::SelfAdjointEigenSolver<Mat> es(dense);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigensolve on coupling matrix failed");
  }
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

}  // namespace sgfe
