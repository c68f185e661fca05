#include "sgfe/multigrid.hpp"

#include <cmath>
#include <stdexcept>

#include "sgfe/assembly.hpp"
#include "sgfe/mesh.hpp"

namespace sgfe {

namespace {

struct ShapeValues {
  std::array<double, 6> N;
};

ShapeValues p2_values(double l1, double l2) {
  double l0 = 1.0 - l1 - l2;
  return {{{l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
            4 * l0 * l1, 4 * l1 * l2, 4 * l0 * l2}}};
}

void gs_forward(const Eigen::SparseMatrix<double, Eigen::RowMajor>& A,
                const Vec& diag, Vec& z, const Vec& r) {
  const int n = static_cast<int>(A.rows());
  for (int i = 0; i < n; ++i) {
    double s = r[i];
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, i);
         it; ++it) {
      if (it.col() != i) s -= it.value() * z[it.col()];
    }
    z[i] = s / diag[i];
  }
}

void gs_backward(const Eigen::SparseMatrix<double, Eigen::RowMajor>& A,
                 const Vec& diag, Vec& z, const Vec& r) {
  const int n = static_cast<int>(A.rows());
  for (int i = n - 1; i >= 0; --i) {
    double s = r[i];
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, i);
         it; ++it) {
      if (it.col() != i) s -= it.value() * z[it.col()];
    }
    z[i] = s / diag[i];
  }
}

void vcycle_level(const MultigridHierarchy& hier, int lev, const Vec& r,
                  Vec& z) {
  const MgLevel& L = hier.levels[lev];
  if (lev == 0) {
    z = hier.coarse_factor.solve(r);
    return;
  }
  z = Vec::Zero(r.size());
  for (int s = 0; s < 2; ++s) gs_forward(L.A_row, L.diag, z, r);
  Vec res = r - L.A * z;
  Vec rc = L.P.transpose() * res;
  Vec zc;
  vcycle_level(hier, lev - 1, rc, zc);
  z += L.P * zc;
  for (int s = 0; s < 2; ++s) gs_backward(L.A_row, L.diag, z, r);
}

}  // namespace

void MultigridHierarchy::vcycle(const Vec& r, Vec& z) const {
  vcycle_level(*this, static_cast<int>(levels.size()) - 1, r, z);
}

SpMat build_prolongation(int fine_level) {
  if (fine_level < 2) throw std::runtime_error("prolongation needs level >= 2");
  Mesh fine = build_structured_mesh(fine_level);
  Mesh coarse = build_structured_mesh(fine_level - 1);
  const int nc = coarse.n;
  const int np2f = 2 * fine.n + 1;

  std::vector<Triplet> trips;
  trips.reserve(fine.num_interior_p2() * 6);
  for (int jf = 1; jf < np2f - 1; ++jf) {
    for (int ifx = 1; ifx < np2f - 1; ++ifx) {
      const int row = fine.p2_interior_index[jf * np2f + ifx];
      // coarse cell and local coordinates: a coarse cell spans four fine
      // half-steps in each direction
      int cx = std::min(ifx / 4, nc - 1);
      int cy = std::min(jf / 4, nc - 1);
      double lx = (ifx - 4 * cx) / 4.0;
      double ly = (jf - 4 * cy) / 4.0;
      int which;
      double l1, l2;
      if ((cx + cy) % 2 == 0) {
        if (lx >= ly) {
          which = 0;  // (p00, p10, p11)
          l1 = lx - ly;
          l2 = ly;
        } else {
          which = 1;  // (p00, p11, p01)
          l1 = lx;
          l2 = ly - lx;
        }
      } else {
        if (lx + ly <= 1.0) {
          which = 0;  // (p00, p10, p01)
          l1 = lx;
          l2 = ly;
        } else {
          which = 1;  // (p10, p11, p01)
          l2 = 1.0 - lx;
          l1 = lx + ly - 1.0;
        }
      }
      const int t = 2 * (cy * nc + cx) + which;
      const auto sv = p2_values(l1, l2);
      const auto& nodes = coarse.tri_p2[t];
      for (int a = 0; a < 6; ++a) {
        int ci = coarse.p2_interior_index[nodes[a]];
        if (ci < 0) continue;
        if (std::abs(sv.N[a]) < 1e-14) continue;
        trips.emplace_back(row, ci, sv.N[a]);
      }
    }
  }
  SpMat P(fine.num_interior_p2(), coarse.num_interior_p2());
  P.setFromTriplets(trips.begin(), trips.end());
  P.makeCompressed();
  return P;
}

std::shared_ptr<MultigridHierarchy> build_hierarchy(int top_level) {
  if (top_level < 1) throw std::runtime_error("hierarchy needs level >= 1");
  auto hier = std::make_shared<MultigridHierarchy>();
  hier->top_level = top_level;
  auto unit = [](double, double) { return 1.0; };
  for (int lev = 1; lev <= top_level; ++lev) {
    Mesh mesh = build_structured_mesh(lev);
    MgLevel L;
    L.A = interior_scalar_matrix(mesh, assemble_scalar_stiffness(mesh, unit));
    L.A.makeCompressed();
    L.A_row = L.A;
    L.diag = L.A.diagonal();
    if (lev > 1) L.P = build_prolongation(lev);
    hier->levels.push_back(std::move(L));
  }
  Mat coarse_dense = Mat(hier->levels.front().A);
  hier->coarse_factor.compute(coarse_dense);
  if (hier->coarse_factor.info() != Eigen::Success) {
    throw std::runtime_error("coarse factorization failed");
  }
  return hier;
}

}  // namespace sgfe
