#include "sgfe/assembly.hpp"

#include <cmath>
#include <stdexcept>

#include "sgfe/quadrature.hpp"

namespace sgfe {
namespace {

struct P2Basis {
  std::array<double, 6> val;
  std::array<std::array<double, 2>, 6> grad;  // reference gradients
};

P2Basis p2_basis(double l1, double l2) {
  const double l0 = 1.0 - l1 - l2;
  P2Basis b;
  b.val = {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
           4 * l0 * l1,       4 * l1 * l2,       4 * l0 * l2};
  b.grad[0] = {-(4 * l0 - 1), -(4 * l0 - 1)};
  b.grad[1] = {4 * l1 - 1, 0.0};
  b.grad[2] = {0.0, 4 * l2 - 1};
  b.grad[3] = {4 * (l0 - l1), -4 * l1};
  b.grad[4] = {4 * l2, 4 * l1};
  b.grad[5] = {-4 * l2, 4 * (l0 - l2)};
  return b;
}

struct ElementGeometry {
  double detJ;
  std::array<std::array<double, 2>, 2> invJT;  // J^{-T}
  std::array<double, 2> x0, e1, e2;
};

ElementGeometry element_geometry(const Mesh& mesh, int t) {
  const auto& tr = mesh.tri_p1[t];
  ElementGeometry g;
  g.x0 = mesh.p1_coords[tr[0]];
  const auto& x1 = mesh.p1_coords[tr[1]];
  const auto& x2 = mesh.p1_coords[tr[2]];
  g.e1 = {x1[0] - g.x0[0], x1[1] - g.x0[1]};
  g.e2 = {x2[0] - g.x0[0], x2[1] - g.x0[1]};
  g.detJ = g.e1[0] * g.e2[1] - g.e1[1] * g.e2[0];
  // J = [e1 e2] columns; J^{-T} = 1/det * [[e2y, -e1y], [-e2x, e1x]]
  g.invJT = {{{g.e2[1] / g.detJ, -g.e1[1] / g.detJ},
              {-g.e2[0] / g.detJ, g.e1[0] / g.detJ}}};
  return g;
}

std::array<double, 2> phys_grad(const ElementGeometry& g,
                                const std::array<double, 2>& ref) {
  return {g.invJT[0][0] * ref[0] + g.invJT[0][1] * ref[1],
          g.invJT[1][0] * ref[0] + g.invJT[1][1] * ref[1]};
}

}  // namespace

SpMat assemble_scalar_stiffness(const Mesh& mesh, const ScalarField& coeff) {
  const auto& quad = tri_quadrature_7();
  const int n2 = mesh.num_p2();
  std::vector<Triplet> trip;
  trip.reserve(mesh.tri_p2.size() * 36);
  for (size_t t = 0; t < mesh.tri_p2.size(); ++t) {
    const auto g = element_geometry(mesh, static_cast<int>(t));
    std::array<std::array<double, 6>, 6> ke{};
    for (const auto& q : quad) {
      const auto b = p2_basis(q.l1, q.l2);
      const double xq = g.x0[0] + g.e1[0] * q.l1 + g.e2[0] * q.l2;
      const double yq = g.x0[1] + g.e1[1] * q.l1 + g.e2[1] * q.l2;
      const double c = coeff(xq, yq);
      if (!std::isfinite(c))
        throw std::runtime_error("non-finite coefficient at quadrature point");
      std::array<std::array<double, 2>, 6> gphys;
      for (int a = 0; a < 6; ++a) gphys[a] = phys_grad(g, b.grad[a]);
      const double scale = q.w * g.detJ * c;
      for (int a = 0; a < 6; ++a)
        for (int bb = 0; bb <= a; ++bb)
          ke[a][bb] +=
              scale * (gphys[a][0] * gphys[bb][0] + gphys[a][1] * gphys[bb][1]);
    }
    const auto& nodes = mesh.tri_p2[t];
    for (int a = 0; a < 6; ++a)
      for (int bb = 0; bb < 6; ++bb) {
        const double v = bb <= a ? ke[a][bb] : ke[bb][a];
        trip.emplace_back(nodes[a], nodes[bb], v);
      }
  }
  SpMat K(n2, n2);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

namespace {

SpMat reduce_scalar(const Mesh& mesh, const SpMat& K_full) {
  const int ni = mesh.num_interior_p2();
  std::vector<Triplet> trip;
  trip.reserve(K_full.nonZeros());
  for (int col = 0; col < K_full.outerSize(); ++col) {
    const int jc = mesh.p2_interior_index[col];
    if (jc < 0) continue;
    for (SpMat::InnerIterator it(K_full, col); it; ++it) {
      const int ir = mesh.p2_interior_index[it.row()];
      if (ir < 0) continue;
      trip.emplace_back(ir, jc, it.value());
    }
  }
  SpMat K(ni, ni);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

SpMat blkdiag2(const SpMat& K) {
  const int n = static_cast<int>(K.rows());
  std::vector<Triplet> trip;
  trip.reserve(2 * K.nonZeros());
  for (int col = 0; col < K.outerSize(); ++col)
    for (SpMat::InnerIterator it(K, col); it; ++it) {
      trip.emplace_back(static_cast<int>(it.row()), col, it.value());
      trip.emplace_back(n + static_cast<int>(it.row()), n + col, it.value());
    }
  SpMat A(2 * n, 2 * n);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

}  // namespace

SpMat assemble_weighted_vector_laplacian(const Mesh& mesh,
                                         const ScalarField& coeff) {
  return blkdiag2(reduce_scalar(mesh, assemble_scalar_stiffness(mesh, coeff)));
}

SpMat interior_scalar_matrix(const Mesh& mesh, const SpMat& K_full) {
  return reduce_scalar(mesh, K_full);
}

SpMat assemble_divergence_full(const Mesh& mesh) {
  const auto& quad = tri_quadrature_7();
  const int n2 = mesh.num_p2();
  const int np = mesh.num_p1();
  std::vector<Triplet> trip;
  trip.reserve(mesh.tri_p2.size() * 36);
  for (size_t t = 0; t < mesh.tri_p2.size(); ++t) {
    const auto g = element_geometry(mesh, static_cast<int>(t));
    std::array<std::array<double, 6>, 3> bx{}, by{};
    for (const auto& q : quad) {
      const auto b = p2_basis(q.l1, q.l2);
      const std::array<double, 3> psi{1.0 - q.l1 - q.l2, q.l1, q.l2};
      const double scale = q.w * g.detJ;
      for (int a = 0; a < 6; ++a) {
        const auto gp = phys_grad(g, b.grad[a]);
        for (int p = 0; p < 3; ++p) {
          bx[p][a] -= scale * psi[p] * gp[0];
          by[p][a] -= scale * psi[p] * gp[1];
        }
      }
    }
    const auto& vn = mesh.tri_p2[t];
    const auto& pn = mesh.tri_p1[t];
    for (int p = 0; p < 3; ++p)
      for (int a = 0; a < 6; ++a) {
        trip.emplace_back(pn[p], vn[a], bx[p][a]);
        trip.emplace_back(pn[p], n2 + vn[a], by[p][a]);
      }
  }
  SpMat B(np, 2 * n2);
  B.setFromTriplets(trip.begin(), trip.end());
  return B;
}

SpMat assemble_divergence(const Mesh& mesh) {
  const SpMat Bf = assemble_divergence_full(mesh);
  const int n2 = mesh.num_p2();
  const int ni = mesh.num_interior_p2();
  std::vector<Triplet> trip;
  trip.reserve(Bf.nonZeros());
  for (int col = 0; col < Bf.outerSize(); ++col) {
    const int scalar = col % n2;
    const int comp = col / n2;
    const int jc = mesh.p2_interior_index[scalar];
    if (jc < 0) continue;
    for (SpMat::InnerIterator it(Bf, col); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), comp * ni + jc, it.value());
  }
  SpMat B(mesh.num_p1(), 2 * ni);
  B.setFromTriplets(trip.begin(), trip.end());
  return B;
}

void assemble_pressure_mass(const Mesh& mesh, SpMat& M_p, Vec& D_p) {
  const auto& quad = tri_quadrature_7();
  const int np = mesh.num_p1();
  std::vector<Triplet> trip;
  trip.reserve(mesh.tri_p1.size() * 9);
  for (size_t t = 0; t < mesh.tri_p1.size(); ++t) {
    const auto g = element_geometry(mesh, static_cast<int>(t));
    std::array<std::array<double, 3>, 3> me{};
    for (const auto& q : quad) {
      const std::array<double, 3> psi{1.0 - q.l1 - q.l2, q.l1, q.l2};
      const double scale = q.w * g.detJ;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) me[a][b] += scale * psi[a] * psi[b];
    }
    const auto& pn = mesh.tri_p1[t];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) trip.emplace_back(pn[a], pn[b], me[a][b]);
  }
  M_p.resize(np, np);
  M_p.setFromTriplets(trip.begin(), trip.end());
  D_p = M_p.diagonal();
}

FeMatrices assemble_taylor_hood(const Mesh& mesh, double nu0,
                                const std::vector<ScalarField>& fluct_fields) {
  FeMatrices fem;
  fem.K_unit_full = assemble_scalar_stiffness(mesh, [](double, double) {
    return 1.0;
  });
  fem.K_mean_full =
      assemble_scalar_stiffness(mesh, [nu0](double, double) { return nu0; });
  fem.K_fluct_full.reserve(fluct_fields.size());
  for (const auto& f : fluct_fields)
    fem.K_fluct_full.push_back(assemble_scalar_stiffness(mesh, f));
  fem.B_full = assemble_divergence_full(mesh);
  assemble_pressure_mass(mesh, fem.M_p, fem.D_p);

  const SpMat Ki = reduce_scalar(mesh, fem.K_unit_full);
  const SpMat K0i = reduce_scalar(mesh, fem.K_mean_full);
  fem.A = blkdiag2(Ki);
  fem.A0 = blkdiag2(K0i);
  fem.A_fluct.reserve(fluct_fields.size());
  for (const auto& Km : fem.K_fluct_full)
    fem.A_fluct.push_back(blkdiag2(reduce_scalar(mesh, Km)));
  fem.B = assemble_divergence(mesh);
  fem.N_u = 2 * mesh.num_interior_p2();
  fem.N_p = mesh.num_p1();
  return fem;
}

std::array<double, 2> cavity_lid_profile(double x1) {
  const double x2 = x1 * x1;
  return {1.0 - 16.0 * x2 * x2, 0.0};
}

Vec restrict_to_interior(const Mesh& mesh, const Vec& full_xy) {
  const int n2 = mesh.num_p2();
  const int ni = mesh.num_interior_p2();
  Vec out(2 * ni);
  for (int i = 0; i < ni; ++i) {
    out[i] = full_xy[mesh.interior_p2[i]];
    out[ni + i] = full_xy[n2 + mesh.interior_p2[i]];
  }
  return out;
}

Vec extend_with_zeros(const Mesh& mesh, const Vec& reduced_xy) {
  const int n2 = mesh.num_p2();
  const int ni = mesh.num_interior_p2();
  Vec out = Vec::Zero(2 * n2);
  for (int i = 0; i < ni; ++i) {
    out[mesh.interior_p2[i]] = reduced_xy[i];
    out[n2 + mesh.interior_p2[i]] = reduced_xy[ni + i];
  }
  return out;
}

CavityRhs build_cavity_rhs(const Mesh& mesh, FeMatrices& fem,
                           const LidProfile& lid) {
  const int n2 = mesh.num_p2();
  CavityRhs out;
  out.lifting_u0 = Vec::Zero(2 * n2);
  const int top_row = 2 * mesh.n;
  for (int i = 0; i <= 2 * mesh.n; ++i) {
    const int id = top_row * (2 * mesh.n + 1) + i;
    const auto uv = lid(mesh.p2_coords[id][0]);
    out.lifting_u0[id] = uv[0];
    out.lifting_u0[n2 + id] = uv[1];
  }

  auto scalar_apply_restrict = [&](const SpMat& K) {
    Vec fx = K * out.lifting_u0.head(n2);
    Vec fy = K * out.lifting_u0.tail(n2);
    Vec full(2 * n2);
    full << fx, fy;
    return restrict_to_interior(mesh, full);
  };
  out.rhs_f = -scalar_apply_restrict(fem.K_mean_full);
  out.lift_fluct.reserve(fem.K_fluct_full.size());
  for (const auto& Km : fem.K_fluct_full)
    out.lift_fluct.push_back(scalar_apply_restrict(Km));
  out.rhs_t = -(fem.B_full * out.lifting_u0);

  fem.lifting_u0 = out.lifting_u0;
  fem.rhs_f = out.rhs_f;
  fem.rhs_t = out.rhs_t;
  fem.lift_fluct = out.lift_fluct;
  return out;
}

}  // namespace sgfe
