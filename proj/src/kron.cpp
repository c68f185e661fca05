#include "sgfe/kron.hpp"

#include <cmath>
#include <stdexcept>

namespace sgfe {

namespace {

using CMap = Eigen::Map<const Mat>;
using MMap = Eigen::Map<Mat>;

void bump(const CountersPtr& c, std::uint64_t OpCounters::*field,
          std::uint64_t by = 1) {
  if (c) (*c).*field += by;
}

}  // namespace

void SaddleOperator::apply_A(const Vec& u, Vec& out) const {
  if (u.size() != velocity_size()) {
    throw std::runtime_error("velocity vector has the wrong length");
  }
  out.resize(u.size());
  CMap U(u.data(), Nu, Q);
  MMap OUT(out.data(), Nu, Q);
  OUT.noalias() = fem->A0 * U;
  bump(counters, &OpCounters::fe_matvec, Q);
  Mat W(Nu, Q);
  const auto& Gs = *G;
  for (size_t m = 0; m < Gs.size(); ++m) {
    W.noalias() = fem->A_fluct[m] * U;
    bump(counters, &OpCounters::fe_matvec, Q);
    OUT.noalias() += W * Gs[m];
    bump(counters, &OpCounters::sg_rightmult, 1);
  }
  bump(counters, &OpCounters::apply_A);
}

void SaddleOperator::apply_B(const Vec& u, Vec& out) const {
  if (u.size() != velocity_size()) {
    throw std::runtime_error("velocity vector has the wrong length");
  }
  out.resize(pressure_size());
  CMap U(u.data(), Nu, Q);
  MMap OUT(out.data(), Np, Q);
  OUT.noalias() = fem->B * U;
  bump(counters, &OpCounters::fe_matvec, Q);
  bump(counters, &OpCounters::apply_B);
}

void SaddleOperator::apply_Bt(const Vec& p, Vec& out) const {
  if (p.size() != pressure_size()) {
    throw std::runtime_error("pressure vector has the wrong length");
  }
  out.resize(velocity_size());
  CMap P(p.data(), Np, Q);
  MMap OUT(out.data(), Nu, Q);
  OUT.noalias() = fem->B.transpose() * P;
  bump(counters, &OpCounters::fe_matvec, Q);
  bump(counters, &OpCounters::apply_Bt);
}

void SaddleOperator::apply(const Vec& x, Vec& out) const {
  if (x.size() != total_size()) {
    throw std::runtime_error("saddle vector has the wrong length");
  }
  int nv = velocity_size();
  Vec u = x.head(nv);
  Vec p = x.tail(pressure_size());
  Vec au, btp, bu;
  apply_A(u, au);
  apply_Bt(p, btp);
  apply_B(u, bu);
  out.resize(x.size());
  out.head(nv) = au + btp;
  out.tail(pressure_size()) = bu;
}

SaddleOperator make_saddle_operator(const FeMatrices& fem,
                                    const std::vector<SpMat>& G, int Q,
                                    CountersPtr counters) {
  SaddleOperator op;
  op.fem = &fem;
  op.G = &G;
  op.Q = Q;
  op.Nu = fem.N_u;
  op.Np = fem.N_p;
  op.counters = std::move(counters);
  if (static_cast<int>(fem.A_fluct.size()) != static_cast<int>(G.size())) {
    throw std::runtime_error("fluctuation matrix count does not match coupling count");
  }
  return op;
}

Vec build_saddle_rhs(const FeMatrices& fem, const std::vector<SpMat>& G, int Q) {
  int Nu = fem.N_u, Np = fem.N_p;
  Vec b = Vec::Zero(static_cast<Eigen::Index>(Q) * (Nu + Np));
  // mean mode carries the deterministic forcing
  b.segment(0, Nu) = fem.rhs_f;
  b.segment(static_cast<Eigen::Index>(Q) * Nu, Np) = fem.rhs_t;
  // fluctuation lift couples mode 0 into its neighbours through column 0
  for (size_t m = 0; m < G.size(); ++m) {
    for (SpMat::InnerIterator it(G[m], 0); it; ++it) {
      int beta = static_cast<int>(it.row());
      b.segment(static_cast<Eigen::Index>(beta) * Nu, Nu) -=
          it.value() * fem.lift_fluct[m];
    }
  }
  return b;
}

DenseBlocks assemble_dense_blocks(const SaddleOperator& op, int max_dim) {
  int n = op.total_size();
  if (n > max_dim) {
    throw std::runtime_error("instance too large for dense assembly");
  }
  DenseBlocks d;
  int nv = op.velocity_size(), np = op.pressure_size();
  d.A = Mat::Zero(nv, nv);
  d.B = Mat::Zero(np, nv);
  Vec e = Vec::Zero(nv), col;
  for (int j = 0; j < nv; ++j) {
    e.setZero();
    e[j] = 1.0;
    op.apply_A(e, col);
    d.A.col(j) = col;
    op.apply_B(e, col);
    d.B.col(j) = col;
  }
  d.C = Mat::Zero(n, n);
  d.C.topLeftCorner(nv, nv) = d.A;
  d.C.bottomLeftCorner(np, nv) = d.B;
  d.C.topRightCorner(nv, np) = d.B.transpose();
  return d;
}

Mat pressure_kernel_basis(int Q, int Np) {
  Mat K = Mat::Zero(static_cast<Eigen::Index>(Q) * Np, Q);
  double v = 1.0 / std::sqrt(static_cast<double>(Np));
  for (int beta = 0; beta < Q; ++beta) {
    K.block(static_cast<Eigen::Index>(beta) * Np, beta, Np, 1).setConstant(v);
  }
  return K;
}

void project_pressure_blocks(Vec& p, int Q, int Np) {
  for (int beta = 0; beta < Q; ++beta) {
    auto seg = p.segment(static_cast<Eigen::Index>(beta) * Np, Np);
    seg.array() -= seg.mean();
  }
}

}  // namespace sgfe
