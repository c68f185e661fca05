#include "sgfe/precond.hpp"

#include <stdexcept>

#include "sgfe/assembly.hpp"
#include "sgfe/mesh.hpp"

namespace sgfe {

LapMode parse_lap_mode(const std::string& name) {
  if (name == "exact" || name == "exact-unit") return LapMode::ExactUnweighted;
  if (name == "exact-mean") return LapMode::ExactMean;
  if (name == "multigrid" || name == "mg") return LapMode::Multigrid;
  throw std::runtime_error("unknown laplacian mode: " + name);
}

std::string lap_mode_name(LapMode mode) {
  switch (mode) {
    case LapMode::ExactUnweighted: return "exact";
    case LapMode::ExactMean: return "exact-mean";
    case LapMode::Multigrid: return "multigrid";
  }
  return "?";
}

LaplacianPrecond LaplacianPrecond::make_exact(LapMode mode,
                                              const FeMatrices& fem,
                                              CountersPtr counters) {
  if (mode == LapMode::Multigrid) {
    throw std::runtime_error("multigrid mode needs the mesh hierarchy");
  }
  LaplacianPrecond p;
  p.mode_ = mode;
  p.counters_ = std::move(counters);
  // the reduced vector Laplacian is block diagonal over components; keep the
  // scalar block and apply it per component
  const SpMat& A2 = (mode == LapMode::ExactUnweighted) ? fem.A : fem.A0;
  int ns = static_cast<int>(A2.rows()) / 2;
  p.ns_ = ns;
  p.mat_ = std::make_shared<SpMat>(A2.topLeftCorner(ns, ns));
  p.mat_->makeCompressed();
  p.factor_ = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
  p.factor_->compute(*p.mat_);
  if (p.factor_->info() != Eigen::Success) {
    throw std::runtime_error("factorization of the reference Laplacian failed");
  }
  return p;
}

LaplacianPrecond LaplacianPrecond::make_multigrid(int level,
                                                  CountersPtr counters) {
  LaplacianPrecond p;
  p.mode_ = LapMode::Multigrid;
  p.counters_ = std::move(counters);
  p.hier_ = build_hierarchy(level);
  p.ns_ = p.hier_->size();
  return p;
}

void LaplacianPrecond::apply_scalar(const Vec& r, Vec& z) const {
  if (mode_ == LapMode::Multigrid) {
    hier_->vcycle(r, z);
    if (counters_) counters_->vcycle += 1;
  } else {
    z = factor_->solve(r);
  }
}

void LaplacianPrecond::apply_velocity(const Vec& r, Vec& z) const {
  if (r.size() != 2 * ns_) {
    throw std::runtime_error("velocity vector has the wrong length");
  }
  z.resize(r.size());
  Vec zx, zy;
  apply_scalar(r.head(ns_), zx);
  apply_scalar(r.tail(ns_), zy);
  z.head(ns_) = zx;
  z.tail(ns_) = zy;
}

const SpMat* LaplacianPrecond::scalar_matrix() const {
  return mat_ ? mat_.get() : nullptr;
}

void BlockPrecond::apply_atilde_blocks(const Vec& r, Vec& z) const {
  int Nu = op->Nu, Q = op->Q;
  if (r.size() != static_cast<Eigen::Index>(Q) * Nu) {
    throw std::runtime_error("velocity vector has the wrong length");
  }
  z.resize(r.size());
  Vec zb;
  for (int beta = 0; beta < Q; ++beta) {
    Vec rb = r.segment(static_cast<Eigen::Index>(beta) * Nu, Nu);
    lap.apply_velocity(rb, zb);
    z.segment(static_cast<Eigen::Index>(beta) * Nu, Nu) = zb;
  }
  if (counters) counters->atilde_solve += 1;
}

void BlockPrecond::apply_schur_inv(const Vec& r, Vec& z) const {
  int Np = op->Np, Q = op->Q;
  if (r.size() != static_cast<Eigen::Index>(Q) * Np) {
    throw std::runtime_error("pressure vector has the wrong length");
  }
  z.resize(r.size());
  for (int beta = 0; beta < Q; ++beta) {
    z.segment(static_cast<Eigen::Index>(beta) * Np, Np) =
        r.segment(static_cast<Eigen::Index>(beta) * Np, Np).cwiseQuotient(Dp);
  }
  if (counters) counters->dp_solve += 1;
}

void BlockPrecond::apply_diag_inv(const Vec& r, Vec& z) const {
  int nv = op->velocity_size(), np = op->pressure_size();
  if (r.size() != nv + np) {
    throw std::runtime_error("saddle vector has the wrong length");
  }
  z.resize(r.size());
  Vec zu, zp;
  apply_atilde_blocks(r.head(nv), zu);
  apply_schur_inv(r.tail(np), zp);
  z.head(nv) = zu;
  z.tail(np) = zp;
}

void BlockPrecond::apply_tri_inv(const Vec& r, Vec& z) const {
  int nv = op->velocity_size(), np = op->pressure_size();
  if (r.size() != nv + np) {
    throw std::runtime_error("saddle vector has the wrong length");
  }
  // [ a*At  0 ] [zu]   [ru]        zu = (a*At)^{-1} ru
  // [ B    -S ] [zp] = [rp]  =>    zp = S^{-1} (B zu - rp)
  z.resize(r.size());
  Vec zu, bzu, zp;
  apply_atilde_blocks(r.head(nv), zu);
  zu /= scaling;
  op->apply_B(zu, bzu);
  apply_schur_inv(bzu - r.tail(np), zp);
  z.head(nv) = zu;
  z.tail(np) = zp;
}

BlockPrecond make_block_precond(const SaddleOperator& op, LaplacianPrecond lap,
                                const Vec& Dp, double scaling,
                                CountersPtr counters) {
  BlockPrecond p;
  p.op = &op;
  p.lap = std::move(lap);
  p.Dp = Dp;
  p.scaling = scaling;
  p.counters = std::move(counters);
  return p;
}

void HOperator::apply(const Vec& x, Vec& out) const {
  if (!can_apply()) {
    throw std::runtime_error(
        "inner product operator needs an explicit reference matrix");
  }
  int nv = op->velocity_size(), np = op->pressure_size();
  if (x.size() != nv + np) {
    throw std::runtime_error("saddle vector has the wrong length");
  }
  out.resize(x.size());
  Vec au;
  op->apply_A(x.head(nv), au);
  // subtract a * (I (x) blkdiag(At, At)) x
  int Nu = op->Nu, Q = op->Q;
  int ns = Nu / 2;
  const SpMat& At = *atilde_scalar;
  for (int beta = 0; beta < Q; ++beta) {
    auto xb = x.segment(static_cast<Eigen::Index>(beta) * Nu, Nu);
    au.segment(static_cast<Eigen::Index>(beta) * Nu, ns) -=
        scaling * (At * xb.head(ns));
    au.segment(static_cast<Eigen::Index>(beta) * Nu + ns, ns) -=
        scaling * (At * xb.tail(ns));
  }
  out.head(nv) = au;
  int Np = op->Np;
  for (int beta = 0; beta < Q; ++beta) {
    out.segment(nv + static_cast<Eigen::Index>(beta) * Np, Np) =
        x.segment(nv + static_cast<Eigen::Index>(beta) * Np, Np)
            .cwiseProduct(Dp);
  }
}

HOperator make_h_operator(const SaddleOperator& op, const LaplacianPrecond& lap,
                          const Vec& Dp, double scaling) {
  HOperator h;
  h.op = &op;
  h.atilde_scalar = lap.scalar_matrix();
  h.Dp = Dp;
  h.scaling = scaling;
  return h;
}

}  // namespace sgfe
