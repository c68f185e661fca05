#include "sgfe/solvers.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace sgfe {

namespace {

using Clock = std::chrono::steady_clock;

std::map<std::string, std::uint64_t> snapshot(const CountersPtr& c) {
  std::map<std::string, std::uint64_t> m;
  if (!c) return m;
  m["apply_A"] = c->apply_A;
  m["apply_B"] = c->apply_B;
  m["apply_Bt"] = c->apply_Bt;
  m["fe_matvec"] = c->fe_matvec;
  m["sg_rightmult"] = c->sg_rightmult;
  m["atilde_solve"] = c->atilde_solve;
  m["dp_solve"] = c->dp_solve;
  m["vcycle"] = c->vcycle;
  return m;
}

std::map<std::string, std::uint64_t> diff(
    const std::map<std::string, std::uint64_t>& before,
    const std::map<std::string, std::uint64_t>& after) {
  std::map<std::string, std::uint64_t> d;
  for (const auto& [k, v] : after) {
    auto it = before.find(k);
    d[k] = v - (it == before.end() ? 0 : it->second);
  }
  return d;
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::runtime_error(std::string("non-finite value in ") + what);
  }
}

}  // namespace

SolveReport minres_generic(int n,
                           const std::function<void(const Vec&, Vec&)>& apply_c,
                           const std::function<void(const Vec&, Vec&)>& apply_pinv,
                           const Vec& b, const SolveConfig& cfg, Vec& z,
                           const std::function<void(Vec&)>& project,
                           const IterObserver& observer) {
  SolveReport rep;
  rep.solver = "minres";
  auto t0 = Clock::now();

  Vec bb = b;
  if (project) project(bb);
  const double bnorm = bb.norm();
  z = Vec::Zero(n);
  if (bnorm == 0.0) {
    rep.converged = true;
    rep.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return rep;
  }

  Vec r1 = bb;
  Vec y(n);
  apply_pinv(r1, y);
  double beta1 = r1.dot(y);
  if (beta1 < 0.0) {
    throw std::runtime_error("preconditioner is not positive definite");
  }
  beta1 = std::sqrt(beta1);

  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0;
  double phibar = beta1, cs = -1.0, sn = 0.0;
  Vec r2 = r1;
  Vec w = Vec::Zero(n), w2 = Vec::Zero(n), w1(n), v(n), ytmp(n), rtrue(n), cz(n);

  for (int itn = 1; itn <= cfg.max_iters; ++itn) {
    double s = 1.0 / beta;
    v = s * y;
    apply_c(v, ytmp);
    if (itn >= 2) ytmp -= (beta / oldb) * r1;
    double alfa = v.dot(ytmp);
    ytmp -= (alfa / beta) * r2;
    r1 = r2;
    r2 = ytmp;
    if (project) project(r2);
    apply_pinv(r2, y);
    oldb = beta;
    double beta2 = r2.dot(y);
    if (beta2 < 0.0) {
      throw std::runtime_error("preconditioner is not positive definite");
    }
    beta = std::sqrt(beta2);

    double oldeps = epsln;
    double delta = cs * dbar + sn * alfa;
    double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::sqrt(gbar * gbar + beta * beta);
    gamma = std::max(gamma, 1e-300);
    cs = gbar / gamma;
    sn = beta / gamma;
    double phi = cs * phibar;
    phibar = sn * phibar;
    check_finite(phibar, "residual recurrence");

    w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    z += phi * w;

    // stop on the recomputed true residual
    apply_c(z, cz);
    rtrue = bb - cz;
    if (project) project(rtrue);
    double relres = rtrue.norm() / bnorm;
    check_finite(relres, "residual norm");
    if (cfg.record_history) {
      rep.residual_history.push_back(relres);
      rep.precond_residual_history.push_back(phibar);
    }
    rep.iterations = itn;
    rep.final_relres = relres;
    if (observer) observer(itn, z);
    if (relres <= cfg.tolerance) {
      rep.converged = true;
      break;
    }
    if (beta < 1e-300) break;  // exact subspace reached
  }
  if (project) project(z);
  rep.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

SolveReport minres_solve(const SaddleOperator& op, const BlockPrecond& p1,
                         const Vec& b, const SolveConfig& cfg, Vec& z,
                         const IterObserver& observer) {
  auto before = snapshot(op.counters);
  int nv = op.velocity_size(), np = op.pressure_size();
  auto apply_c = [&op](const Vec& x, Vec& out) { op.apply(x, out); };
  auto apply_pinv = [&p1](const Vec& x, Vec& out) { p1.apply_diag_inv(x, out); };
  std::function<void(Vec&)> project;
  if (cfg.pressure_projection) {
    project = [&op, nv](Vec& x) {
      Vec p = x.tail(op.pressure_size());
      project_pressure_blocks(p, op.Q, op.Np);
      x.tail(op.pressure_size()) = p;
      (void)nv;
    };
  }
  SolveReport rep = minres_generic(nv + np, apply_c, apply_pinv, b, cfg, z,
                                   project, observer);
  rep.op_counts = diff(before, snapshot(op.counters));
  return rep;
}

SolveReport bpcg_solve(const SaddleOperator& op, const BlockPrecond& p2,
                       const Vec& b, const SolveConfig& cfg, Vec& z,
                       const IterObserver& observer) {
  SolveReport rep;
  rep.solver = "bpcg";
  rep.scaling = p2.scaling;
  auto before = snapshot(op.counters);
  auto t0 = Clock::now();

  const int nv = op.velocity_size(), np = op.pressure_size();
  Vec bb = b;
  if (cfg.pressure_projection) {
    Vec bp = bb.tail(np);
    project_pressure_blocks(bp, op.Q, op.Np);
    bb.tail(np) = bp;
  }
  const double bnorm = bb.norm();
  z = Vec::Zero(nv + np);
  if (bnorm == 0.0) {
    rep.converged = true;
    rep.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return rep;
  }

  // s = b - C z (recurred), r = P2^{-1} s (recurred)
  Vec s = bb, r(nv + np);
  p2.apply_tri_inv(s, r);

  // direction bundle: p, C p, T p, A p_u, a*Atilde p_u, S p_p
  Vec p, cp, tp, ap, g, spp;
  double rho_old = 0.0;

  Vec au(nv), btp(nv), bu(np), tr_u(nv), bv(np), tr_p(np), cr(nv + np),
      tr(nv + np), strue(nv + np), cz(nv + np);

  for (int it = 1; it <= cfg.max_iters; ++it) {
    Vec r_u = r.head(nv), r_p = r.tail(np);
    op.apply_A(r_u, au);
    op.apply_Bt(r_p, btp);
    op.apply_B(r_u, bu);

    // <r, r>_H from the triangular-solve identities: a*At r_u = s_u and
    // S r_p = B r_u - s_p
    double rho = r_u.dot(au) - r_u.dot(s.head(nv)) + r_p.dot(bu) -
                 r_p.dot(s.tail(np));
    check_finite(rho, "inner product");
    if (rho == 0.0) {
      throw std::runtime_error("inner product breakdown: zero residual norm "
                               "without convergence");
    }
    if (rho < 0.0) {
      if (!cfg.permissive_metric) {
        throw std::runtime_error(
            "nonstandard inner product lost positivity; the velocity scaling "
            "factor exceeds the smallest preconditioned eigenvalue");
      }
      rep.metric_positivity_lost = true;
    }

    // T r = P2^{-1} C r
    cr.head(nv) = au + btp;
    cr.tail(np) = bu;
    p2.apply_atilde_blocks(cr.head(nv), tr_u);
    tr_u /= p2.scaling;
    op.apply_B(tr_u, bv);
    p2.apply_schur_inv(bv - bu, tr_p);
    tr.head(nv) = tr_u;
    tr.tail(np) = tr_p;

    Vec sr_p = bu - s.tail(np);  // S r_p
    if (it == 1) {
      p = r;
      cp = cr;
      tp = tr;
      ap = au;
      g = s.head(nv);
      spp = sr_p;
    } else {
      double betak = rho / rho_old;
      p = r + betak * p;
      cp = cr + betak * cp;
      tp = tr + betak * tp;
      ap = au + betak * ap;
      g = Vec(s.head(nv)) + betak * g;
      spp = sr_p + betak * spp;
    }
    double pi = tp.head(nv).dot(ap - g) + tp.tail(np).dot(spp);
    check_finite(pi, "direction inner product");
    if (pi == 0.0) {
      throw std::runtime_error("inner product breakdown: stalled search "
                               "direction");
    }
    if (pi < 0.0) {
      if (!cfg.permissive_metric) {
        throw std::runtime_error(
            "nonstandard inner product lost positivity along a search "
            "direction; reduce the velocity scaling factor");
      }
      rep.metric_positivity_lost = true;
    }
    double alpha = rho / pi;
    z += alpha * p;
    s -= alpha * cp;
    r -= alpha * tp;
    rho_old = rho;

    // stop on the recomputed true residual
    op.apply(z, cz);
    strue = bb - cz;
    if (cfg.pressure_projection) {
      Vec sp = strue.tail(np);
      project_pressure_blocks(sp, op.Q, op.Np);
      strue.tail(np) = sp;
    }
    double relres = strue.norm() / bnorm;
    check_finite(relres, "residual norm");
    if (cfg.record_history) {
      rep.residual_history.push_back(relres);
      rep.precond_residual_history.push_back(std::sqrt(std::abs(rho)));
    }
    rep.iterations = it;
    rep.final_relres = relres;
    if (observer) observer(it, z);
    if (relres <= cfg.tolerance) {
      rep.converged = true;
      break;
    }
  }
  if (cfg.pressure_projection) {
    Vec zp = z.tail(np);
    project_pressure_blocks(zp, op.Q, op.Np);
    z.tail(np) = zp;
  }
  rep.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  rep.op_counts = diff(before, snapshot(op.counters));
  return rep;
}

}  // namespace sgfe
