#include "sgfe/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sgfe {

namespace {

const double kSqrt3 = std::sqrt(3.0);

Mat dense_atilde_scalar(const Instance& inst) {
  if (inst.lap.scalar_matrix()) return Mat(*inst.lap.scalar_matrix());
  // multigrid: tabulate the V-cycle on unit vectors and invert
  int ns = inst.lap.scalar_size();
  Mat Bmg(ns, ns);
  Vec e = Vec::Zero(ns), z;
  for (int j = 0; j < ns; ++j) {
    e.setZero();
    e[j] = 1.0;
    inst.lap.apply_scalar(e, z);
    Bmg.col(j) = z;
  }
  Bmg = 0.5 * (Bmg + Bmg.transpose()).eval();
  Mat At = Bmg.inverse();
  return 0.5 * (At + At.transpose());
}

Mat expand_velocity_blocks(const Mat& As, int Q) {
  int ns = static_cast<int>(As.rows());
  int Nu = 2 * ns;
  Mat X = Mat::Zero(static_cast<Eigen::Index>(Q) * Nu,
                    static_cast<Eigen::Index>(Q) * Nu);
  for (int b = 0; b < Q; ++b) {
    X.block(static_cast<Eigen::Index>(b) * Nu, static_cast<Eigen::Index>(b) * Nu,
            ns, ns) = As;
    X.block(static_cast<Eigen::Index>(b) * Nu + ns,
            static_cast<Eigen::Index>(b) * Nu + ns, ns, ns) = As;
  }
  return X;
}

Vec expand_pressure_diag(const Vec& Dp, int Q) {
  int Np = static_cast<int>(Dp.size());
  Vec d(static_cast<Eigen::Index>(Q) * Np);
  for (int b = 0; b < Q; ++b) d.segment(static_cast<Eigen::Index>(b) * Np, Np) = Dp;
  return d;
}

// sorted eigenvalues of the symmetric pencil (A, B), B SPD
Vec pencil_eigs(const Mat& A, const Mat& B) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(A, B);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("generalized eigensolve failed");
  }
  return es.eigenvalues();
}

BoundCheck make_interval_check(const std::string& name, const Vec& eigs,
                               double lo, double hi, double tol) {
  BoundCheck c;
  c.name = name;
  c.bound_lo = {lo};
  c.bound_hi = {hi};
  c.measured_min = eigs.minCoeff();
  c.measured_max = eigs.maxCoeff();
  c.margin_lo = c.measured_min - lo;
  c.margin_hi = hi - c.measured_max;
  c.tolerance = tol;
  c.pass = (c.margin_lo >= -tol) && (c.margin_hi >= -tol);
  return c;
}

// drop the q eigenvalues closest to zero, assert they are tiny
std::vector<double> deflate_zeros(std::vector<double> eigs, int q,
                                  double zero_tol, const char* what) {
  std::sort(eigs.begin(), eigs.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });
  for (int i = 0; i < q; ++i) {
    if (std::abs(eigs[i]) > zero_tol) {
      throw std::runtime_error(std::string("expected a zero eigenvalue in ") +
                               what + " but found " + std::to_string(eigs[i]));
    }
  }
  std::vector<double> rest(eigs.begin() + q, eigs.end());
  std::sort(rest.begin(), rest.end());
  return rest;
}

}  // namespace

std::pair<double, double> bound_velocity_pencil(const KleExpansion& kle,
                                                double delta, double Delta) {
  double spread = kSqrt3 * kle.sigma * kle.chi_total;
  return {(kle.nu0 - spread) * delta, (kle.nu0 + spread) * Delta};
}

std::pair<double, double> bound_schur(const KleExpansion& kle, double gamma) {
  double spread = kSqrt3 * kle.sigma * kle.chi_total;
  double lo = kThetaSq * gamma * gamma / (kle.nu0 + spread);
  double hi = kThetaSqUpper / (kle.nu0 - spread);
  return {lo, hi};
}

std::pair<double, double> bound_approx_schur(double delta, double Delta,
                                             double gamma) {
  return {delta * kThetaSq * gamma * gamma, Delta * kThetaSqUpper};
}

BlockdiagInterval blockdiag_interval(double dhat, double Dhat, double th,
                                     double Th) {
  BlockdiagInterval r;
  r.neg_lo = -0.5 * (std::sqrt(dhat * dhat + 4.0 * Th) - dhat);
  r.neg_hi = -0.5 * (std::sqrt(Dhat * Dhat + 4.0 * th) - Dhat);
  r.pos_lo = dhat;
  r.pos_hi = 0.5 * (Dhat + std::sqrt(Dhat * Dhat + 4.0 * Th));
  return r;
}

BlocktriInterval blocktri_interval(double a_delta, double dhat, double Dhat,
                                   double schur_lo, double schur_hi) {
  BlocktriInterval r;
  double rho = Dhat / (a_delta * dhat);
  auto half = [rho](double g) { return 0.5 * (2.0 - (1.0 + g) * rho); };
  double t1 = half(schur_hi), t2 = half(schur_lo);
  double disc1 = t1 * t1 + rho - 1.0;
  double disc2 = t2 * t2 + rho - 1.0;
  r.applicable = disc1 >= 0.0 && disc2 >= 0.0;
  if (!r.applicable) return r;
  r.zeta1 = t1 - std::sqrt(disc1);
  r.zeta2 = t2 + std::sqrt(disc2);
  r.lo = 1.0 - r.zeta2;
  r.hi = 1.0 - r.zeta1;
  return r;
}

InfSup measure_infsup(const FeMatrices& fem) {
  Eigen::SimplicialLDLT<SpMat> solver(fem.A);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("factorization of the velocity block failed");
  }
  Mat Bt = Mat(fem.B).transpose();
  Mat AinvBt = solver.solve(Bt);
  Mat S = Mat(fem.B) * AinvBt;
  S = 0.5 * (S + S.transpose()).eval();
  Vec ev = pencil_eigs(S, Mat(fem.M_p));
  InfSup r;
  r.deflated = ev(0);
  r.min_nonzero = ev(1);
  r.max_eig = ev(ev.size() - 1);
  r.gamma = std::sqrt(r.min_nonzero);
  return r;
}

VerifyReport verify_instance(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.solver = "minres";  // scaling is resolved locally below
  auto inst = build_instance(cfg);
  VerifyReport rep;
  rep.cfg = cfg_in;

  if (inst->op.total_size() > 6000) {
    throw std::runtime_error("instance too large for brute-force verification");
  }

  DenseBlocks d = assemble_dense_blocks(inst->op);
  Mat At_s = dense_atilde_scalar(*inst);
  int Q = inst->basis.Q;
  Mat At_blk = expand_velocity_blocks(At_s, Q);
  Vec Sdiag = expand_pressure_diag(inst->fem.D_p, Q);
  Mat Smat = Sdiag.asDiagonal();
  int nv = inst->op.velocity_size(), np = inst->op.pressure_size();

  InfSup infsup = measure_infsup(inst->fem);
  if (infsup.deflated > 1e-10) {
    throw std::runtime_error("pressure kernel eigenvalue is not numerically zero");
  }
  rep.gamma = infsup.gamma;
  rep.chi = inst->kle.chi_total;
  rep.delta_ref = inst->delta_ref;
  rep.Delta_ref = inst->Delta_ref;

  // pressure mass against its diagonal
  {
    Vec ev = pencil_eigs(Mat(inst->fem.M_p), Mat(Vec(inst->fem.D_p).asDiagonal()));
    rep.checks.push_back(make_interval_check("pressure_mass", ev, kThetaSq,
                                             kThetaSqUpper, 1e-10));
  }

  auto [dhat, Dhat] =
      bound_velocity_pencil(inst->kle, inst->delta_ref, inst->Delta_ref);
  if (!(dhat > 0.0)) {
    throw std::runtime_error(
        "lower spectral bound is not positive; sigma is beyond the "
        "positivity range for this expansion");
  }

  // velocity-block pencil
  Vec ev_vel = pencil_eigs(d.A, At_blk);
  rep.checks.push_back(
      make_interval_check("velocity_pencil", ev_vel, dhat, Dhat, 1e-10));
  double a_star_dense = ev_vel.minCoeff();
  rep.a_star = a_star_dense;

  // Schur pencil, exact velocity inverse
  Mat Ainv_Bt = d.A.ldlt().solve(d.B.transpose());
  Mat Schur = d.B * Ainv_Bt;
  Schur = 0.5 * (Schur + Schur.transpose()).eval();
  auto [slo, shi] = bound_schur(inst->kle, infsup.gamma);
  {
    Vec ev = pencil_eigs(Schur, Smat);
    std::vector<double> evv(ev.data(), ev.data() + ev.size());
    auto rest = deflate_zeros(evv, Q, 1e-8, "the Schur pencil");
    Vec evr = Eigen::Map<Vec>(rest.data(), rest.size());
    rep.checks.push_back(make_interval_check("schur_pencil", evr, slo, shi, 1e-10));
  }

  // approximated Schur pencil
  auto [tlo, thi] =
      bound_approx_schur(inst->delta_ref, inst->Delta_ref, infsup.gamma);
  {
    Mat Atinv_Bt = At_blk.ldlt().solve(d.B.transpose());
    Mat AS = d.B * Atinv_Bt;
    AS = 0.5 * (AS + AS.transpose()).eval();
    Vec ev = pencil_eigs(AS, Smat);
    std::vector<double> evv(ev.data(), ev.data() + ev.size());
    auto rest = deflate_zeros(evv, Q, 1e-8, "the approximated Schur pencil");
    Vec evr = Eigen::Map<Vec>(rest.data(), rest.size());
    rep.checks.push_back(
        make_interval_check("approx_schur_pencil", evr, tlo, thi, 1e-10));
  }

  // block diagonal preconditioned saddle matrix
  {
    Mat P1 = Mat::Zero(nv + np, nv + np);
    P1.topLeftCorner(nv, nv) = At_blk;
    P1.bottomRightCorner(np, np) = Smat;
    Vec ev = pencil_eigs(d.C, P1);
    std::vector<double> evv(ev.data(), ev.data() + ev.size());
    auto rest = deflate_zeros(evv, Q, 1e-8, "the block diagonal pencil");
    BlockdiagInterval bi = blockdiag_interval(dhat, Dhat, tlo, thi);
    auto split = std::partition_point(rest.begin(), rest.end(),
                                      [](double e) { return e < 0.0; });
    if (split == rest.begin() || split == rest.end()) {
      throw std::runtime_error("block diagonal pencil lost its indefiniteness");
    }
    const double tol = 1e-8;
    bool ok = true;
    for (auto it = rest.begin(); it != split; ++it)
      ok = ok && *it >= bi.neg_lo - tol && *it <= bi.neg_hi + tol;
    for (auto it = split; it != rest.end(); ++it)
      ok = ok && *it >= bi.pos_lo - tol && *it <= bi.pos_hi + tol;
    BoundCheck c;
    c.name = "blockdiag_pencil";
    c.bound_lo = {bi.neg_lo, bi.pos_lo};
    c.bound_hi = {bi.neg_hi, bi.pos_hi};
    c.tolerance = tol;
    c.measured_min = rest.front();
    c.measured_max = rest.back();
    c.margin_lo = rest.front() - bi.neg_lo;
    c.margin_hi = bi.pos_hi - rest.back();
    c.note = "negative then positive interval";
    c.pass = ok;
    rep.checks.push_back(c);
  }

  // block triangular preconditioned matrix at the analytical scaling
  {
    const double a_delta = 0.95;
    double a = a_delta * dhat;
    Mat P2 = Mat::Zero(nv + np, nv + np);
    P2.topLeftCorner(nv, nv) = a * At_blk;
    P2.bottomLeftCorner(np, nv) = d.B;
    P2.bottomRightCorner(np, np) = -Smat;
    Mat T = P2.partialPivLu().solve(d.C);
    Eigen::EigenSolver<Mat> es(T);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("eigensolve of the triangular pencil failed");
    }
    double max_imag = es.eigenvalues().imag().cwiseAbs().maxCoeff();
    std::vector<double> evv(es.eigenvalues().size());
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      evv[i] = es.eigenvalues()[i].real();
    auto rest = deflate_zeros(evv, Q, 1e-6, "the block triangular pencil");
    BlocktriInterval bt = blocktri_interval(a_delta, dhat, Dhat, slo, shi);
    Vec evr = Eigen::Map<Vec>(rest.data(), rest.size());
    BoundCheck c = make_interval_check("blocktri_pencil", evr, bt.lo, bt.hi, 1e-6);
    c.pass = c.pass && bt.applicable &&
             max_imag <= 1e-8 * (1.0 + std::abs(c.measured_max));
    std::ostringstream os;
    os << "scaling 0.95 x lower bound, max imaginary part " << max_imag;
    c.note = os.str();
    rep.checks.push_back(c);
  }

  // inner product machinery at 0.95 x the measured extreme eigenvalue
  {
    double a_h = 0.95 * a_star_dense;
    Mat H = Mat::Zero(nv + np, nv + np);
    H.topLeftCorner(nv, nv) = d.A - a_h * At_blk;
    H.bottomRightCorner(np, np) = Smat;
    Eigen::SelfAdjointEigenSolver<Mat> esh(H);
    double hmin = esh.eigenvalues().minCoeff();
    Mat P2 = Mat::Zero(nv + np, nv + np);
    P2.topLeftCorner(nv, nv) = a_h * At_blk;
    P2.bottomLeftCorner(np, nv) = d.B;
    P2.bottomRightCorner(np, np) = -Smat;
    Mat T = P2.partialPivLu().solve(d.C);
    Mat HT = H * T;
    double asym = (HT - HT.transpose()).norm();
    double scale = HT.norm();
    Mat sym = 0.5 * (HT + HT.transpose());
    // H-positivity on the complement of the pressure kernel: project it out
    Mat K = pressure_kernel_basis(Q, inst->op.Np);
    Mat Kfull = Mat::Zero(nv + np, Q);
    Kfull.bottomRows(np) = K;
    Eigen::HouseholderQR<Mat> qr(Kfull);
    Mat Qfull = qr.householderQ() * Mat::Identity(nv + np, nv + np);
    Mat Comp = Qfull.rightCols(nv + np - Q);  // orthogonal complement
    Mat symc = Comp.transpose() * sym * Comp;
    Eigen::SelfAdjointEigenSolver<Mat> ess(symc);
    double smin = ess.eigenvalues().minCoeff();
    BoundCheck c;
    c.name = "h_inner_product";
    c.bound_lo = {0.0};
    c.bound_hi = {1e300};
    c.measured_min = hmin;
    c.measured_max = smin;
    c.margin_lo = hmin;
    c.margin_hi = smin;
    c.tolerance = 1e-10;
    c.pass = hmin > 0.0 && asym <= 1e-10 * scale && smin > 0.0;
    std::ostringstream os;
    os << "H min eig " << hmin << ", relative asymmetry " << asym / scale
       << ", symmetrized min eig off the kernel " << smin;
    c.note = os.str();
    rep.checks.push_back(c);
  }

  rep.all_pass = true;
  for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

std::string verify_report_markdown(const std::vector<VerifyReport>& reports) {
  std::ostringstream os;
  os << "# Eigenvalue bound verification\n\n";
  for (const auto& r : reports) {
    os << "## level " << r.cfg.level << ", M " << r.cfg.M << ", k " << r.cfg.k
       << ", sigma " << r.cfg.sigma << ", blocks " << r.cfg.laplacian << "\n\n";
    os << "chi " << r.chi << ", gamma " << r.gamma << ", reference window ["
       << r.delta_ref << ", " << r.Delta_ref << "], smallest preconditioned "
       << "eigenvalue " << r.a_star << "\n\n";
    os << "| check | bounds | measured | margins | pass |\n";
    os << "|---|---|---|---|---|\n";
    for (const auto& c : r.checks) {
      os << "| " << c.name << " | ";
      for (size_t i = 0; i < c.bound_lo.size(); ++i) {
        if (i) os << " and ";
        os << "[" << c.bound_lo[i] << ", "
           << (c.bound_hi[i] > 1e299 ? std::string("inf")
                                     : std::to_string(c.bound_hi[i]))
           << "]";
      }
      os << " | [" << c.measured_min << ", " << c.measured_max << "] | "
         << c.margin_lo << ", " << c.margin_hi << " | "
         << (c.pass ? "yes" : "NO") << " |\n";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace sgfe
