// Homogeneous self-dual embedding interior-point method with Nesterov-Todd
// scaling and Mehrotra predictor-corrector steps, for LPs over products of
// nonnegative orthants and second-order cones.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>

#include <Eigen/OrderingMethods>

#include "acots/conic.hpp"

namespace acots {

const char* to_string(IpmStatus status) {
  switch (status) {
    case IpmStatus::kOptimal: return "optimal";
    case IpmStatus::kInaccurateOptimal: return "inaccurate_optimal";
    case IpmStatus::kPrimalInfeasible: return "primal_infeasible";
    case IpmStatus::kDualInfeasible: return "dual_infeasible";
    case IpmStatus::kMaxIterations: return "max_iterations";
    case IpmStatus::kNumerical: return "numerical";
  }
  return "unknown";
}

namespace {

using Eigen::VectorXd;
using detail::NtScaling;

struct Equilibration {
  VectorXd d;   // columns
  VectorXd ea;  // equality rows
  VectorXd eg;  // cone rows
};

void row_max(const SparseMatrix& m, VectorXd& out) {
  out.setZero(m.rows());
  for (int j = 0; j < m.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(m, j); it; ++it) {
      out[it.row()] = std::max(out[it.row()], std::abs(it.value()));
    }
  }
}

Equilibration equilibrate(SparseMatrix& A, SparseMatrix& G, const ConeDims& k, int iters) {
  const int n = static_cast<int>(std::max(A.cols(), G.cols()));
  Equilibration e{VectorXd::Ones(n), VectorXd::Ones(A.rows()), VectorXd::Ones(G.rows())};
  auto scale_of = [](double v) { return v < 1e-6 ? 1.0 : std::sqrt(v); };
  VectorXd col(n), ra, rg;
  for (int it = 0; it < iters; ++it) {
    col.setZero();
    for (const SparseMatrix* m : {&A, &G}) {
      for (int j = 0; j < m->outerSize(); ++j) {
        for (SparseMatrix::InnerIterator i(*m, j); i; ++i) col[j] = std::max(col[j], std::abs(i.value()));
      }
    }
    row_max(A, ra);
    row_max(G, rg);
    int off = k.nonneg;
    for (int d : k.soc) {
      const double mx = rg.segment(off, d).maxCoeff();
      rg.segment(off, d).setConstant(mx);
      off += d;
    }
    for (int j = 0; j < n; ++j) col[j] = 1.0 / scale_of(col[j]);
    for (int i = 0; i < ra.size(); ++i) ra[i] = 1.0 / scale_of(ra[i]);
    for (int i = 0; i < rg.size(); ++i) rg[i] = 1.0 / scale_of(rg[i]);
    A = ra.asDiagonal() * A * col.asDiagonal();
    G = rg.asDiagonal() * G * col.asDiagonal();
    e.d = e.d.cwiseProduct(col);
    e.ea = e.ea.cwiseProduct(ra);
    e.eg = e.eg.cwiseProduct(rg);
  }
  return e;
}

// Quasi-definite KKT matrix [dI A' G'; A -dI 0; G 0 -(W^2 + dI)] with a fixed
// sparsity pattern; values refreshed per iteration.
class KktSystem {
 public:
  KktSystem(const SparseMatrix& A, const SparseMatrix& G, const ConeDims& k, const IpmSettings& st)
      : A_(A), G_(G), k_(k), st_(st) {
    n_ = static_cast<int>(std::max(A.cols(), G.cols()));
    p_ = static_cast<int>(A.rows());
    m_ = static_cast<int>(G.rows());
    const int dim = n_ + p_ + m_;
    // Upper-triangle entries in original indexing, one per value source.
    std::vector<std::pair<int, int>> ent;
    for (int j = 0; j < n_; ++j) ent.emplace_back(j, j);
    for (int j = 0; j < A.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(A, j); it; ++it) ent.emplace_back(j, n_ + it.row());
    for (int i = 0; i < p_; ++i) ent.emplace_back(n_ + i, n_ + i);
    for (int j = 0; j < G.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(G, j); it; ++it) ent.emplace_back(j, n_ + p_ + it.row());
    z_begin_ = static_cast<int>(ent.size());
    const int zo = n_ + p_;
    for (int i = 0; i < k.nonneg; ++i) ent.emplace_back(zo + i, zo + i);
    int off = k.nonneg;
    for (int d : k.soc) {
      for (int b = 0; b < d; ++b)
        for (int a = 0; a <= b; ++a) ent.emplace_back(zo + off + a, zo + off + b);
      off += d;
    }

    // Fill-reducing ordering.
    SparseMatrix pat(dim, dim);
    {
      std::vector<Eigen::Triplet<double>> t;
      t.reserve(ent.size());
      for (auto [r, c] : ent) t.emplace_back(r, c, 1.0);
      pat.setFromTriplets(t.begin(), t.end());
    }
    Eigen::AMDOrdering<int> amd;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> pinv;
    amd(pat, pinv);
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm = pinv.inverse();
    perm_.assign(perm.indices().data(), perm.indices().data() + dim);

    std::vector<std::tuple<int, int, int>> pe;  // (col, row, source)
    pe.reserve(ent.size());
    for (int s = 0; s < static_cast<int>(ent.size()); ++s) {
      int r = perm_[ent[s].first], c = perm_[ent[s].second];
      if (r > c) std::swap(r, c);
      pe.emplace_back(c, r, s);
    }
    std::sort(pe.begin(), pe.end());
    col_ptr_.assign(dim + 1, 0);
    row_idx_.resize(pe.size());
    pos_.resize(pe.size());
    for (std::size_t q = 0; q < pe.size(); ++q) {
      auto [c, r, s] = pe[q];
      ++col_ptr_[c + 1];
      row_idx_[q] = r;
      pos_[s] = static_cast<int>(q);
    }
    for (int c = 0; c < dim; ++c) col_ptr_[c + 1] += col_ptr_[c];
    values_.assign(pe.size(), 0.0);
    signs_.assign(dim, -1);
    for (int j = 0; j < n_; ++j) signs_[perm_[j]] = 1;
    ldl_.analyze(dim, col_ptr_, row_idx_);

    // Constant entries.
    const double reg = st.static_reg;
    int s = 0;
    for (int j = 0; j < n_; ++j) values_[pos_[s++]] = reg;
    for (int j = 0; j < A.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(A, j); it; ++it) values_[pos_[s++]] = it.value();
    for (int i = 0; i < p_; ++i) values_[pos_[s++]] = -reg;
    for (int j = 0; j < G.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(G, j); it; ++it) values_[pos_[s++]] = it.value();
  }

  // w == nullptr selects the identity scaling.
  void set_scaling(const NtScaling* w) {
    w_ = w;
    const double reg = st_.static_reg;
    int s = z_begin_;
    for (int i = 0; i < k_.nonneg; ++i) {
      const double wi = w ? w->lp_w[i] : 1.0;
      values_[pos_[s++]] = -(wi * wi) - reg;
    }
    int off = k_.nonneg;
    for (std::size_t c = 0; c < k_.soc.size(); ++c) {
      const int d = k_.soc[c];
      const double* wb = w ? w->soc_w.data() + (off - k_.nonneg) : nullptr;
      const double eta2 = w ? w->soc_eta[c] * w->soc_eta[c] : 1.0;
      for (int b = 0; b < d; ++b) {
        for (int a = 0; a <= b; ++a) {
          double v;
          if (!w) {
            v = (a == b) ? 1.0 : 0.0;
          } else {
            v = 2.0 * wb[a] * wb[b];
            if (a == b) v += (a == 0) ? -1.0 : 1.0;
            v *= eta2;
          }
          values_[pos_[s++]] = -v - ((a == b) ? reg : 0.0);
        }
      }
      off += d;
    }
  }

  void factor() { ldl_.factor(values_, signs_, st_.dyn_reg_eps, st_.dyn_reg_delta); }

  // K_true * v where K_true has no static regularization.
  VectorXd multiply(const VectorXd& v) const {
    VectorXd out = VectorXd::Zero(v.size());
    const auto x = v.head(n_);
    const auto y = v.segment(n_, p_);
    const VectorXd z = v.tail(m_);
    if (p_ > 0) {
      out.head(n_) += A_.transpose() * y;
      out.segment(n_, p_) = A_ * x;
    }
    if (m_ > 0) {
      out.head(n_) += G_.transpose() * z;
      VectorXd w2z = w_ ? detail::apply_w(k_, *w_, detail::apply_w(k_, *w_, z)) : z;
      out.tail(m_) = G_ * x - w2z;
    }
    return out;
  }

  VectorXd solve(const VectorXd& rhs) const {
    const int dim = n_ + p_ + m_;
    std::vector<double> buf(dim);
    auto raw_solve = [&](const VectorXd& r) {
      for (int i = 0; i < dim; ++i) buf[perm_[i]] = r[i];
      ldl_.solve(buf.data());
      VectorXd out(dim);
      for (int i = 0; i < dim; ++i) out[i] = buf[perm_[i]];
      return out;
    };
    VectorXd sol = raw_solve(rhs);
    const double tol = 1e-14 * (1.0 + rhs.lpNorm<Eigen::Infinity>());
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < st_.refine_steps; ++it) {
      VectorXd res = rhs - multiply(sol);
      const double err = res.lpNorm<Eigen::Infinity>();
      if (!(err > tol) || err > 0.5 * prev) break;
      prev = err;
      sol += raw_solve(res);
    }
    return sol;
  }

 private:
  const SparseMatrix& A_;
  const SparseMatrix& G_;
  const ConeDims& k_;
  const IpmSettings& st_;
  const NtScaling* w_ = nullptr;
  int n_ = 0, p_ = 0, m_ = 0, z_begin_ = 0;
  std::vector<int> perm_, col_ptr_, row_idx_, pos_, signs_;
  std::vector<double> values_;
  detail::SparseLdl ldl_;
};

// Shifts r into the interior of the cone when it is not already.
VectorXd bring_to_cone(const ConeDims& k, const VectorXd& r) {
  double alpha = -0.99;
  for (int i = 0; i < k.nonneg; ++i) alpha = std::max(alpha, -r[i]);
  int off = k.nonneg;
  for (int d : k.soc) {
    alpha = std::max(alpha, r.segment(off + 1, d - 1).norm() - r[off]);
    off += d;
  }
  VectorXd s = r;
  if (alpha >= -1e-13) {
    const double shift = 1.0 + alpha;
    for (int i = 0; i < k.nonneg; ++i) s[i] += shift;
    off = k.nonneg;
    for (int d : k.soc) {
      s[off] += shift;
      off += d;
    }
  }
  return s;
}

VectorXd identity(const ConeDims& k) {
  VectorXd e = VectorXd::Zero(k.total());
  e.head(k.nonneg).setOnes();
  int off = k.nonneg;
  for (int d : k.soc) {
    e[off] = 1.0;
    off += d;
  }
  return e;
}

struct Iterate {
  VectorXd x, y, z, s;
  double tau = 1.0, kap = 1.0;
  double pres = 0, dres = 0, gap = 0, relgap = 0, pcost = 0, dcost = 0;
  double pinfres = -1, dinfres = -1;
  double cx = 0, by_hz = 0;

  double quality() const {
    return std::max({pres, dres, std::min(std::abs(gap), std::abs(relgap))});
  }
};

}  // namespace

IpmResult solve_conic(const ConicProblem& prob, const IpmSettings& st) {
  const ConeDims& k = prob.cones;
  const int n = static_cast<int>(prob.c.size());
  const int p = static_cast<int>(prob.b.size());
  const int m = static_cast<int>(prob.h.size());

  SparseMatrix A = prob.A, G = prob.G;
  if (A.rows() != p) A.resize(p, n);
  if (G.rows() != m) G.resize(m, n);
  A.makeCompressed();
  G.makeCompressed();
  Equilibration eq = equilibrate(A, G, k, st.equil_iters);
  A.makeCompressed();
  G.makeCompressed();
  const VectorXd c = eq.d.cwiseProduct(prob.c);
  const VectorXd b = eq.ea.cwiseProduct(prob.b);
  const VectorXd h = eq.eg.cwiseProduct(prob.h);
  const SparseMatrix At = A.transpose();
  const SparseMatrix Gt = G.transpose();

  const double resx0 = std::max(1.0, c.norm());
  const double resy0 = std::max(1.0, b.norm());
  const double resz0 = std::max(1.0, h.norm());

  KktSystem kkt(A, G, k, st);
  kkt.set_scaling(nullptr);
  kkt.factor();

  Iterate w;
  {
    VectorXd rhs = VectorXd::Zero(n + p + m);
    rhs.segment(n, p) = b;
    rhs.tail(m) = h;
    VectorXd sol = kkt.solve(rhs);
    w.x = sol.head(n);
    w.s = bring_to_cone(k, -sol.tail(m));
    rhs.setZero();
    rhs.head(n) = -c;
    sol = kkt.solve(rhs);
    w.y = sol.segment(n, p);
    w.z = bring_to_cone(k, sol.tail(m));
  }

  VectorXd rhs1 = VectorXd::Zero(n + p + m);
  rhs1.head(n) = -c;
  rhs1.segment(n, p) = b;
  rhs1.tail(m) = h;
  const VectorXd e = identity(k);
  const int degree = k.degree();

  IpmResult result;
  Iterate best;
  bool have_best = false;
  double pres_prev = std::numeric_limits<double>::infinity();
  IpmStatus status = IpmStatus::kMaxIterations;
  bool finished = false;
  NtScaling scaling;
  VectorXd lambda;
  int iter = 0;

  VectorXd F1, F2, F3;
  double F4 = 0.0;

  auto evaluate = [&](Iterate& it) {
    F1 = c * it.tau;
    if (p > 0) F1 += At * it.y;
    if (m > 0) F1 += Gt * it.z;
    VectorXd ax = A * it.x;
    VectorXd gx = G * it.x;
    F2 = b * it.tau - ax;
    F3 = h * it.tau - gx - it.s;
    it.cx = c.dot(it.x);
    it.by_hz = b.dot(it.y) + h.dot(it.z);
    F4 = -it.cx - it.by_hz - it.kap;
    const double nx = it.x.norm(), ny = it.y.norm(), nz = it.z.norm(), ns = it.s.norm();
    it.gap = it.s.dot(it.z);
    it.pcost = it.cx / it.tau;
    it.dcost = -it.by_hz / it.tau;
    if (it.pcost < 0.0) {
      it.relgap = it.gap / (-it.pcost) / it.tau / it.tau;
    } else if (it.dcost > 0.0) {
      it.relgap = it.gap / it.dcost / it.tau / it.tau;
    } else {
      it.relgap = std::numeric_limits<double>::infinity();
    }
    it.gap /= it.tau * it.tau;
    const double nry = p > 0 ? F2.norm() / std::max(resy0 + nx, 1.0) : 0.0;
    const double nrz = m > 0 ? F3.norm() / std::max(resz0 + nx + ns, 1.0) : 0.0;
    it.pres = std::max(nry, nrz) / it.tau;
    it.dres = F1.norm() / std::max(resx0 + ny + nz, 1.0) / it.tau;
    it.pinfres = -1;
    it.dinfres = -1;
    if (it.by_hz / std::max(ny + nz, 1.0) < -st.reltol) {
      VectorXd r = VectorXd::Zero(n);
      if (p > 0) r += At * it.y;
      if (m > 0) r += Gt * it.z;
      it.pinfres = r.norm() / std::max(ny + nz, 1.0);
    }
    if (it.cx / std::max(nx, 1.0) < -st.reltol) {
      it.dinfres = std::max(p > 0 ? ax.norm() / std::max(nx, 1.0) : 0.0,
                            (gx + it.s).norm() / std::max(nx + ns, 1.0));
    }
  };

  auto check_exit = [&](const Iterate& it, bool reduced) -> std::optional<IpmStatus> {
    const double ft = reduced ? st.feastol_inacc : st.feastol;
    const double at = reduced ? st.abstol_inacc : st.abstol;
    const double rt = reduced ? st.reltol_inacc : st.reltol;
    if ((-it.cx > 0.0 || -it.by_hz >= -at) && it.pres < ft && it.dres < ft &&
        (it.gap < at || it.relgap < rt)) {
      return reduced ? IpmStatus::kInaccurateOptimal : IpmStatus::kOptimal;
    }
    if (it.dinfres >= 0.0 && it.dinfres < ft && it.tau < it.kap) return IpmStatus::kDualInfeasible;
    if ((it.pinfres >= 0.0 && it.pinfres < ft && it.tau < it.kap) ||
        (it.tau < ft && it.kap < ft && it.pinfres >= 0.0 && it.pinfres < ft)) {
      return IpmStatus::kPrimalInfeasible;
    }
    return std::nullopt;
  };

  auto fallback = [&](IpmStatus otherwise) {
    if (have_best) w = best;
    evaluate(w);
    auto code = check_exit(w, true);
    status = code ? *code : otherwise;
    finished = true;
  };

  double step = 1.0;
  for (iter = 0; iter <= st.max_iter; ++iter) {
    evaluate(w);
    if (st.verbose) {
      std::fprintf(stderr, "%3d pcost % .6e dcost % .6e gap %.1e pres %.1e dres %.1e k/t %.1e step %.3f\n",
                   iter, w.pcost, w.dcost, w.gap, w.pres, w.dres, w.kap / w.tau, step);
    }
    if (!std::isfinite(w.pcost) || !std::isfinite(w.pres)) {
      fallback(IpmStatus::kNumerical);
      break;
    }
    if (iter > 0 && (w.pres > 500.0 * std::max(pres_prev, 1e-12) || w.gap < 0.0)) {
      fallback(IpmStatus::kNumerical);
      break;
    }
    pres_prev = w.pres;
    if (auto code = check_exit(w, false)) {
      status = *code;
      finished = true;
      break;
    }
    if (iter > 0 && step < 1e-8) {
      fallback(IpmStatus::kNumerical);
      break;
    }
    if (iter == st.max_iter) {
      if (have_best && best.quality() < w.quality()) w = best;
      fallback(IpmStatus::kMaxIterations);
      break;
    }
    if (!have_best || w.quality() < best.quality()) {
      best = w;
      have_best = true;
    }

    if (!detail::compute_nt_scaling(k, w.s, w.z, scaling, lambda)) {
      fallback(IpmStatus::kNumerical);
      break;
    }
    kkt.set_scaling(&scaling);
    kkt.factor();
    const VectorXd d1 = kkt.solve(rhs1);
    const double denom = w.kap / w.tau - c.dot(d1.head(n)) - b.dot(d1.segment(n, p)) -
                         h.dot(d1.tail(m));
    const double mu = (w.s.dot(w.z) + w.tau * w.kap) / (degree + 1);

    auto direction = [&](double sigma, const VectorXd& rho, double rho_tau, VectorXd& dx, VectorXd& dy,
                         VectorXd& dz, VectorXd& ds, double& dtau, double& dkap) {
      const VectorXd lr = detail::cone_division(k, lambda, rho);
      VectorXd rhs(n + p + m);
      rhs.head(n) = -(1.0 - sigma) * F1;
      rhs.segment(n, p) = (1.0 - sigma) * F2;
      rhs.tail(m) = (1.0 - sigma) * F3 - detail::apply_w(k, scaling, lr);
      const VectorXd d2 = kkt.solve(rhs);
      dtau = (-(1.0 - sigma) * F4 + c.dot(d2.head(n)) + b.dot(d2.segment(n, p)) + h.dot(d2.tail(m)) +
              rho_tau / w.tau) /
             denom;
      dx = d2.head(n) + dtau * d1.head(n);
      dy = d2.segment(n, p) + dtau * d1.segment(n, p);
      dz = d2.tail(m) + dtau * d1.tail(m);
      ds = detail::apply_w(k, scaling, lr - detail::apply_w(k, scaling, dz));
      dkap = (rho_tau - w.kap * dtau) / w.tau;
    };
    auto step_length = [&](const VectorXd& ds, const VectorXd& dz, double dtau, double dkap) {
      double a = std::min(detail::max_step(k, w.s, ds), detail::max_step(k, w.z, dz));
      if (dtau < 0.0) a = std::min(a, -w.tau / dtau);
      if (dkap < 0.0) a = std::min(a, -w.kap / dkap);
      return a;
    };

    VectorXd dx, dy, dz, ds;
    double dtau = 0.0, dkap = 0.0;
    const VectorXd ll = detail::cone_product(k, lambda, lambda);
    direction(0.0, -ll, -w.tau * w.kap, dx, dy, dz, ds, dtau, dkap);
    const double alpha_aff = std::min(1.0, step_length(ds, dz, dtau, dkap));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 1e-4, 1.0);

    const VectorXd corr = detail::cone_product(k, detail::apply_w_inv(k, scaling, ds),
                                               detail::apply_w(k, scaling, dz));
    const VectorXd rho = -ll - corr + sigma * mu * e;
    const double rho_tau = -w.tau * w.kap - dtau * dkap + sigma * mu;
    direction(sigma, rho, rho_tau, dx, dy, dz, ds, dtau, dkap);
    step = std::min(1.0, 0.99 * step_length(ds, dz, dtau, dkap));

    w.x += step * dx;
    w.y += step * dy;
    w.z += step * dz;
    w.s += step * ds;
    w.tau += step * dtau;
    w.kap += step * dkap;
  }
  if (!finished) status = IpmStatus::kMaxIterations;

  result.status = status;
  result.iterations = iter;
  result.primal_residual = w.pres;
  result.dual_residual = w.dres;
  result.gap = w.gap;
  double scale_primal = w.tau, scale_dual = w.tau;
  if (status == IpmStatus::kPrimalInfeasible) scale_dual = -w.by_hz;
  if (status == IpmStatus::kDualInfeasible) scale_primal = -w.cx;
  result.x = eq.d.cwiseProduct(w.x) / scale_primal;
  result.s = w.s.cwiseQuotient(eq.eg) / scale_primal;
  result.y = eq.ea.cwiseProduct(w.y) / scale_dual;
  result.z = eq.eg.cwiseProduct(w.z) / scale_dual;
  result.primal_objective = prob.c.dot(result.x);
  result.dual_objective = -(prob.b.dot(result.y) + prob.h.dot(result.z));
  return result;
}

}  // namespace acots
