#include <algorithm>
#include <cmath>

#include "acots/solver.hpp"

namespace acots {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kNumerical: return "numerical";
  }
  return "unknown";
}

namespace {

struct Reduced {
  std::vector<double> lo, hi;
  std::vector<char> fixed;
  std::vector<char> dropped;
  bool infeasible = false;
  std::string why;
};

double tol_for(double v) { return 1e-9 * (1.0 + std::abs(v)); }

// Fixed-variable substitution, singleton rows, and forcing rows.
Reduced presolve(const ModelIR& model, bool enabled) {
  const int n = model.num_vars();
  Reduced red;
  red.lo.resize(n);
  red.hi.resize(n);
  red.fixed.assign(n, 0);
  red.dropped.assign(model.constraints().size(), 0);
  for (int i = 0; i < n; ++i) {
    red.lo[i] = model.vars()[i].lower;
    red.hi[i] = model.vars()[i].upper;
  }
  auto settle = [&](int i) -> bool {
    if (red.fixed[i]) return true;
    if (red.lo[i] > red.hi[i] + tol_for(red.hi[i])) {
      red.infeasible = true;
      red.why = "bounds of " + model.vars()[i].name + " cross";
      return false;
    }
    if (std::isfinite(red.lo[i]) && red.hi[i] - red.lo[i] <= 1e-10 * std::max(1.0, std::abs(red.lo[i]))) {
      const double v = 0.5 * (red.lo[i] + red.hi[i]);
      red.lo[i] = red.hi[i] = v;
      red.fixed[i] = 1;
    }
    return true;
  };
  for (int i = 0; i < n; ++i) {
    if (!settle(i)) return red;
  }
  if (!enabled) return red;

  const auto& rows = model.constraints();
  for (int pass = 0; pass < 50; ++pass) {
    bool changed = false;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (red.dropped[r]) continue;
      const LinearConstraint& row = rows[r];
      double rhs = row.rhs;
      int count = 0;
      int last = -1;
      double last_coef = 0.0;
      double min_act = 0.0, max_act = 0.0;
      for (const Term& t : row.terms) {
        if (red.fixed[t.var]) {
          rhs -= t.coef * red.lo[t.var];
          continue;
        }
        ++count;
        last = t.var;
        last_coef = t.coef;
        min_act += t.coef > 0 ? t.coef * red.lo[t.var] : t.coef * red.hi[t.var];
        max_act += t.coef > 0 ? t.coef * red.hi[t.var] : t.coef * red.lo[t.var];
      }
      const bool le = row.relation != Relation::kGreaterEqual;
      const bool ge = row.relation != Relation::kLessEqual;
      const double tol = tol_for(rhs);
      if (count == 0) {
        if ((le && 0.0 > rhs + tol) || (ge && 0.0 < rhs - tol)) {
          red.infeasible = true;
          red.why = "row " + row.name + " violated by fixed variables";
          return red;
        }
        red.dropped[r] = 1;
        continue;
      }
      if (count == 1) {
        const double v = rhs / last_coef;
        const bool upper = (le && last_coef > 0) || (ge && last_coef < 0);
        const bool lower = (le && last_coef < 0) || (ge && last_coef > 0);
        if (upper && v < red.hi[last]) red.hi[last] = v;
        if (lower && v > red.lo[last]) red.lo[last] = v;
        red.dropped[r] = 1;
        changed = true;
        if (!settle(last)) return red;
        continue;
      }
      auto force = [&](bool at_min) {
        for (const Term& t : row.terms) {
          if (red.fixed[t.var]) continue;
          const bool use_lo = (t.coef > 0) == at_min;
          const double v = use_lo ? red.lo[t.var] : red.hi[t.var];
          red.lo[t.var] = red.hi[t.var] = v;
          red.fixed[t.var] = 1;
        }
        red.dropped[r] = 1;
        changed = true;
      };
      if (le && std::isfinite(min_act) && min_act >= rhs - tol) {
        if (min_act > rhs + tol) {
          red.infeasible = true;
          red.why = "row " + row.name + " cannot be satisfied within bounds";
          return red;
        }
        force(true);
        continue;
      }
      if (ge && std::isfinite(max_act) && max_act <= rhs + tol) {
        if (max_act < rhs - tol) {
          red.infeasible = true;
          red.why = "row " + row.name + " cannot be satisfied within bounds";
          return red;
        }
        force(false);
        continue;
      }
    }
    if (!changed) break;
  }
  return red;
}

}  // namespace

ContinuousSolution ConicIpmSubsolver::solve(const ModelIR& model) const {
  const int n = model.num_vars();
  ContinuousSolution sol;
  sol.row_duals.assign(model.constraints().size(), 0.0);
  Reduced red = presolve(model, options_.presolve);
  if (red.infeasible) {
    sol.status = SolveStatus::kInfeasible;
    sol.message = red.why;
    return sol;
  }

  std::vector<int> col(n, -1);
  int ncols = 0;
  for (int i = 0; i < n; ++i) {
    if (!red.fixed[i]) col[i] = ncols++;
  }
  const Objective& obj = model.objective();
  double offset = obj.linear.constant();
  std::vector<double> c;
  std::vector<std::pair<int, double>> epi;  // (column of x, q) needing an epigraph
  {
    std::vector<double> q(n, 0.0);
    for (const Term& t : obj.quadratic) q[t.var] += t.coef;
    for (int i = 0; i < n; ++i) {
      if (q[i] == 0.0) continue;
      if (red.fixed[i]) {
        offset += q[i] * red.lo[i] * red.lo[i];
      } else {
        epi.emplace_back(col[i], q[i]);
      }
    }
  }
  const int nepi = static_cast<int>(epi.size());
  const int ntot = ncols + nepi;
  c.assign(ntot, 0.0);
  for (const Term& t : obj.linear.terms()) {
    if (red.fixed[t.var]) {
      offset += t.coef * red.lo[t.var];
    } else {
      c[col[t.var]] += t.coef;
    }
  }
  for (int e = 0; e < nepi; ++e) c[ncols + e] = 1.0;

  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> ta, tg;
  std::vector<double> b, h;
  std::vector<std::pair<int, double>> row_map(model.constraints().size(), {-1, 0.0});  // (A or G index, sign)
  std::vector<char> row_in_a(model.constraints().size(), 0);

  const auto& rows = model.constraints();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (red.dropped[r]) continue;
    const LinearConstraint& row = rows[r];
    double rhs = row.rhs;
    std::vector<std::pair<int, double>> coefs;
    for (const Term& t : row.terms) {
      if (red.fixed[t.var]) {
        rhs -= t.coef * red.lo[t.var];
      } else {
        coefs.emplace_back(col[t.var], t.coef);
      }
    }
    if (coefs.empty()) {
      const double tol = tol_for(rhs);
      const bool bad = (row.relation == Relation::kLessEqual && 0.0 > rhs + tol) ||
                       (row.relation == Relation::kGreaterEqual && 0.0 < rhs - tol) ||
                       (row.relation == Relation::kEqual && std::abs(rhs) > tol);
      if (bad) {
        sol.status = SolveStatus::kInfeasible;
        sol.message = "row " + row.name + " violated by fixed variables";
        return sol;
      }
      continue;
    }
    if (row.relation == Relation::kEqual) {
      const int idx = static_cast<int>(b.size());
      for (auto [j, a] : coefs) ta.emplace_back(idx, j, a);
      b.push_back(rhs);
      row_map[r] = {idx, 1.0};
      row_in_a[r] = 1;
    } else {
      const double sgn = row.relation == Relation::kLessEqual ? 1.0 : -1.0;
      const int idx = static_cast<int>(h.size());
      for (auto [j, a] : coefs) tg.emplace_back(idx, j, sgn * a);
      h.push_back(sgn * rhs);
      row_map[r] = {idx, sgn};
    }
  }
  for (int i = 0; i < n; ++i) {
    if (red.fixed[i]) continue;
    if (std::isfinite(red.lo[i])) {
      tg.emplace_back(static_cast<int>(h.size()), col[i], -1.0);
      h.push_back(-red.lo[i]);
    }
    if (std::isfinite(red.hi[i])) {
      tg.emplace_back(static_cast<int>(h.size()), col[i], 1.0);
      h.push_back(red.hi[i]);
    }
  }
  ConeDims cones;
  cones.nonneg = static_cast<int>(h.size());

  // Cone rows: s = h - G x equals the block's affine expressions.
  auto emit_expr = [&](const LinExpr& e) {
    const int idx = static_cast<int>(h.size());
    double cst = e.constant();
    for (const Term& t : e.terms()) {
      if (red.fixed[t.var]) {
        cst += t.coef * red.lo[t.var];
      } else {
        tg.emplace_back(idx, col[t.var], -t.coef);
      }
    }
    h.push_back(cst);
  };
  auto is_constant = [&](const LinExpr& e, double* value) {
    double v = e.constant();
    for (const Term& t : e.terms()) {
      if (!red.fixed[t.var]) return false;
      v += t.coef * red.lo[t.var];
    }
    *value = v;
    return true;
  };
  for (const SocConstraint& s : model.socs()) {
    double rv = 0.0;
    std::vector<const LinExpr*> live;
    double const_norm2 = 0.0;
    for (const LinExpr& e : s.t) {
      double v;
      if (is_constant(e, &v)) {
        if (v != 0.0) live.push_back(&e);
        const_norm2 += v * v;
      } else {
        live.push_back(&e);
      }
    }
    if (is_constant(s.r, &rv) && std::all_of(live.begin(), live.end(), [&](const LinExpr* e) {
          double v;
          return is_constant(*e, &v);
        })) {
      if (std::sqrt(const_norm2) > rv + tol_for(rv)) {
        sol.status = SolveStatus::kInfeasible;
        sol.message = "cone " + s.name + " violated by fixed variables";
        return sol;
      }
      continue;
    }
    emit_expr(s.r);
    for (const LinExpr* e : live) emit_expr(*e);
    cones.soc.push_back(1 + static_cast<int>(live.size()));
  }
  // q x^2 <= e  <=>  ||(2 sqrt(q) x, e - 1)|| <= e + 1
  for (int k = 0; k < nepi; ++k) {
    const int idx = static_cast<int>(h.size());
    const int ecol = ncols + k;
    tg.emplace_back(idx, ecol, -1.0);
    h.push_back(1.0);
    tg.emplace_back(idx + 1, epi[k].first, -2.0 * std::sqrt(epi[k].second));
    h.push_back(0.0);
    tg.emplace_back(idx + 2, ecol, -1.0);
    h.push_back(-1.0);
    cones.soc.push_back(3);
  }

  ConicProblem prob;
  prob.c = Eigen::Map<Eigen::VectorXd>(c.data(), ntot);
  prob.A.resize(static_cast<int>(b.size()), ntot);
  prob.A.setFromTriplets(ta.begin(), ta.end());
  prob.b = Eigen::Map<Eigen::VectorXd>(b.data(), static_cast<int>(b.size()));
  prob.G.resize(static_cast<int>(h.size()), ntot);
  prob.G.setFromTriplets(tg.begin(), tg.end());
  prob.h = Eigen::Map<Eigen::VectorXd>(h.data(), static_cast<int>(h.size()));
  prob.cones = cones;

  IpmResult res = solve_conic(prob, options_.ipm);
  sol.iterations = res.iterations;
  sol.message = to_string(res.status);
  sol.x.assign(n, 0.0);
  for (int i = 0; i < n; ++i) sol.x[i] = red.fixed[i] ? red.lo[i] : res.x[col[i]];
  auto map_duals = [&](const Eigen::VectorXd& y, const Eigen::VectorXd& z, std::vector<double>& out) {
    out.assign(rows.size(), 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      auto [idx, sgn] = row_map[r];
      if (idx < 0) continue;
      out[r] = row_in_a[r] ? y[idx] : sgn * z[idx];
    }
  };
  switch (res.status) {
    case IpmStatus::kOptimal:
    case IpmStatus::kInaccurateOptimal:
      sol.status = SolveStatus::kOptimal;
      sol.inaccurate = res.status == IpmStatus::kInaccurateOptimal;
      sol.objective = model.objective_value(sol.x);
      sol.dual_bound = res.dual_objective + offset;
      map_duals(res.y, res.z, sol.row_duals);
      break;
    case IpmStatus::kPrimalInfeasible:
      sol.status = SolveStatus::kInfeasible;
      map_duals(res.y, res.z, sol.farkas_rows);
      break;
    case IpmStatus::kDualInfeasible:
      sol.status = SolveStatus::kUnbounded;
      break;
    default:
      sol.status = SolveStatus::kNumerical;
      break;
  }
  return sol;
}

ContinuousSolution solve_continuous(const ModelIR& model, const ContinuousOptions& options) {
  return ConicIpmSubsolver(options).solve(model);
}

}  // namespace acots
