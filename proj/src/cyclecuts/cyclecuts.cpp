#include "acots/cyclecuts.hpp"

#include <algorithm>
#include <cmath>

#include "acots/solver.hpp"

namespace acots {

namespace {

constexpr Relation kLe = Relation::kLessEqual;
constexpr Relation kGe = Relation::kGreaterEqual;
constexpr Relation kEq = Relation::kEqual;

using Interval = std::pair<double, double>;

Interval widen(Interval b) { return {std::min(0.0, b.first), std::max(0.0, b.second)}; }

Interval signed_box(double lo, double hi, int sign) { return sign > 0 ? Interval{lo, hi} : Interval{-hi, -lo}; }

Interval scale(Interval a, double k) { return k >= 0 ? Interval{k * a.first, k * a.second} : Interval{k * a.second, k * a.first}; }

Interval add(Interval a, Interval b) { return {a.first + b.first, a.second + b.second}; }

Interval mul(Interval a, Interval b) { return product_range(a.first, a.second, b.first, b.second); }

std::string block_tag(const CycleBlock& b) { return "cyc" + std::to_string(b.id) + "_" + to_string(b.space); }

CycleIdentity identity(int lhs, double constant, std::vector<std::pair<double, std::vector<int>>> terms) {
  CycleIdentity e;
  e.lhs = lhs;
  e.constant = constant;
  e.terms = std::move(terms);
  return e;
}

// 3-cycle a -> b -> c with coordinates (c_ab, c_bc, c_ac, s_ab, s_bc, s_ac).
std::vector<CycleIdentity> three_cycle_identities(bool trilinear) {
  std::vector<CycleIdentity> ids = {
      identity(2, 0, {{1, {0, 1}}, {-1, {3, 4}}}), identity(5, 0, {{1, {0, 4}}, {1, {1, 3}}}),
      identity(0, 0, {{1, {1, 2}}, {1, {4, 5}}}),  identity(3, 0, {{1, {1, 5}}, {-1, {2, 4}}}),
      identity(1, 0, {{1, {0, 2}}, {1, {3, 5}}}),  identity(4, 0, {{1, {0, 5}}, {-1, {2, 3}}}),
  };
  if (trilinear) {
    ids.push_back(identity(-1, -1, {{1, {0, 1, 2}}, {1, {0, 4, 5}}, {-1, {3, 4, 2}}, {1, {3, 1, 5}}}));
    ids.push_back(identity(-1, 0, {{1, {3, 1, 2}}, {1, {3, 4, 5}}, {1, {0, 4, 2}}, {-1, {0, 1, 5}}}));
  }
  return ids;
}

// 4-cycle i -> j -> k -> l with coordinates (c_ij, c_jk, c_kl, c_il, s_ij, s_jk, s_kl, s_il).
std::vector<CycleIdentity> four_cycle_identities(bool all_permutations) {
  std::vector<CycleIdentity> ids = {
      identity(-1, 0, {{1, {0, 2}}, {-1, {4, 6}}, {-1, {3, 1}}, {-1, {7, 5}}}),
      identity(-1, 0, {{1, {0, 6}}, {1, {4, 2}}, {1, {3, 5}}, {-1, {7, 1}}}),
  };
  if (all_permutations) {
    ids.push_back(identity(-1, 0, {{1, {0, 1}}, {-1, {4, 5}}, {-1, {3, 2}}, {-1, {7, 6}}}));
    ids.push_back(identity(-1, 0, {{1, {4, 1}}, {1, {0, 5}}, {-1, {7, 2}}, {1, {3, 6}}}));
    ids.push_back(identity(-1, 0, {{1, {1, 2}}, {-1, {5, 6}}, {-1, {3, 0}}, {-1, {7, 4}}}));
    ids.push_back(identity(-1, 0, {{1, {5, 2}}, {1, {1, 6}}, {-1, {7, 0}}, {1, {3, 4}}}));
  }
  return ids;
}

double monomial(const std::vector<int>& idx, const std::vector<double>& x) {
  double p = 1.0;
  for (int j : idx) p *= x[j];
  return p;
}

// Range of identity e's product side over the given boxes.
Interval terms_range(const CycleIdentity& e, const std::vector<Interval>& boxes) {
  Interval r{0.0, 0.0};
  for (const auto& [coef, idx] : e.terms) {
    Interval p{1.0, 1.0};
    for (int j : idx) p = mul(p, boxes[j]);
    r = add(r, scale(p, coef));
  }
  return r;
}

std::vector<Interval> union_boxes(const CycleBlock& b) {
  std::vector<Interval> out;
  for (const auto& box : b.x_bounds) out.push_back(widen(box));
  return out;
}

Interval lhs_range(const CycleBlock& b, int e, const std::vector<Interval>& boxes) {
  const CycleIdentity& id = b.identities[e];
  if (id.lhs < 0) return {0.0, 0.0};
  if (id.factor_bus < 0) return boxes[id.lhs];
  return mul(b.factor_w_bounds[e], boxes[id.lhs]);
}

LinExpr zhat(const CycleBlock& b) {
  LinExpr e;
  for (Var z : b.z) e += 1.0 - LinExpr(z);
  return e;
}

// Left-hand side of identity e as a model expression.
LinExpr lhs_expr(const CycleBlock& b, int e) {
  const CycleIdentity& id = b.identities[e];
  if (id.lhs < 0) return LinExpr();
  if (id.factor_bus < 0) return b.x[id.lhs];
  return LinExpr(b.u[e]);
}

bool is_pair(const std::vector<int>& idx) { return idx.size() == 2; }

int pair_index(const CycleBlock& b, int i, int j) {
  for (std::size_t p = 0; p < b.pairs.size(); ++p) {
    if ((b.pairs[p].first == i && b.pairs[p].second == j) || (b.pairs[p].first == j && b.pairs[p].second == i)) {
      return static_cast<int>(p);
    }
  }
  return -1;
}

}  // namespace

const char* to_string(CycleSpace space) { return space == CycleSpace::kCS ? "cs" : "w"; }

std::vector<std::vector<double>> CycleBlock::extreme_matrix() const {
  const std::size_t n = x_bounds.size();
  std::vector<std::vector<double>> rows(std::size_t{1} << n, std::vector<double>(n));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t j = 0; j < n; ++j) rows[k][j] = (k >> j) & 1 ? x_bounds[j].second : x_bounds[j].first;
  }
  return rows;
}

double CycleBlock::identity_terms(int e, const std::vector<double>& xv) const {
  double s = 0.0;
  for (const auto& [coef, idx] : identities[e].terms) s += coef * monomial(idx, xv);
  return s;
}

CycleBlock make_cycle_block(const QcModel& m, const Network& net, const Cycle& cycle, int id, CycleSpace space,
                            const CycleOptions& options) {
  CycleBlock b;
  b.id = id;
  b.cycle = cycle;
  b.space = space;
  const std::size_t n = cycle.arcs.size();
  // Coordinates: cosine-like part of every arc, then the sine-like part, with
  // the closing arc read against the traversal.
  std::vector<LinExpr> cx, sx;
  std::vector<Interval> cb, sb;
  for (std::size_t k = 0; k < n; ++k) {
    const int l = cycle.arcs[k];
    const BranchVars& bv = m.branch[l];
    const TrilinearBox& box = m.boxes[l];
    const int sign = (k + 1 == n ? -1 : 1) * cycle.signs[k];
    b.z.push_back(bv.z);
    if (space == CycleSpace::kCS) {
      cx.push_back(LinExpr(bv.c));
      sx.push_back(sign * LinExpr(bv.s));
      cb.push_back({box.c_lo, box.c_hi});
      sb.push_back(signed_box(box.s_lo, box.s_hi, sign));
    } else {
      const Interval vv = product_range(box.vi_lo, box.vi_hi, box.vj_lo, box.vj_hi);
      cx.push_back(LinExpr(bv.wr));
      sx.push_back(sign * LinExpr(bv.wi));
      cb.push_back(mul(vv, {box.c_lo, box.c_hi}));
      const Interval wi = mul(vv, {box.s_lo, box.s_hi});
      sb.push_back(signed_box(wi.first, wi.second, sign));
    }
  }
  b.x = cx;
  b.x.insert(b.x.end(), sx.begin(), sx.end());
  b.x_bounds = cb;
  b.x_bounds.insert(b.x_bounds.end(), sb.begin(), sb.end());

  if (n == 3) {
    b.identities = three_cycle_identities(space == CycleSpace::kCS && options.include_trilinear_identities);
    if (space == CycleSpace::kW) {
      // Factors w_j, w_k, w_i for the three permutations.
      const int fac[3] = {cycle.vertices[1], cycle.vertices[2], cycle.vertices[0]};
      for (int e = 0; e < 6; ++e) b.identities[e].factor_bus = net.bus_index(fac[e / 2]);
    }
  } else {
    b.identities = four_cycle_identities(space == CycleSpace::kCS);
  }
  for (const CycleIdentity& e : b.identities) {
    for (const auto& term : e.terms) {
      if (!is_pair(term.second)) continue;
      const int i = std::min(term.second[0], term.second[1]), j = std::max(term.second[0], term.second[1]);
      if (pair_index(b, i, j) < 0) b.pairs.emplace_back(i, j);
    }
  }
  std::sort(b.pairs.begin(), b.pairs.end());
  for (const CycleIdentity& e : b.identities) {
    if (e.factor_bus >= 0) {
      const Bus& bus = net.buses[e.factor_bus];
      b.factor_w.push_back(m.bus[e.factor_bus].w);
      b.factor_w_bounds.push_back({bus.v_min * bus.v_min, bus.v_max * bus.v_max});
    } else {
      b.factor_w.push_back(Var{});
      b.factor_w_bounds.push_back({0.0, 0.0});
    }
  }
  b.u.assign(b.identities.size(), Var{});
  return b;
}

void ensure_u_vars(ModelIR& ir, CycleBlock& b) {
  const std::vector<Interval> boxes = union_boxes(b);
  for (std::size_t e = 0; e < b.identities.size(); ++e) {
    const CycleIdentity& id = b.identities[e];
    if (id.factor_bus < 0 || b.u[e].id >= 0) continue;
    const std::string tag = block_tag(b) + "_u[" + std::to_string(e) + "]";
    const Interval xb = boxes[id.lhs], wb = b.factor_w_bounds[e];
    const Interval ub = mul(wb, xb);
    b.u[e] = ir.add_var(tag, ub.first, ub.second);
    const LinExpr u(b.u[e]), w(b.factor_w[e]), x = b.x[id.lhs];
    ir.add_constraint(tag + "_mc1", u, kGe, wb.first * x + xb.first * w - wb.first * xb.first);
    ir.add_constraint(tag + "_mc2", u, kGe, wb.second * x + xb.second * w - wb.second * xb.second);
    ir.add_constraint(tag + "_mc3", u, kLe, wb.first * x + xb.second * w - wb.first * xb.second);
    ir.add_constraint(tag + "_mc4", u, kLe, wb.second * x + xb.first * w - wb.second * xb.first);
  }
}

double cycle_big_m(const CycleBlock& b, int e) {
  const std::vector<Interval> boxes = union_boxes(b);
  const Interval l = lhs_range(b, e, boxes);
  const Interval t = terms_range(b.identities[e], boxes);
  const double c = b.identities[e].constant;
  // Range of L - terms - constant.
  return std::max({0.0, l.second - t.first - c, -(l.first - t.second - c)});
}

void build_bigm_cycle_constraints(ModelIR& ir, CycleBlock& b) {
  ensure_u_vars(ir, b);
  const std::string tag = block_tag(b);
  const std::vector<Interval> boxes = union_boxes(b);
  if (b.pair_vars.empty()) {
    for (std::size_t p = 0; p < b.pairs.size(); ++p) {
      const auto [i, j] = b.pairs[p];
      const Interval xi = boxes[i], xj = boxes[j], r = mul(xi, xj);
      const std::string name = tag + "_pair[" + std::to_string(i) + "," + std::to_string(j) + "]";
      Var v = ir.add_var(name, r.first, r.second);
      b.pair_vars.push_back(v);
      const LinExpr w(v), a = b.x[i], c = b.x[j];
      ir.add_constraint(name + "_mc1", w, kGe, xi.first * c + xj.first * a - xi.first * xj.first);
      ir.add_constraint(name + "_mc2", w, kGe, xi.second * c + xj.second * a - xi.second * xj.second);
      ir.add_constraint(name + "_mc3", w, kLe, xi.first * c + xj.second * a - xi.first * xj.second);
      ir.add_constraint(name + "_mc4", w, kLe, xi.second * c + xj.first * a - xi.second * xj.first);
    }
  }
  const LinExpr zh = zhat(b);
  for (std::size_t e = 0; e < b.identities.size(); ++e) {
    const CycleIdentity& id = b.identities[e];
    bool bilinear = true;
    LinExpr expr = lhs_expr(b, static_cast<int>(e)) - id.constant;
    for (const auto& [coef, idx] : id.terms) {
      if (!is_pair(idx)) {
        bilinear = false;
        break;
      }
      expr.add(b.pair_vars[pair_index(b, idx[0], idx[1])], -coef);
    }
    // Three-term products have no McCormick pair; they live only in the hull.
    if (!bilinear) continue;
    const double big_m = cycle_big_m(b, static_cast<int>(e));
    const std::string name = tag + "_bigm[" + std::to_string(e) + "]";
    ir.add_constraint(name + "_lo", expr, kGe, -big_m * zh);
    ir.add_constraint(name + "_hi", expr, kLe, big_m * zh);
  }
}

void build_cycle_hull(ModelIR& ir, CycleBlock& b) {
  ensure_u_vars(ir, b);
  const std::string tag = block_tag(b);
  const auto xs = b.extreme_matrix();
  const std::size_t n = b.x.size();
  b.y = ir.add_var(tag + "_y", 0.0, 1.0, true);
  const LinExpr y(b.y), off = 1.0 - LinExpr(b.y);
  b.lambdas.clear();
  LinExpr sum;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    b.lambdas.push_back(ir.add_var(tag + "_lam[" + std::to_string(k) + "]", 0.0, 1.0));
    sum.add(b.lambdas.back(), 1.0);
  }
  ir.add_constraint(tag + "_sum", sum, kEq, y);

  const std::vector<Interval> boxes = union_boxes(b);
  for (std::size_t j = 0; j < n; ++j) {
    LinExpr comb;
    for (std::size_t k = 0; k < xs.size(); ++k) comb.add(b.lambdas[k], xs[k][j]);
    const std::string name = tag + "_x[" + std::to_string(j) + "]";
    ir.add_constraint(name + "_lo", b.x[j], kGe, comb + boxes[j].first * off);
    ir.add_constraint(name + "_hi", b.x[j], kLe, comb + boxes[j].second * off);
  }

  b.pair_vars.clear();
  for (const auto& [i, j] : b.pairs) {
    const std::string name = tag + "_pair[" + std::to_string(i) + "," + std::to_string(j) + "]";
    const Interval r = mul(boxes[i], boxes[j]);
    Var v = ir.add_var(name, r.first, r.second);
    b.pair_vars.push_back(v);
    LinExpr comb;
    for (std::size_t k = 0; k < xs.size(); ++k) comb.add(b.lambdas[k], xs[k][i] * xs[k][j]);
    ir.add_constraint(name, LinExpr(v), kEq, comb);
  }

  for (std::size_t e = 0; e < b.identities.size(); ++e) {
    const CycleIdentity& id = b.identities[e];
    LinExpr expr = lhs_expr(b, static_cast<int>(e));
    for (const auto& [coef, idx] : id.terms) {
      if (is_pair(idx)) {
        expr.add(b.pair_vars[pair_index(b, idx[0], idx[1])], -coef);
      } else {
        for (std::size_t k = 0; k < xs.size(); ++k) expr.add(b.lambdas[k], -coef * monomial(idx, xs[k]));
      }
    }
    const Interval l = lhs_range(b, static_cast<int>(e), boxes);
    const std::string name = tag + "_id[" + std::to_string(e) + "]";
    ir.add_constraint(name + "_lo", expr, kGe, id.constant * y + std::min(0.0, l.first) * off);
    ir.add_constraint(name + "_hi", expr, kLe, id.constant * y + std::max(0.0, l.second) * off);
  }

  LinExpr zsum;
  for (Var z : b.z) zsum.add(z, 1.0);
  ir.add_constraint(tag + "_y_lo", y, kGe, 1.0 - zhat(b));
  ir.add_constraint(tag + "_y_hi", static_cast<double>(b.z.size()) * y, kLe, zsum);
}

SeparationPoint separation_point(const CycleBlock& b, const std::vector<double>& values) {
  SeparationPoint p;
  for (const LinExpr& e : b.x) p.x.push_back(e.evaluate(values));
  for (std::size_t e = 0; e < b.identities.size(); ++e) {
    const CycleIdentity& id = b.identities[e];
    if (id.lhs < 0) {
      p.l.push_back(0.0);
    } else if (id.factor_bus < 0) {
      p.l.push_back(p.x[id.lhs]);
    } else if (b.u[e].id >= 0 && b.u[e].id < static_cast<int>(values.size())) {
      p.l.push_back(values[b.u[e].id]);
    } else {
      p.l.push_back(values[b.factor_w[e].id] * p.x[id.lhs]);
    }
  }
  return p;
}

std::optional<Cut> separate(const CycleBlock& b, const SeparationPoint& pt, double violation_tol, std::string* warning) {
  const auto xs = b.extreme_matrix();
  const std::size_t n = b.x.size(), m = b.identities.size();
  // Vertex images (1, X_k, terms(X_k)) and the point image (1, x, l - constant).
  std::vector<std::vector<double>> cols(xs.size(), std::vector<double>(1 + n + m));
  for (std::size_t k = 0; k < xs.size(); ++k) {
    cols[k][0] = 1.0;
    for (std::size_t j = 0; j < n; ++j) cols[k][1 + j] = xs[k][j];
    for (std::size_t e = 0; e < m; ++e) cols[k][1 + n + e] = b.identity_terms(static_cast<int>(e), xs[k]);
  }
  std::vector<double> g(1 + n + m);
  g[0] = 1.0;
  for (std::size_t j = 0; j < n; ++j) g[1 + j] = pt.x[j];
  for (std::size_t e = 0; e < m; ++e) g[1 + n + e] = pt.l[e] - b.identities[e].constant;

  // Normalized Farkas system: max pi . g over pi . col_k <= 0, |pi| <= 1.
  ModelIR lp;
  std::vector<Var> pi;
  for (std::size_t i = 0; i < g.size(); ++i) pi.push_back(lp.add_var("pi[" + std::to_string(i) + "]", -1.0, 1.0));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    LinExpr row;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (cols[k][i] != 0.0) row.add(pi[i], cols[k][i]);
    }
    lp.add_constraint("vertex[" + std::to_string(k) + "]", row, kLe, 0.0);
  }
  LinExpr obj;
  for (std::size_t i = 0; i < g.size(); ++i) obj.add(pi[i], -g[i]);
  lp.objective().linear = obj;
  ContinuousSolution sol = solve_continuous(lp);
  if (sol.status != SolveStatus::kOptimal) {
    if (warning) *warning = std::string("separation LP: ") + to_string(sol.status) + " " + sol.message;
    return std::nullopt;
  }
  if (-sol.objective <= violation_tol) return std::nullopt;

  Cut cut;
  cut.cycle_id = b.id;
  cut.space = b.space;
  cut.beta_x.assign(n, 0.0);
  cut.beta_l.assign(m, 0.0);
  double scale_max = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cut.beta_x[j] = sol.x[pi[1 + j].id];
    scale_max = std::max(scale_max, std::abs(cut.beta_x[j]));
  }
  for (std::size_t e = 0; e < m; ++e) {
    cut.beta_l[e] = b.identities[e].lhs < 0 ? 0.0 : sol.x[pi[1 + n + e].id];
    scale_max = std::max(scale_max, std::abs(cut.beta_l[e]));
  }
  if (scale_max < 1e-9) return std::nullopt;
  for (double& v : cut.beta_x) v /= scale_max;
  for (double& v : cut.beta_l) v /= scale_max;
  // Tightest valid right-hand side: the largest value over the hull's vertices.
  cut.rhs = -kInf;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    double v = 0.0;
    for (std::size_t j = 0; j < n; ++j) v += cut.beta_x[j] * xs[k][j];
    for (std::size_t e = 0; e < m; ++e) v += cut.beta_l[e] * (cols[k][1 + n + e] + b.identities[e].constant);
    cut.rhs = std::max(cut.rhs, v);
  }
  double at = 0.0;
  for (std::size_t j = 0; j < n; ++j) at += cut.beta_x[j] * pt.x[j];
  for (std::size_t e = 0; e < m; ++e) at += cut.beta_l[e] * pt.l[e];
  cut.violation = at - cut.rhs;
  if (cut.violation < violation_tol) return std::nullopt;
  return cut;
}

double cut_validity_gap(const CycleBlock& b, const Cut& cut) {
  const auto xs = b.extreme_matrix();
  const std::size_t n = b.x.size(), m = b.identities.size();
  ModelIR lp;
  std::vector<Var> x, l, lam;
  for (std::size_t j = 0; j < n; ++j) x.push_back(lp.add_var("x[" + std::to_string(j) + "]", -kInf, kInf));
  for (std::size_t e = 0; e < m; ++e) l.push_back(lp.add_var("l[" + std::to_string(e) + "]", -kInf, kInf));
  LinExpr sum;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    lam.push_back(lp.add_var("lam[" + std::to_string(k) + "]", 0.0, kInf));
    sum.add(lam.back(), 1.0);
  }
  lp.add_constraint("sum", sum, kEq, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    LinExpr comb;
    for (std::size_t k = 0; k < xs.size(); ++k) comb.add(lam[k], xs[k][j]);
    lp.add_constraint("x", LinExpr(x[j]), kEq, comb);
  }
  for (std::size_t e = 0; e < m; ++e) {
    LinExpr comb(b.identities[e].constant);
    for (std::size_t k = 0; k < xs.size(); ++k) comb.add(lam[k], b.identity_terms(static_cast<int>(e), xs[k]));
    lp.add_constraint("l", LinExpr(l[e]), kEq, comb);
  }
  LinExpr obj;
  for (std::size_t j = 0; j < n; ++j) obj.add(x[j], -cut.beta_x[j]);
  for (std::size_t e = 0; e < m; ++e) obj.add(l[e], -cut.beta_l[e]);
  lp.objective().linear = obj;
  ContinuousSolution sol = solve_continuous(lp);
  if (sol.status != SolveStatus::kOptimal) return kInf;
  return -sol.objective - cut.rhs;
}

void add_cut(ModelIR& ir, CycleBlock& b, const Cut& cut, bool globalize) {
  ensure_u_vars(ir, b);
  const std::vector<Interval> boxes = union_boxes(b);
  LinExpr expr;
  Interval range{0.0, 0.0};
  for (std::size_t j = 0; j < b.x.size(); ++j) {
    expr += cut.beta_x[j] * b.x[j];
    range = add(range, scale(boxes[j], cut.beta_x[j]));
  }
  for (std::size_t e = 0; e < b.identities.size(); ++e) {
    if (cut.beta_l[e] == 0.0) continue;
    expr += cut.beta_l[e] * lhs_expr(b, static_cast<int>(e));
    range = add(range, scale(lhs_range(b, static_cast<int>(e), boxes), cut.beta_l[e]));
  }
  const std::string name = block_tag(b) + "_cut[" + std::to_string(ir.constraints().size()) + "]";
  if (globalize) {
    const double big_m = std::max(0.0, range.second - cut.rhs);
    ir.add_constraint(name, expr - big_m * zhat(b), kLe, cut.rhs);
  } else {
    ir.add_constraint(name, expr, kLe, cut.rhs);
  }
}

}  // namespace acots
