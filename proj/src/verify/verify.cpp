#include "acots/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "acots/solver.hpp"

namespace acots {

double optimality_gap(double ub, double lb) {
  if (!(lb > 0.0)) throw std::domain_error("optimality gap needs a positive lower bound");
  return (ub - lb) / lb * 100.0;
}

std::map<std::string, double> read_reference_ub(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::map<std::string, double> table;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    table[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
  }
  return table;
}

std::string reference_case_name(const std::string& case_path) {
  std::string stem = std::filesystem::path(case_path).stem().string();
  const std::string prefix = "pglib_opf_";
  if (stem.rfind(prefix, 0) == 0) stem = stem.substr(prefix.size());
  return stem;
}

namespace {

struct Worst {
  RowResidual r;
  void eq(const std::string& row, double lhs, double rhs) { take(row, std::abs(lhs - rhs)); }
  void le(const std::string& row, double lhs, double rhs) { take(row, std::max(0.0, lhs - rhs)); }
  void take(const std::string& row, double v) {
    if (r.row.empty() || v > r.value) r = {v, row};
  }
};

struct Sums {
  double wr = 0, wi = 0, vi_c = 0, vi_s = 0, vj_c = 0, vj_s = 0, c = 0, s = 0, sum_c = 0, sum_s = 0, link = 0;
};

Sums sums(const TrilinearPoint& p, const TrilinearBox& box) {
  Sums t;
  for (int k = 0; k < 8; ++k) {
    const auto xc = extreme_point(box, k, false);
    const auto xs = extreme_point(box, k, true);
    t.wr += p.lc[k] * xc[0] * xc[1] * xc[2];
    t.wi += p.ls[k] * xs[0] * xs[1] * xs[2];
    t.vi_c += p.lc[k] * xc[0];
    t.vi_s += p.ls[k] * xs[0];
    t.vj_c += p.lc[k] * xc[1];
    t.vj_s += p.ls[k] * xs[1];
    t.c += p.lc[k] * xc[2];
    t.s += p.ls[k] * xs[2];
    t.sum_c += p.lc[k];
    t.sum_s += p.ls[k];
    t.link += (p.lc[k] - p.ls[k]) * xc[0] * xc[1];
  }
  return t;
}

void lambda_sign(Worst& w, const TrilinearPoint& p) {
  for (int k = 0; k < 8; ++k) {
    w.le("lc_nonneg", -p.lc[k], 0.0);
    w.le("ls_nonneg", -p.ls[k], 0.0);
  }
}

}  // namespace

RowResidual extreme_point_residual(const TrilinearPoint& p, const TrilinearBox& box) {
  const Sums t = sums(p, box);
  const double off = 1.0 - p.z;
  Worst w;
  w.eq("wr", p.wr, t.wr);
  w.eq("wi", p.wi, t.wi);
  w.le("vi_c_lo", t.vi_c + off * box.vi_lo, p.vi);
  w.le("vi_c_hi", p.vi, t.vi_c + off * box.vi_hi);
  w.le("vi_s_lo", t.vi_s + off * box.vi_lo, p.vi);
  w.le("vi_s_hi", p.vi, t.vi_s + off * box.vi_hi);
  w.le("vj_c_lo", t.vj_c + off * box.vj_lo, p.vj);
  w.le("vj_c_hi", p.vj, t.vj_c + off * box.vj_hi);
  w.le("vj_s_lo", t.vj_s + off * box.vj_lo, p.vj);
  w.le("vj_s_hi", p.vj, t.vj_s + off * box.vj_hi);
  w.eq("c", p.c, t.c);
  w.eq("s", p.s, t.s);
  w.eq("sum_c", t.sum_c, p.z);
  w.eq("sum_s", t.sum_s, p.z);
  w.eq("link", t.link, 0.0);
  w.le("z_lo", -p.z, 0.0);
  w.le("z_hi", p.z, 1.0);
  lambda_sign(w, p);
  return w.r;
}

RowResidual h0_residual(const TrilinearPoint& p, const TrilinearBox& box) {
  Worst w;
  for (auto [name, v] : {std::pair<const char*, double>{"wr", p.wr}, {"wi", p.wi}, {"c", p.c}, {"s", p.s}, {"z", p.z}}) {
    w.eq(name, v, 0.0);
  }
  for (int k = 0; k < 8; ++k) {
    w.eq("lc", p.lc[k], 0.0);
    w.eq("ls", p.ls[k], 0.0);
  }
  w.le("vi_lo", box.vi_lo, p.vi);
  w.le("vi_hi", p.vi, box.vi_hi);
  w.le("vj_lo", box.vj_lo, p.vj);
  w.le("vj_hi", p.vj, box.vj_hi);
  return w.r;
}

RowResidual h1_residual(const TrilinearPoint& p, const TrilinearBox& box) {
  const Sums t = sums(p, box);
  Worst w;
  w.eq("z", p.z, 1.0);
  w.eq("wr", p.wr, t.wr);
  w.eq("wi", p.wi, t.wi);
  w.eq("c", p.c, t.c);
  w.eq("s", p.s, t.s);
  w.eq("link", t.link, 0.0);
  w.eq("vi_c", p.vi, t.vi_c);
  w.eq("vi_s", p.vi, t.vi_s);
  w.eq("vj_c", p.vj, t.vj_c);
  w.eq("vj_s", p.vj, t.vj_s);
  w.eq("sum_c", t.sum_c, 1.0);
  w.eq("sum_s", t.sum_s, 1.0);
  lambda_sign(w, p);
  return w.r;
}

double DecompositionResult::max() const { return std::max({h0, h1, recombination}); }

DecompositionResult check_theorem1(const TrilinearPoint& p, const TrilinearBox& box, double tol) {
  if (!(p.z > 0.0 && p.z < 1.0)) throw std::invalid_argument("z must lie in (0, 1)");
  const RowResidual pre = extreme_point_residual(p, box);
  if (pre.value > tol) throw std::invalid_argument("point violates " + pre.row + " by " + std::to_string(pre.value));
  const Sums t = sums(p, box);
  const double z = p.z;
  DecompositionResult d;
  d.eta0.vi = (p.vi - t.vi_c) / (1.0 - z);
  d.eta0.vj = (p.vj - t.vj_c) / (1.0 - z);
  d.eta1.wr = p.wr / z;
  d.eta1.wi = p.wi / z;
  d.eta1.c = p.c / z;
  d.eta1.s = p.s / z;
  for (int k = 0; k < 8; ++k) {
    d.eta1.lc[k] = p.lc[k] / z;
    d.eta1.ls[k] = p.ls[k] / z;
  }
  d.eta1.z = 1.0;
  d.eta1.vi = t.vi_c / z;
  d.eta1.vj = t.vj_c / z;
  d.h0 = h0_residual(d.eta0, box).value;
  d.h1 = h1_residual(d.eta1, box).value;

  auto flat = [](const TrilinearPoint& q) {
    std::vector<double> v{q.wr, q.wi, q.c, q.s};
    v.insert(v.end(), q.lc.begin(), q.lc.end());
    v.insert(v.end(), q.ls.begin(), q.ls.end());
    v.insert(v.end(), {q.z, q.vi, q.vj});
    return v;
  };
  const auto a = flat(d.eta0), b = flat(d.eta1), x = flat(p);
  for (std::size_t i = 0; i < x.size(); ++i) {
    d.recombination = std::max(d.recombination, std::abs((1.0 - z) * a[i] + z * b[i] - x[i]));
  }
  return d;
}

CycleResiduals cycle3_residuals(const std::array<double, 3>& c, const std::array<double, 3>& s) {
  // Index 0: ij, 1: jk, 2: ik.
  CycleResiduals r;
  r.sum_form = std::max(std::abs(c[2] - (c[0] * c[1] - s[0] * s[1])), std::abs(s[2] - (c[0] * s[1] + s[0] * c[1])));
  const double one = c[0] * c[1] * c[2] + c[0] * s[1] * s[2] - s[0] * s[1] * c[2] + s[0] * c[1] * s[2];
  const double zero = s[0] * c[1] * c[2] + s[0] * s[1] * s[2] + c[0] * s[1] * c[2] - c[0] * c[1] * s[2];
  r.product_form = std::max(std::abs(one - 1.0), std::abs(zero));
  return r;
}

bool check_prop1(double theta_ij, double theta_jk) {
  const double theta_ik = theta_ij + theta_jk;
  const CycleResiduals r = cycle3_residuals({std::cos(theta_ij), std::cos(theta_jk), std::cos(theta_ik)},
                                            {std::sin(theta_ij), std::sin(theta_jk), std::sin(theta_ik)});
  return r.sum_form <= 1e-12 && r.product_form <= 1e-12;
}

double brute_force_hull_bound(const TrilinearBox& box, const HullObjective& f, int grid_n) {
  if (grid_n < 2) throw std::invalid_argument("grid_n must be at least 2");
  auto at = [grid_n](double lo, double hi, int k) { return lo + (hi - lo) * k / (grid_n - 1); };
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < grid_n; ++a) {
    const double vi = at(box.vi_lo, box.vi_hi, a);
    for (int b = 0; b < grid_n; ++b) {
      const double vj = at(box.vj_lo, box.vj_hi, b);
      for (int c = 0; c < grid_n; ++c) {
        const double cv = at(box.c_lo, box.c_hi, c);
        for (int d = 0; d < grid_n; ++d) {
          const double sv = at(box.s_lo, box.s_hi, d);
          const double value = f[0] * vi + f[1] * vj + f[2] * cv + f[3] * sv + f[4] * vi * vj * cv + f[5] * vi * vj * sv;
          best = std::min(best, value);
        }
      }
    }
  }
  return best;
}

double relaxation_hull_bound(const TrilinearBox& box, const HullObjective& f, TrilinearRelaxation kind) {
  ModelIR ir;
  TrilinearVars t;
  t.vi = ir.add_var("vi", box.vi_lo, box.vi_hi);
  t.vj = ir.add_var("vj", box.vj_lo, box.vj_hi);
  t.c = ir.add_var("c", box.c_lo, box.c_hi);
  t.s = ir.add_var("s", box.s_lo, box.s_hi);
  t.wr = ir.add_var("wr", -kInf, kInf);
  t.wi = ir.add_var("wi", -kInf, kInf);
  t.z = ir.add_var("z", 1.0, 1.0);
  if (kind == TrilinearRelaxation::kExtremePoint) {
    add_extreme_point_block(ir, t, box, "");
  } else {
    add_mccormick_block(ir, t, box, "");
  }
  ir.objective().linear = LinExpr()
                              .add(t.vi, f[0])
                              .add(t.vj, f[1])
                              .add(t.c, f[2])
                              .add(t.s, f[3])
                              .add(t.wr, f[4])
                              .add(t.wi, f[5]);
  ContinuousSolution sol = solve_continuous(ir);
  if (sol.status != SolveStatus::kOptimal) {
    throw std::runtime_error(std::string("hull bound LP: ") + to_string(sol.status) + " " + sol.message);
  }
  return sol.objective;
}

ViolationReport check_nonconvex_feasibility(const Network& net, const NonconvexPoint& pt, double tol) {
  const std::size_t nb = net.buses.size(), nl = net.branches.size(), ng = net.generators.size();
  auto need = [](const std::vector<double>& v, std::size_t n, const char* name) {
    if (v.size() != n) throw std::invalid_argument(std::string("point has wrong length for ") + name);
  };
  need(pt.vm, nb, "vm");
  need(pt.va, nb, "va");
  need(pt.p_fr, nl, "p_fr");
  need(pt.q_fr, nl, "q_fr");
  need(pt.p_to, nl, "p_to");
  need(pt.q_to, nl, "q_to");
  need(pt.pg, ng, "pg");
  need(pt.qg, ng, "qg");
  if (pt.z.size() != nl) throw std::invalid_argument("point has wrong length for z");
  if (!pt.w.empty()) need(pt.w, nb, "w");
  if (!pt.wr.empty()) need(pt.wr, nl, "wr");
  if (!pt.wi.empty()) need(pt.wi, nl, "wi");

  using C = std::complex<double>;
  ViolationReport rep;
  for (const char* f : {"balance", "flow_fr", "flow_to", "w", "W"}) rep.max_residual[f] = 0.0;
  auto record = [&](const char* family, std::size_t index, double value) {
    double& m = rep.max_residual[family];
    m = std::max(m, value);
    if (rep.worst.empty() || value > rep.worst_value) {
      rep.worst_value = value;
      rep.worst = std::string(family) + "[" + std::to_string(index) + "]";
    }
  };

  std::vector<double> w(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    w[i] = pt.w.empty() ? pt.vm[i] * pt.vm[i] : pt.w[i];
    record("w", i, std::abs(w[i] - pt.vm[i] * pt.vm[i]));
  }

  std::vector<C> injection(nb);
  for (std::size_t g = 0; g < ng; ++g) injection[net.bus_index(net.generators[g].bus)] += C(pt.pg[g], pt.qg[g]);
  for (std::size_t i = 0; i < nb; ++i) {
    const Bus& b = net.buses[i];
    injection[i] -= C(b.demand_p, b.demand_q) + std::conj(C(b.shunt_g, b.shunt_b)) * w[i];
  }

  for (std::size_t l = 0; l < nl; ++l) {
    const Branch& br = net.branches[l];
    const int i = net.bus_index(br.from), j = net.bus_index(br.to);
    const double z = pt.z[l];
    const C y(br.g, br.b), yc(br.g_c, br.b_c), tap(br.tap_re, br.tap_im);
    const C exact = z * std::polar(pt.vm[i] * pt.vm[j], pt.va[i] - pt.va[j]);
    const C W(pt.wr.empty() ? exact.real() : pt.wr[l], pt.wi.empty() ? exact.imag() : pt.wi[l]);
    record("W", l, std::abs(W - exact));
    const C s_fr = std::conj(y + yc) * w[i] / std::norm(tap) * z - std::conj(y) * W / tap;
    const C s_to = std::conj(y + yc) * w[j] * z - std::conj(y) * std::conj(W) / std::conj(tap);
    record("flow_fr", l, std::abs(s_fr - C(pt.p_fr[l], pt.q_fr[l])));
    record("flow_to", l, std::abs(s_to - C(pt.p_to[l], pt.q_to[l])));
    injection[i] -= C(pt.p_fr[l], pt.q_fr[l]);
    injection[j] -= C(pt.p_to[l], pt.q_to[l]);
  }
  for (std::size_t i = 0; i < nb; ++i) record("balance", i, std::abs(injection[i]));
  rep.feasible = rep.worst_value <= tol;
  return rep;
}

TrilinearBox random_trilinear_box(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TrilinearBox b;
  b.vi_lo = 0.8 + 0.15 * u(rng);
  b.vi_hi = b.vi_lo + 0.02 + 0.2 * u(rng);
  b.vj_lo = 0.8 + 0.15 * u(rng);
  b.vj_hi = b.vj_lo + 0.02 + 0.2 * u(rng);
  const double lo = -std::numbers::pi / 2 * u(rng), hi = std::numbers::pi / 2 * u(rng);
  b.c_lo = std::min(std::cos(lo), std::cos(hi));
  b.c_hi = 1.0;
  b.s_lo = std::sin(lo);
  b.s_hi = std::sin(hi);
  return b;
}

// Vertex of H for a random objective with z restricted to [zlo, zhi]. The LP
// answer is snapped so that sums hold to rounding: lambdas clipped at 0, the
// lambda^s pairs rescaled to the lambda^c pair masses, and w, c, s, v_i, v_j
// recomputed from the lambdas.
TrilinearPoint sample_h_point(std::mt19937& rng, const TrilinearBox& box, double zlo, double zhi) {
  std::normal_distribution<double> n(0.0, 1.0);
  ModelIR ir;
  TrilinearVars t;
  t.vi = ir.add_var("vi", box.vi_lo, box.vi_hi);
  t.vj = ir.add_var("vj", box.vj_lo, box.vj_hi);
  t.c = ir.add_var("c", std::min(0.0, box.c_lo), std::max(0.0, box.c_hi));
  t.s = ir.add_var("s", std::min(0.0, box.s_lo), std::max(0.0, box.s_hi));
  t.wr = ir.add_var("wr", -10, 10);
  t.wi = ir.add_var("wi", -10, 10);
  t.z = ir.add_var("z", zlo, zhi);
  add_extreme_point_block(ir, t, box, "");
  for (int v = 0; v < ir.num_vars(); ++v) ir.objective().linear.add(Var{v}, n(rng));
  ContinuousSolution sol = solve_continuous(ir);
  if (sol.status != SolveStatus::kOptimal) throw std::runtime_error(std::string("sampling LP: ") + to_string(sol.status));
  TrilinearPoint p;
  for (int k = 0; k < 8; ++k) {
    p.lc[k] = std::max(0.0, sol.x[t.lc[k].id]);
    p.ls[k] = std::max(0.0, sol.x[t.ls[k].id]);
  }
  for (int q = 0; q < 4; ++q) {
    const double mc = p.lc[2 * q] + p.lc[2 * q + 1], ms = p.ls[2 * q] + p.ls[2 * q + 1];
    if (ms > 0) {
      p.ls[2 * q] *= mc / ms;
      p.ls[2 * q + 1] *= mc / ms;
    } else {
      p.ls[2 * q] = mc;
    }
  }
  double vi = 0, vj = 0;
  for (int k = 0; k < 8; ++k) {
    const auto xc = extreme_point(box, k, false);
    const auto xs = extreme_point(box, k, true);
    p.z += p.lc[k];
    p.wr += p.lc[k] * xc[0] * xc[1] * xc[2];
    p.wi += p.ls[k] * xs[0] * xs[1] * xs[2];
    p.c += p.lc[k] * xc[2];
    p.s += p.ls[k] * xs[2];
    vi += p.lc[k] * xc[0];
    vj += p.lc[k] * xc[1];
  }
  const double off = 1.0 - p.z;
  p.vi = std::clamp(sol.x[t.vi.id], vi + off * box.vi_lo, vi + off * box.vi_hi);
  p.vj = std::clamp(sol.x[t.vj.id], vj + off * box.vj_lo, vj + off * box.vj_hi);
  return p;
}

}  // namespace acots
