#include "acots/qcmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace acots {

namespace {

std::string idx(const char* name, int i) { return std::string(name) + "[" + std::to_string(i) + "]"; }

constexpr Relation kLe = Relation::kLessEqual;
constexpr Relation kGe = Relation::kGreaterEqual;
constexpr Relation kEq = Relation::kEqual;

}  // namespace

std::pair<double, double> product_range(double a_lo, double a_hi, double b_lo, double b_hi) {
  const double p[4] = {a_lo * b_lo, a_lo * b_hi, a_hi * b_lo, a_hi * b_hi};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

std::array<double, 3> extreme_point(const TrilinearBox& box, int k, bool sine) {
  const double vi = (k & 4) ? box.vi_hi : box.vi_lo;
  const double vj = (k & 2) ? box.vj_hi : box.vj_lo;
  const double t = sine ? ((k & 1) ? box.s_hi : box.s_lo) : ((k & 1) ? box.c_hi : box.c_lo);
  return {vi, vj, t};
}

void add_flow_block(QcModel& m, const Network& net, int l, const FormulationOptions& options) {
  ModelIR& ir = m.ir;
  const Branch& br = net.branches[l];
  BranchVars& bv = m.branch[l];
  const int fi = net.bus_index(br.from), ti = net.bus_index(br.to);
  const Bus& bf = net.buses[fi];
  const Bus& bt = net.buses[ti];
  const double tm = br.tap_sq();
  const double tr = br.tap_re, tt = br.tap_im, g = br.g, b = br.b;
  const Var wf = m.bus[fi].w, wt = m.bus[ti].w;

  // Linearized flows with w^z.
  ir.add_constraint(idx("p_fr_def", l),
                    LinExpr(bv.p_fr),
                    kEq,
                    LinExpr().add(bv.wz_fr, (g + br.g_c) / tm).add(bv.wr, -(g * tr - b * tt) / tm).add(bv.wi, -(g * tt + b * tr) / tm));
  ir.add_constraint(idx("q_fr_def", l),
                    LinExpr(bv.q_fr),
                    kEq,
                    LinExpr().add(bv.wz_fr, -(b + br.b_c) / tm).add(bv.wr, (g * tt + b * tr) / tm).add(bv.wi, -(g * tr - b * tt) / tm));
  ir.add_constraint(idx("p_to_def", l),
                    LinExpr(bv.p_to),
                    kEq,
                    LinExpr().add(bv.wz_to, g + br.g_c).add(bv.wr, -(g * tr + b * tt) / tm).add(bv.wi, -(g * tt - b * tr) / tm));
  ir.add_constraint(idx("q_to_def", l),
                    LinExpr(bv.q_to),
                    kEq,
                    LinExpr().add(bv.wz_to, -(b + br.b_c)).add(bv.wr, -(g * tt - b * tr) / tm).add(bv.wi, (g * tr + b * tt) / tm));

  // w^z tracks w when on.
  const double vf_lo2 = bf.v_min * bf.v_min, vf_hi2 = bf.v_max * bf.v_max;
  const double vt_lo2 = bt.v_min * bt.v_min, vt_hi2 = bt.v_max * bt.v_max;
  ir.add_constraint(idx("wz_fr_lo", l), LinExpr(bv.wz_fr), kGe, wf - vf_hi2 * (1.0 - LinExpr(bv.z)));
  ir.add_constraint(idx("wz_fr_hi", l), LinExpr(bv.wz_fr), kLe, wf - vf_lo2 * (1.0 - LinExpr(bv.z)));
  ir.add_constraint(idx("wz_to_lo", l), LinExpr(bv.wz_to), kGe, wt - vt_hi2 * (1.0 - LinExpr(bv.z)));
  ir.add_constraint(idx("wz_to_hi", l), LinExpr(bv.wz_to), kLe, wt - vt_lo2 * (1.0 - LinExpr(bv.z)));
  const bool e = options.tier == Tier::kE;
  ir.add_constraint(idx("wz_fr_on_lo", l), LinExpr(bv.wz_fr), kGe, (e ? vf_lo2 : 0.0) * LinExpr(bv.z));
  ir.add_constraint(idx("wz_fr_on_hi", l), LinExpr(bv.wz_fr), kLe, vf_hi2 * LinExpr(bv.z));
  ir.add_constraint(idx("wz_to_on_lo", l), LinExpr(bv.wz_to), kGe, (e ? vt_lo2 : 0.0) * LinExpr(bv.z));
  ir.add_constraint(idx("wz_to_on_hi", l), LinExpr(bv.wz_to), kLe, vt_hi2 * LinExpr(bv.z));

  // Thermal limits as ||(p, q)|| <= s_max z.
  if (br.s_max > 0.0) {
    ir.add_soc(idx("thermal_fr", l), {LinExpr(bv.p_fr), LinExpr(bv.q_fr)}, br.s_max * LinExpr(bv.z));
    ir.add_soc(idx("thermal_to", l), {LinExpr(bv.p_to), LinExpr(bv.q_to)}, br.s_max * LinExpr(bv.z));
  }
}

void add_trig_envelopes(QcModel& m, const Network& net, const LineConstants& k, int l, const FormulationOptions& options) {
  ModelIR& ir = m.ir;
  const Branch& br = net.branches[l];
  const BranchVars& bv = m.branch[l];
  const double lo = br.theta_min, hi = br.theta_max, tu = k.theta_u[l], tm = k.theta_big_m;
  const LinExpr z(bv.z), off = 1.0 - LinExpr(bv.z);

  // Angle difference bounds gated by z.
  ir.add_constraint(idx("theta_on_lo", l), LinExpr(bv.theta), kGe, lo * z - tm * off);
  ir.add_constraint(idx("theta_on_hi", l), LinExpr(bv.theta), kLe, hi * z + tm * off);

  // Cosine.
  const double cc = k.cos_chord[l];
  if (options.tier == Tier::kE) {
    ir.add_constraint(idx("cos_chord", l), -LinExpr(bv.c) + cc * LinExpr(bv.theta), kLe,
                      (cc * lo - std::cos(lo)) * z + std::abs(cc) * tm * off);
  }
  const double curv = tu > 1e-8 ? (1.0 - std::cos(tu)) / (tu * tu) : 0.5;
  // curv * theta^2 <= z - c + curv * tm^2 (1 - z)
  const LinExpr rhs = z - LinExpr(bv.c) + curv * tm * tm * off;
  ir.add_soc(idx("cos_quad", l), {2.0 * std::sqrt(curv) * LinExpr(bv.theta), rhs - 1.0}, rhs + 1.0);
  ir.add_constraint(idx("c_lo", l), LinExpr(bv.c), kGe, k.c_min[l] * z);
  ir.add_constraint(idx("c_hi", l), LinExpr(bv.c), kLe, k.c_max[l] * z);

  // Sine.
  const double ch = std::cos(tu / 2), sh = std::sin(tu / 2), sc = k.sin_chord[l];
  const LinExpr tangent = (sh - ch * tu / 2) * z + ch * tm * off;
  if (hi >= 0.0) ir.add_constraint(idx("sin_tan_hi", l), LinExpr(bv.s) - ch * LinExpr(bv.theta), kLe, tangent);
  if (lo <= 0.0) ir.add_constraint(idx("sin_tan_lo", l), -LinExpr(bv.s) + ch * LinExpr(bv.theta), kLe, tangent);
  if (hi <= 0.0) {
    ir.add_constraint(idx("sin_chord_hi", l), LinExpr(bv.s) - sc * LinExpr(bv.theta), kLe,
                      (-sc * lo + std::sin(lo)) * z + sc * tm * off);
  }
  if (lo >= 0.0) {
    ir.add_constraint(idx("sin_chord_lo", l), -LinExpr(bv.s) + sc * LinExpr(bv.theta), kLe,
                      (sc * lo - std::sin(lo)) * z + sc * tm * off);
  }
  ir.add_constraint(idx("s_lo", l), LinExpr(bv.s), kGe, k.s_min[l] * z);
  ir.add_constraint(idx("s_hi", l), LinExpr(bv.s), kLe, k.s_max[l] * z);
}

void add_extreme_point_block(ModelIR& ir, TrilinearVars& t, const TrilinearBox& box, const std::string& tag) {
  LinExpr wr, wi, vi_c, vi_s, vj_c, vj_s, c, s, sum_c, sum_s;
  for (int k = 0; k < 8; ++k) {
    t.lc[k] = ir.add_var("lc" + tag + "[" + std::to_string(k) + "]", 0.0, 1.0);
    t.ls[k] = ir.add_var("ls" + tag + "[" + std::to_string(k) + "]", 0.0, 1.0);
    const auto xc = extreme_point(box, k, false);
    const auto xs = extreme_point(box, k, true);
    wr.add(t.lc[k], xc[0] * xc[1] * xc[2]);
    wi.add(t.ls[k], xs[0] * xs[1] * xs[2]);
    vi_c.add(t.lc[k], xc[0]);
    vi_s.add(t.ls[k], xs[0]);
    vj_c.add(t.lc[k], xc[1]);
    vj_s.add(t.ls[k], xs[1]);
    c.add(t.lc[k], xc[2]);
    s.add(t.ls[k], xs[2]);
    sum_c.add(t.lc[k], 1.0);
    sum_s.add(t.ls[k], 1.0);
  }
  const LinExpr off = 1.0 - LinExpr(t.z);
  ir.add_constraint("ep_wr" + tag, LinExpr(t.wr), kEq, wr);
  ir.add_constraint("ep_wi" + tag, LinExpr(t.wi), kEq, wi);
  ir.add_constraint("ep_vi_c_lo" + tag, LinExpr(t.vi), kGe, vi_c + box.vi_lo * off);
  ir.add_constraint("ep_vi_c_hi" + tag, LinExpr(t.vi), kLe, vi_c + box.vi_hi * off);
  ir.add_constraint("ep_vi_s_lo" + tag, LinExpr(t.vi), kGe, vi_s + box.vi_lo * off);
  ir.add_constraint("ep_vi_s_hi" + tag, LinExpr(t.vi), kLe, vi_s + box.vi_hi * off);
  ir.add_constraint("ep_vj_c_lo" + tag, LinExpr(t.vj), kGe, vj_c + box.vj_lo * off);
  ir.add_constraint("ep_vj_c_hi" + tag, LinExpr(t.vj), kLe, vj_c + box.vj_hi * off);
  ir.add_constraint("ep_vj_s_lo" + tag, LinExpr(t.vj), kGe, vj_s + box.vj_lo * off);
  ir.add_constraint("ep_vj_s_hi" + tag, LinExpr(t.vj), kLe, vj_s + box.vj_hi * off);
  ir.add_constraint("ep_c" + tag, LinExpr(t.c), kEq, c);
  ir.add_constraint("ep_s" + tag, LinExpr(t.s), kEq, s);
  ir.add_constraint("ep_sum_c" + tag, sum_c, kEq, LinExpr(t.z));
  ir.add_constraint("ep_sum_s" + tag, sum_s, kEq, LinExpr(t.z));
  // Shared v_i v_j corners: pairs (2q, 2q+1) have the same (v_i, v_j).
  LinExpr link;
  for (int q = 0; q < 4; ++q) {
    const auto x = extreme_point(box, 2 * q, false);
    const double prod = x[0] * x[1];
    link.add(t.lc[2 * q], prod).add(t.lc[2 * q + 1], prod).add(t.ls[2 * q], -prod).add(t.ls[2 * q + 1], -prod);
  }
  ir.add_constraint("ep_link" + tag, link, kEq, 0.0);
}

void add_onoff_product(ModelIR& ir, Var w, Var x, Var y, Var z, const OnOffBox& box, const std::string& tag) {
  const LinExpr off = 1.0 - LinExpr(z);
  // Off state: w = 0, x and y either zero or free in their boxes. Each row gets
  // the smallest slack that keeps every off point feasible.
  std::vector<std::pair<double, double>> corners;
  for (double xv : box.x_zero_off ? std::vector<double>{0.0} : std::vector<double>{box.x_lo, box.x_hi}) {
    for (double yv : box.y_zero_off ? std::vector<double>{0.0} : std::vector<double>{box.y_lo, box.y_hi}) {
      corners.emplace_back(xv, yv);
    }
  }
  // sense +1: w >= a y + b x - a b; sense -1: w <= a y + b x - a b.
  auto row = [&](const char* name, double a, double b, int sense) {
    double m = 0.0;
    for (auto [xv, yv] : corners) m = std::max(m, sense * (a * yv + b * xv - a * b));
    const LinExpr under = a * LinExpr(y) + b * LinExpr(x) - a * b;
    if (sense > 0) {
      ir.add_constraint(name + tag, LinExpr(w), kGe, under - m * off);
    } else {
      ir.add_constraint(name + tag, LinExpr(w), kLe, under + m * off);
    }
  };
  row("mc1", box.x_lo, box.y_lo, 1);
  row("mc2", box.x_hi, box.y_hi, 1);
  row("mc3", box.x_lo, box.y_hi, -1);
  row("mc4", box.x_hi, box.y_lo, -1);
  const auto [lo, hi] = product_range(box.x_lo, box.x_hi, box.y_lo, box.y_hi);
  ir.add_constraint("mc_lo" + tag, LinExpr(w), kGe, std::min(0.0, lo) * LinExpr(z));
  ir.add_constraint("mc_hi" + tag, LinExpr(w), kLe, std::max(0.0, hi) * LinExpr(z));
}

void add_mccormick_block(ModelIR& ir, TrilinearVars& t, const TrilinearBox& box, const std::string& tag) {
  const auto [vv_lo, vv_hi] = product_range(box.vi_lo, box.vi_hi, box.vj_lo, box.vj_hi);
  t.vv = ir.add_var("vv" + tag, std::min(0.0, vv_lo), std::max(0.0, vv_hi));
  add_onoff_product(ir, t.vv, t.vi, t.vj, t.z, {box.vi_lo, box.vi_hi, box.vj_lo, box.vj_hi, false, false}, "_vv" + tag);
  add_onoff_product(ir, t.wr, t.vv, t.c, t.z, {vv_lo, vv_hi, box.c_lo, box.c_hi, true, true}, "_wr" + tag);
  add_onoff_product(ir, t.wi, t.vv, t.s, t.z, {vv_lo, vv_hi, box.s_lo, box.s_hi, true, true}, "_wi" + tag);
}

void add_valid_inequalities(QcModel& m, const Network& net, int l, const FormulationOptions& options) {
  ModelIR& ir = m.ir;
  const Branch& br = net.branches[l];
  const BranchVars& bv = m.branch[l];
  const int fi = net.bus_index(br.from), ti = net.bus_index(br.to);
  const Bus& bf = net.buses[fi];
  const Bus& bt = net.buses[ti];
  const double lo = br.theta_min, hi = br.theta_max;

  ir.add_constraint(idx("pad_lo", l), std::tan(lo) * LinExpr(bv.wr), kLe, LinExpr(bv.wi));
  ir.add_constraint(idx("pad_hi", l), LinExpr(bv.wi), kLe, std::tan(hi) * LinExpr(bv.wr));
  if (options.tier == Tier::kE && options.include_lifted_nonlinear_cuts) {
    const double sf = bf.v_min + bf.v_max, st = bt.v_min + bt.v_max;
    const double phi = (hi + lo) / 2, del = (hi - lo) / 2, cd = std::cos(del);
    const double s_fr_term = options.lnc_printed_form ? sf : st;
    const LinExpr lifted = sf * st * (std::cos(phi) * LinExpr(bv.wr) + std::sin(phi) * LinExpr(bv.wi));
    ir.add_constraint(idx("lnc1", l),
                      lifted - bt.v_max * cd * s_fr_term * LinExpr(bv.wz_fr) - bf.v_max * cd * sf * LinExpr(bv.wz_to), kGe,
                      bf.v_max * bt.v_max * cd * (bf.v_min * bt.v_min - bf.v_max * bt.v_max) * LinExpr(bv.z));
    ir.add_constraint(idx("lnc2", l),
                      lifted - bt.v_min * cd * s_fr_term * LinExpr(bv.wz_fr) - bf.v_min * cd * sf * LinExpr(bv.wz_to), kGe,
                      bf.v_min * bt.v_min * cd * (bf.v_max * bt.v_max - bf.v_min * bt.v_min) * LinExpr(bv.z));
  }

  if (options.include_current_constraints) {
    const double tm = br.tap_sq();
    const double y2 = br.g * br.g + br.b * br.b, yc2 = br.g_c * br.g_c + br.b_c * br.b_c;
    const LinExpr wt = (1.0 / tm) * LinExpr(m.bus[fi].w);
    // p^2 + q^2 <= (w_i / |T|^2) l
    ir.add_soc(idx("current_soc", l), {2.0 * LinExpr(bv.p_fr), 2.0 * LinExpr(bv.q_fr), wt - LinExpr(bv.l)},
               wt + LinExpr(bv.l));
    LinExpr def = y2 * ((1.0 / tm) * LinExpr(bv.wz_fr) + LinExpr(bv.wz_to) -
                        (2.0 / tm) * (br.tap_re * LinExpr(bv.wr) + br.tap_im * LinExpr(bv.wi)));
    def -= (yc2 / tm) * LinExpr(bv.wz_fr);
    def += 2.0 * (br.g_c * LinExpr(bv.p_fr) - br.b_c * LinExpr(bv.q_fr));
    ir.add_constraint(idx("current_def", l), LinExpr(bv.l), kEq, def);
    if (br.i_sq_max > 0.0) ir.add_constraint(idx("current_max", l), LinExpr(bv.l), kLe, br.i_sq_max);
  }
}

QcModel build_model(const Network& net, const LineConstants& k, const FormulationOptions& options) {
  QcModel m;
  ModelIR& ir = m.ir;
  const double base = net.base_mva;
  m.theta_big_m = k.theta_big_m;

  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    const Bus& b = net.buses[i];
    BusVars bv;
    bv.v = ir.add_var(idx("v", b.id), b.v_min, b.v_max);
    bv.w = ir.add_var(idx("w", b.id), b.v_min * b.v_min, b.v_max * b.v_max);
    const bool ref = net.ref_buses.count(b.id) > 0;
    bv.theta = ir.add_var(idx("theta", b.id), ref ? 0.0 : -kInf, ref ? 0.0 : kInf);
    m.bus.push_back(bv);
    // w >= v^2 and its secant.
    ir.add_soc(idx("w_sqr", b.id), {2.0 * LinExpr(bv.v), LinExpr(bv.w) - 1.0}, LinExpr(bv.w) + 1.0);
    ir.add_constraint(idx("w_secant", b.id), LinExpr(bv.w), kLe, (b.v_min + b.v_max) * LinExpr(bv.v) - b.v_min * b.v_max);
  }

  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    const Generator& gen = net.generators[g];
    m.pg.push_back(ir.add_var(idx("pg", static_cast<int>(g)), gen.p_min, gen.p_max));
    m.qg.push_back(ir.add_var(idx("qg", static_cast<int>(g)), gen.q_min, gen.q_max));
  }

  for (std::size_t li = 0; li < net.branches.size(); ++li) {
    const int l = static_cast<int>(li);
    const Branch& br = net.branches[l];
    const int fi = net.bus_index(br.from), ti = net.bus_index(br.to);
    const Bus& bf = net.buses[fi];
    const Bus& bt = net.buses[ti];
    BranchVars bv;
    bv.z = ir.add_var(idx("z", l), options.all_lines_on ? 1.0 : 0.0, 1.0, true);
    bv.theta = ir.add_var(idx("theta_ij", l), std::min(br.theta_min, -k.theta_big_m), std::max(br.theta_max, k.theta_big_m));
    TrilinearBox box{bf.v_min, bf.v_max, bt.v_min, bt.v_max, k.c_min[l], k.c_max[l], k.s_min[l], k.s_max[l]};
    m.boxes.push_back(box);
    bv.c = ir.add_var(idx("c", l), std::min(0.0, box.c_lo), std::max(0.0, box.c_hi));
    bv.s = ir.add_var(idx("s", l), std::min(0.0, box.s_lo), std::max(0.0, box.s_hi));
    const auto vv = product_range(box.vi_lo, box.vi_hi, box.vj_lo, box.vj_hi);
    const auto wr = product_range(vv.first, vv.second, box.c_lo, box.c_hi);
    const auto wi = product_range(vv.first, vv.second, box.s_lo, box.s_hi);
    bv.wr = ir.add_var(idx("wr", l), std::min(0.0, wr.first), std::max(0.0, wr.second));
    bv.wi = ir.add_var(idx("wi", l), std::min(0.0, wi.first), std::max(0.0, wi.second));
    bv.wz_fr = ir.add_var(idx("wz_fr", l), 0.0, bf.v_max * bf.v_max);
    bv.wz_to = ir.add_var(idx("wz_to", l), 0.0, bt.v_max * bt.v_max);
    const double smax = br.s_max > 0.0 ? br.s_max : kInf;
    bv.p_fr = ir.add_var(idx("p_fr", l), -smax, smax);
    bv.q_fr = ir.add_var(idx("q_fr", l), -smax, smax);
    bv.p_to = ir.add_var(idx("p_to", l), -smax, smax);
    bv.q_to = ir.add_var(idx("q_to", l), -smax, smax);
    if (options.include_current_constraints) bv.l = ir.add_var(idx("l", l), 0.0, kInf);
    bv.tri = TrilinearVars{m.bus[fi].v, m.bus[ti].v, bv.c, bv.s, bv.wr, bv.wi, bv.z, {}, {}, {}};
    m.branch.push_back(bv);

    ir.add_constraint(idx("theta_link", l), LinExpr(bv.theta), kEq, LinExpr(m.bus[fi].theta) - LinExpr(m.bus[ti].theta));
    add_flow_block(m, net, l, options);
    add_trig_envelopes(m, net, k, l, options);
    if (options.tier == Tier::kE) {
      add_extreme_point_block(ir, m.branch[l].tri, box, idx("", l));
    } else {
      add_mccormick_block(ir, m.branch[l].tri, box, idx("", l));
    }
    add_valid_inequalities(m, net, l, options);
  }

  // Power balance.
  std::vector<LinExpr> p_bal(net.buses.size()), q_bal(net.buses.size());
  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    const int i = net.bus_index(net.generators[g].bus);
    p_bal[i] += LinExpr(m.pg[g]);
    q_bal[i] += LinExpr(m.qg[g]);
  }
  for (std::size_t l = 0; l < net.branches.size(); ++l) {
    const int fi = net.bus_index(net.branches[l].from), ti = net.bus_index(net.branches[l].to);
    p_bal[fi] -= LinExpr(m.branch[l].p_fr);
    q_bal[fi] -= LinExpr(m.branch[l].q_fr);
    p_bal[ti] -= LinExpr(m.branch[l].p_to);
    q_bal[ti] -= LinExpr(m.branch[l].q_to);
  }
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    const Bus& b = net.buses[i];
    ir.add_constraint(idx("p_balance", b.id), p_bal[i] - b.shunt_g * LinExpr(m.bus[i].w), kEq, b.demand_p);
    ir.add_constraint(idx("q_balance", b.id), q_bal[i] + b.shunt_b * LinExpr(m.bus[i].w), kEq, b.demand_q);
  }

  // Objective: per-generator epigraph for the quadratic part.
  std::map<int, std::vector<int>> incident;
  for (std::size_t l = 0; l < net.branches.size(); ++l) {
    incident[net.branches[l].from].push_back(static_cast<int>(l));
    incident[net.branches[l].to].push_back(static_cast<int>(l));
  }
  LinExpr obj;
  std::map<int, double> leaf_fixed;
  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    const Generator& gen = net.generators[g];
    const double c2 = gen.c2 * base * base, c1 = gen.c1 * base;
    if (c2 > 0.0) {
      Var t = ir.add_var(idx("cost_epi", static_cast<int>(g)), 0.0, kInf);
      const double r = std::sqrt(c2);
      ir.add_soc(idx("cost_soc", static_cast<int>(g)), {2.0 * r * LinExpr(m.pg[g]), LinExpr(t) - 1.0}, LinExpr(t) + 1.0);
      obj += LinExpr(t);
    }
    obj.add(m.pg[g], c1);
    if (net.leaf_noload_buses.count(gen.bus)) {
      leaf_fixed[gen.bus] += gen.c0;
    } else {
      obj += gen.c0;
    }
  }
  for (const auto& [bus, c0] : leaf_fixed) {
    const auto& lines = incident[bus];
    if (lines.empty()) {
      obj += c0;
    } else if (lines.size() == 1) {
      obj.add(m.branch[lines[0]].z, c0);
    } else {
      // Any of the parallel lines being on connects the generator.
      Var u = ir.add_var(idx("leaf_on", bus), 0.0, 1.0);
      for (int l : lines) ir.add_constraint(idx("leaf_or", l), LinExpr(u), kGe, LinExpr(m.branch[l].z));
      ir.add_constraint(idx("leaf_or_ub", bus), LinExpr(u), kLe, [&] {
        LinExpr s;
        for (int l : lines) s.add(m.branch[l].z, 1.0);
        return s;
      }());
      obj.add(u, c0);
    }
  }
  ir.objective().linear = obj;
  return m;
}

}  // namespace acots

namespace acots {

std::vector<double> lift_ac_point(const QcModel& m, const Network& net, const AcPoint& pt) {
  std::vector<double> x(m.ir.num_vars(), 0.0);
  auto set = [&](Var v, double value) {
    if (v.id >= 0) x[v.id] = value;
  };
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    set(m.bus[i].v, pt.vm[i]);
    set(m.bus[i].w, pt.vm[i] * pt.vm[i]);
    set(m.bus[i].theta, pt.va[i]);
  }
  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    set(m.pg[g], pt.pg[g]);
    set(m.qg[g], pt.qg[g]);
    const double c2 = net.generators[g].c2 * net.base_mva * net.base_mva;
    if (auto t = m.ir.find_var(idx("cost_epi", static_cast<int>(g)))) set(*t, c2 * pt.pg[g] * pt.pg[g]);
  }
  for (int bus : net.leaf_noload_buses) {
    if (auto u = m.ir.find_var(idx("leaf_on", bus))) {
      int on = 0;
      for (std::size_t l = 0; l < net.branches.size(); ++l) {
        if (net.branches[l].from == bus || net.branches[l].to == bus) on = std::max(on, pt.z[l]);
      }
      set(*u, on);
    }
  }
  for (std::size_t l = 0; l < net.branches.size(); ++l) {
    const Branch& br = net.branches[l];
    const BranchVars& bv = m.branch[l];
    const int fi = net.bus_index(br.from), ti = net.bus_index(br.to);
    const double th = pt.va[fi] - pt.va[ti];
    set(bv.z, pt.z[l]);
    set(bv.theta, th);
    if (!pt.z[l]) continue;
    const double vi = pt.vm[fi], vj = pt.vm[ti];
    const double wf = vi * vi, wt = vj * vj, c = std::cos(th), s = std::sin(th);
    const double wr = vi * vj * c, wi = vi * vj * s;
    set(bv.c, c);
    set(bv.s, s);
    set(bv.wr, wr);
    set(bv.wi, wi);
    set(bv.wz_fr, wf);
    set(bv.wz_to, wt);
    const double tm = br.tap_sq(), tr = br.tap_re, tt = br.tap_im, g = br.g, b = br.b;
    const double p_fr = (g + br.g_c) / tm * wf - (g * tr - b * tt) / tm * wr - (g * tt + b * tr) / tm * wi;
    const double q_fr = -(b + br.b_c) / tm * wf + (g * tt + b * tr) / tm * wr - (g * tr - b * tt) / tm * wi;
    set(bv.p_fr, p_fr);
    set(bv.q_fr, q_fr);
    set(bv.p_to, (g + br.g_c) * wt - (g * tr + b * tt) / tm * wr - (g * tt - b * tr) / tm * wi);
    set(bv.q_to, -(b + br.b_c) * wt - (g * tt - b * tr) / tm * wr + (g * tr + b * tt) / tm * wi);
    // |I_fr|^2 = (p^2 + q^2) |T|^2 / w_i.
    set(bv.l, (p_fr * p_fr + q_fr * q_fr) * tm / wf);
    // Multilinear interpolation weights reproduce the trilinear terms exactly
    // and share the v_i v_j marginals between the cosine and sine sets.
    const TrilinearBox& box = m.boxes[l];
    auto weight = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; };
    const double ai = weight(vi, box.vi_lo, box.vi_hi), aj = weight(vj, box.vj_lo, box.vj_hi);
    const double ac = weight(c, box.c_lo, box.c_hi), as = weight(s, box.s_lo, box.s_hi);
    for (int k = 0; k < 8; ++k) {
      const double base = ((k & 4) ? ai : 1 - ai) * ((k & 2) ? aj : 1 - aj);
      set(bv.tri.lc[k], base * ((k & 1) ? ac : 1 - ac));
      set(bv.tri.ls[k], base * ((k & 1) ? as : 1 - as));
    }
    set(bv.tri.vv, vi * vj);
  }
  return x;
}

}  // namespace acots
