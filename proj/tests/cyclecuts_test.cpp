#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "acots/cyclecuts.hpp"
#include "acots/solver.hpp"
#include "test_util.hpp"

using namespace acots;
using acots::testing::make_network;

namespace {

// The cycle's model variables with no rows, so blocks can be tested alone.
struct Fixture {
  Network net;
  QcModel m;
  ModelIR ir;
  std::vector<Cycle> cycles;
};

Fixture fixture(int n, const std::vector<std::pair<int, int>>& edges, double theta) {
  Fixture f;
  f.net = make_network(n, edges, theta);
  f.m = build_model(f.net, derive_line_constants(f.net), {});
  for (const Variable& v : f.m.ir.vars()) f.ir.add_var(v.name, v.lower, v.upper, v.integer);
  f.cycles = enumerate_cycles(f.net);
  return f;
}

double minimize(ModelIR ir, const LinExpr& obj) {
  ir.objective() = {};
  ir.objective().linear = obj;
  ContinuousSolution sol = solve_continuous(ir);
  EXPECT_EQ(sol.status, SolveStatus::kOptimal);
  return sol.objective;
}

// Model values at exact trig and voltage values of the given bus angles.
std::vector<double> exact_values(const Fixture& f, const std::vector<double>& va, const std::vector<double>& vm) {
  std::vector<double> x(f.ir.num_vars(), 0.0);
  for (std::size_t i = 0; i < f.net.buses.size(); ++i) x[f.m.bus[i].w.id] = vm[i] * vm[i];
  for (std::size_t l = 0; l < f.net.branches.size(); ++l) {
    const Branch& br = f.net.branches[l];
    const int a = f.net.bus_index(br.from), b = f.net.bus_index(br.to);
    const double th = va[a] - va[b];
    const BranchVars& bv = f.m.branch[l];
    x[bv.z.id] = 1;
    x[bv.c.id] = std::cos(th);
    x[bv.s.id] = std::sin(th);
    x[bv.wr.id] = vm[a] * vm[b] * std::cos(th);
    x[bv.wi.id] = vm[a] * vm[b] * std::sin(th);
  }
  return x;
}

const std::vector<std::pair<int, int>> kTriangle = {{1, 2}, {2, 3}, {1, 3}};
const std::vector<std::pair<int, int>> kSquare = {{1, 2}, {2, 3}, {3, 4}, {4, 1}};

}  // namespace

TEST(Cyclecuts, BlockShape) {
  Fixture f = fixture(3, kTriangle, 0.5);
  ASSERT_EQ(f.cycles.size(), 1u);
  CycleBlock b = make_cycle_block(f.m, f.net, f.cycles[0], 0, CycleSpace::kCS);
  const std::vector<std::pair<int, int>> expected = {{0, 1}, {0, 2}, {0, 4}, {0, 5}, {1, 2}, {1, 3},
                                                     {1, 5}, {2, 3}, {2, 4}, {3, 4}, {3, 5}, {4, 5}};
  EXPECT_EQ(b.pairs, expected);
  auto xs = b.extreme_matrix();
  EXPECT_EQ(xs.size(), 64u);
  EXPECT_EQ(std::set<std::vector<double>>(xs.begin(), xs.end()).size(), 64u);
  for (const auto& row : xs) {
    for (std::size_t j = 0; j < 6; ++j) EXPECT_TRUE(row[j] == b.x_bounds[j].first || row[j] == b.x_bounds[j].second);
  }

  Fixture g = fixture(4, kSquare, 0.5);
  ASSERT_EQ(g.cycles.size(), 1u);
  CycleBlock cs = make_cycle_block(g.m, g.net, g.cycles[0], 0, CycleSpace::kCS);
  CycleBlock w = make_cycle_block(g.m, g.net, g.cycles[0], 0, CycleSpace::kW);
  EXPECT_EQ(cs.extreme_matrix().size(), 256u);
  EXPECT_EQ(cs.pairs.size(), 24u);
  EXPECT_EQ(w.pairs.size(), 8u);
}

TEST(Cyclecuts, BigM) {
  Fixture f = fixture(3, kTriangle, 0.2);
  CycleBlock b = make_cycle_block(f.m, f.net, f.cycles[0], 0, CycleSpace::kCS);
  // c in [0, 1] once widened to hold 0, s in [-sin 0.2, sin 0.2].
  const double s = std::sin(0.2);
  EXPECT_NEAR(cycle_big_m(b, 0), 1.0 + s * s, 1e-12);
  Fixture wide = fixture(3, kTriangle, std::acos(-1.0) / 2);
  CycleBlock bw = make_cycle_block(wide.m, wide.net, wide.cycles[0], 0, CycleSpace::kCS);
  for (int e = 0; e < 6; ++e) EXPECT_LE(cycle_big_m(bw, e), 3.0);

  // All lines on: the rows are equalities on the pair variables.
  build_bigm_cycle_constraints(f.ir, b);
  ModelIR on = f.ir;
  for (Var z : b.z) on.fix(z, 1.0);
  const LinExpr gap = b.x[2] - LinExpr(b.pair_vars[0]) + LinExpr(b.pair_vars[9]);
  ASSERT_EQ(b.pairs[0], std::make_pair(0, 1));
  ASSERT_EQ(b.pairs[9], std::make_pair(3, 4));
  EXPECT_NEAR(minimize(on, gap), 0.0, 1e-7);
  EXPECT_NEAR(minimize(on, -gap), 0.0, 1e-7);
  // One line off: the product-free bound on x3 is recovered.
  ModelIR off = f.ir;
  off.fix(b.z[0], 0.0);
  off.fix(b.z[1], 1.0);
  off.fix(b.z[2], 1.0);
  EXPECT_NEAR(minimize(off, b.x[2]), 0.0, 1e-6);
}

TEST(Cyclecuts, HullOffState) {
  Fixture f = fixture(3, kTriangle, 0.5);
  CycleBlock b = make_cycle_block(f.m, f.net, f.cycles[0], 0, CycleSpace::kCS);
  build_cycle_hull(f.ir, b);
  EXPECT_EQ(b.lambdas.size(), 64u);
  EXPECT_EQ(b.pair_vars.size(), 12u);
  // With a line off the LP relaxation caps y at 2/3; integrality then gives 0.
  f.ir.fix(b.z[1], 0.0);
  EXPECT_NEAR(-minimize(f.ir, -LinExpr(b.y)), 2.0 / 3.0, 1e-7);
  f.ir.fix(b.y, 0.0);
  for (Var v : b.pair_vars) {
    EXPECT_NEAR(minimize(f.ir, LinExpr(v)), 0.0, 1e-7);
    EXPECT_NEAR(minimize(f.ir, -LinExpr(v)), 0.0, 1e-7);
  }
  EXPECT_NEAR(minimize(f.ir, LinExpr(b.y)), 0.0, 1e-7);
  EXPECT_NEAR(minimize(f.ir, -LinExpr(b.y)), 0.0, 1e-7);
  // x3 spans its widened box.
  EXPECT_NEAR(minimize(f.ir, b.x[2]), 0.0, 1e-6);
  EXPECT_NEAR(-minimize(f.ir, -b.x[2]), 1.0, 1e-6);
}

TEST(Cyclecuts, HullVertex) {
  Fixture f = fixture(3, kTriangle, 0.5);
  CycleBlock b = make_cycle_block(f.m, f.net, f.cycles[0], 0, CycleSpace::kCS);
  build_cycle_hull(f.ir, b);
  // The box corner is off the identity manifold, so only the hull rows stay.
  ModelIR ir;
  for (const Variable& v : f.ir.vars()) ir.add_var(v.name, v.lower, v.upper, v.integer);
  for (const LinearConstraint& r : f.ir.constraints()) {
    if (r.name.find("_id[") != std::string::npos) continue;
    LinExpr lhs;
    for (const Term& t : r.terms) lhs.add(Var{t.var}, t.coef);
    ir.add_constraint(r.name, lhs, r.relation, r.rhs);
  }
  for (Var z : b.z) ir.fix(z, 1.0);
  for (std::size_t j = 0; j < 6; ++j) ir.add_constraint("fix", b.x[j], Relation::kEqual, b.x_bounds[j].second);
  EXPECT_NEAR(minimize(ir, -LinExpr(b.lambdas[63])), -1.0, 1e-6);
  for (std::size_t p = 0; p < b.pairs.size(); ++p) {
    const double expect = b.x_bounds[b.pairs[p].first].second * b.x_bounds[b.pairs[p].second].second;
    EXPECT_NEAR(minimize(ir, LinExpr(b.pair_vars[p])), expect, 1e-6);
  }
  // With the identity rows the corner is cut off.
  for (Var z : b.z) f.ir.fix(z, 1.0);
  for (std::size_t j = 0; j < 6; ++j) f.ir.add_constraint("fix", b.x[j], Relation::kEqual, b.x_bounds[j].second);
  EXPECT_EQ(solve_continuous(f.ir).status, SolveStatus::kInfeasible);
}

TEST(Cyclecuts, ExactPointsSatisfyIdentities) {
  // 3- and 4-cycle identities hold at consistent angles in both spaces.
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ang(-0.5, 0.5), mag(0.9, 1.1);
  for (auto [n, edges] : {std::pair{3, kTriangle}, std::pair{4, kSquare}}) {
    CycleOptions opt;
    opt.include_trilinear_identities = true;
    Fixture f = fixture(n, edges, 1.5);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> va(n), vm(n);
      for (int i = 0; i < n; ++i) {
        va[i] = ang(rng);
        vm[i] = mag(rng);
      }
      const auto values = exact_values(f, va, vm);
      for (CycleSpace space : {CycleSpace::kCS, CycleSpace::kW}) {
        CycleBlock b = make_cycle_block(f.m, f.net, f.cycles[0], 0, space, opt);
        SeparationPoint p = separation_point(b, values);
        for (std::size_t e = 0; e < b.identities.size(); ++e) {
          const double r = p.l[e] - b.identities[e].constant - b.identity_terms(static_cast<int>(e), p.x);
          EXPECT_NEAR(r, 0.0, 1e-12) << n << " " << to_string(space) << " " << e;
        }
      }
    }
  }
}

TEST(Cyclecuts, SeparationExactPointHasNoCut) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ang(-0.15, 0.15), mag(0.9, 1.1);
  for (auto [n, edges] : {std::pair{3, kTriangle}, std::pair{4, kSquare}}) {
    Fixture f = fixture(n, edges, 0.5);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> va(n), vm(n);
      for (int i = 0; i < n; ++i) {
        va[i] = ang(rng);
        vm[i] = mag(rng);
      }
      const auto values = exact_values(f, va, vm);
      for (CycleSpace space : {CycleSpace::kCS, CycleSpace::kW}) {
        CycleBlock b = make_cycle_block(f.m, f.net, f.cycles[0], 0, space);
        EXPECT_FALSE(separate(b, separation_point(b, values)).has_value()) << n << " " << to_string(space);
      }
    }
  }
}

TEST(Cyclecuts, SeparationMismatchCut) {
  Fixture f = fixture(3, kTriangle, 0.5);
  CycleBlock b = make_cycle_block(f.m, f.net, f.cycles[0], 0, CycleSpace::kCS);
  // Two angles of 0.25 with the closing arc claiming angle 0.
  const double c = std::cos(0.25), s = std::sin(0.25);
  SeparationPoint p;
  p.x = {c, c, 1.0, s, s, 0.0};
  p.l = {p.x[2], p.x[5], p.x[0], p.x[3], p.x[1], p.x[4]};
  auto cut = separate(b, p);
  ASSERT_TRUE(cut.has_value());
  EXPECT_GE(cut->violation, 1e-6);
  EXPECT_LE(cut_validity_gap(b, *cut), 1e-8);
  double norm = 0.0;
  for (double v : cut->beta_x) norm = std::max(norm, std::abs(v));
  for (double v : cut->beta_l) norm = std::max(norm, std::abs(v));
  EXPECT_NEAR(norm, 1.0, 1e-12);

  // Added globally, the cut removes the point when all lines are on and
  // leaves the off state alone.
  add_cut(f.ir, b, *cut);
  const LinearConstraint& row = f.ir.constraints().back();
  auto lhs = [&](const std::vector<double>& x) {
    double v = 0.0;
    for (const Term& t : row.terms) v += t.coef * x[t.var];
    return v;
  };
  std::vector<double> x(f.ir.num_vars(), 0.0);
  for (int k = 0; k < 3; ++k) {
    x[b.z[k].id] = 1.0;
    x[f.m.branch[f.cycles[0].arcs[k]].c.id] = p.x[k];
    const int sign = (k == 2 ? -1 : 1) * f.cycles[0].signs[k];
    x[f.m.branch[f.cycles[0].arcs[k]].s.id] = sign * p.x[3 + k];
  }
  EXPECT_GT(lhs(x), row.rhs + 1e-7);
  x[b.z[0].id] = 0.0;
  x[f.m.branch[f.cycles[0].arcs[0]].c.id] = 0.0;
  x[f.m.branch[f.cycles[0].arcs[0]].s.id] = 0.0;
  EXPECT_LE(lhs(x), row.rhs + 1e-12);
}

TEST(Cyclecuts, HullTighterThanMcCormick) {
  // Random objectives over the c-s coordinates: McCormick <= hull <= grid over the true set.
  const double theta = 0.6;
  std::mt19937 rng(17);
  std::normal_distribution<double> nd(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    Fixture fh = fixture(3, kTriangle, theta), fm = fixture(3, kTriangle, theta);
    CycleBlock bh = make_cycle_block(fh.m, fh.net, fh.cycles[0], 0, CycleSpace::kCS);
    CycleBlock bm = make_cycle_block(fm.m, fm.net, fm.cycles[0], 0, CycleSpace::kCS);
    build_cycle_hull(fh.ir, bh);
    build_bigm_cycle_constraints(fm.ir, bm);
    for (int k = 0; k < 3; ++k) {
      fh.ir.fix(bh.z[k], 1.0);
      fm.ir.fix(bm.z[k], 1.0);
    }
    std::vector<double> w(6);
    for (double& v : w) v = nd(rng);
    LinExpr oh, om;
    for (int j = 0; j < 6; ++j) {
      oh += w[j] * bh.x[j];
      om += w[j] * bm.x[j];
    }
    const double hull = minimize(fh.ir, oh), mc = minimize(fm.ir, om);
    EXPECT_GE(hull, mc - 1e-7);
    // Grid over (theta_12, theta_23) with theta_13 kept in bounds.
    double grid = kInf;
    const int g = 20;
    for (int a = 0; a < g; ++a) {
      for (int c = 0; c < g; ++c) {
        const double t1 = -theta + 2 * theta * a / (g - 1), t2 = -theta + 2 * theta * c / (g - 1);
        if (std::abs(t1 + t2) > theta) continue;
        const double xv[6] = {std::cos(t1), std::cos(t2), std::cos(t1 + t2), std::sin(t1), std::sin(t2), std::sin(t1 + t2)};
        double v = 0.0;
        for (int j = 0; j < 6; ++j) v += w[j] * xv[j];
        grid = std::min(grid, v);
      }
    }
    EXPECT_LE(hull, grid + 1e-7);
  }
}

TEST(Cyclecuts, OrientationInvariance) {
  // Reversing a branch flips its sine; the hull's optimal values do not change.
  std::mt19937 rng(23);
  std::normal_distribution<double> nd(0, 1);
  auto reversed = kTriangle;
  std::swap(reversed[1].first, reversed[1].second);
  for (CycleSpace space : {CycleSpace::kCS, CycleSpace::kW}) {
    for (int trial = 0; trial < 5; ++trial) {
      Fixture a = fixture(3, kTriangle, 0.5), b = fixture(3, reversed, 0.5);
      CycleBlock ba = make_cycle_block(a.m, a.net, a.cycles[0], 0, space);
      CycleBlock bb = make_cycle_block(b.m, b.net, b.cycles[0], 0, space);
      build_cycle_hull(a.ir, ba);
      build_cycle_hull(b.ir, bb);
      LinExpr oa, ob;
      for (int l = 0; l < 3; ++l) {
        const double rc = nd(rng), rs = nd(rng);
        const double flip = l == 1 ? -1.0 : 1.0;
        if (space == CycleSpace::kCS) {
          oa.add(a.m.branch[l].c, rc).add(a.m.branch[l].s, rs);
          ob.add(b.m.branch[l].c, rc).add(b.m.branch[l].s, flip * rs);
        } else {
          oa.add(a.m.branch[l].wr, rc).add(a.m.branch[l].wi, rs);
          ob.add(b.m.branch[l].wr, rc).add(b.m.branch[l].wi, flip * rs);
        }
      }
      for (int k = 0; k < 3; ++k) {
        a.ir.fix(ba.z[k], 1.0);
        b.ir.fix(bb.z[k], 1.0);
      }
      EXPECT_NEAR(minimize(a.ir, oa), minimize(b.ir, ob), 1e-6);
    }
  }
}
