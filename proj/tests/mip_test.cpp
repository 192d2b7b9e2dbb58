#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "acots/cyclecuts.hpp"
#include "acots/mip.hpp"
#include "acots/prep.hpp"
#include "acots/qcmodel.hpp"
#include "acots/solver.hpp"

using namespace acots;

namespace {

// Random bounded MIP with a known feasible point: binaries b, continuous x in [-2, 2].
ModelIR random_mip(std::mt19937& rng, int nb, int nc, int rows) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  ModelIR ir;
  std::vector<Var> vars;
  std::vector<double> point;
  for (int i = 0; i < nb; ++i) {
    vars.push_back(ir.add_var("b" + std::to_string(i), 0.0, 1.0, true));
    point.push_back(coin(rng) ? 1.0 : 0.0);
  }
  for (int i = 0; i < nc; ++i) {
    vars.push_back(ir.add_var("x" + std::to_string(i), -2.0, 2.0));
    point.push_back(u(rng));
  }
  for (int r = 0; r < rows; ++r) {
    LinExpr e;
    double at = 0.0;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const double a = u(rng);
      e.add(vars[k], a);
      at += a * point[k];
    }
    ir.add_constraint("r" + std::to_string(r), e, Relation::kLessEqual, at + 0.1 * std::abs(u(rng)));
  }
  for (Var v : vars) ir.objective().linear.add(v, u(rng));
  return ir;
}

double brute_force(const ModelIR& ir, int nb) {
  double best = kInf;
  for (int mask = 0; mask < (1 << nb); ++mask) {
    ModelIR fixed = ir;
    for (int i = 0; i < nb; ++i) fixed.fix(Var{i}, (mask >> i) & 1);
    ContinuousSolution sol = solve_continuous(fixed);
    if (sol.status == SolveStatus::kOptimal) best = std::min(best, sol.objective);
  }
  return best;
}

}  // namespace

TEST(Mip, MatchesEnumeration) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const int nb = 2 + trial % 4;
    ModelIR ir = random_mip(rng, nb, 3, 5);
    BranchOptions opt;
    opt.gap_tol = 1e-8;
    SolveReport r = branch_and_bound(ir, opt);
    const double want = brute_force(ir, nb);
    ASSERT_TRUE(r.incumbent.has_value()) << trial;
    EXPECT_EQ(r.termination, Termination::kTolerance);
    EXPECT_NEAR(r.incumbent->objective, want, 1e-6 * std::max(1.0, std::abs(want))) << trial;
    EXPECT_LE(r.lower_bound, r.incumbent->objective + 1e-9);
    EXPECT_GE(r.lower_bound, want - 1e-6 * std::max(1.0, std::abs(want)) - 1e-8 * std::abs(want));
    EXPECT_LE(r.root_bound, want + 1e-6);
  }
}

TEST(Mip, InfeasibleModel) {
  ModelIR ir;
  Var a = ir.add_var("a", 0, 1, true);
  Var b = ir.add_var("b", 0, 1, true);
  ir.add_constraint("sum", LinExpr().add(a, 1).add(b, 1), Relation::kEqual, 1.0);
  ir.add_constraint("diff", LinExpr().add(a, 1).add(b, -1), Relation::kEqual, 0.0);
  SolveReport r = branch_and_bound(ir);
  EXPECT_EQ(r.termination, Termination::kInfeasible);
  EXPECT_FALSE(r.incumbent.has_value());
}

TEST(Mip, NodeLimitKeepsValidBound) {
  std::mt19937 rng(11);
  ModelIR ir = random_mip(rng, 8, 3, 6);
  const double want = brute_force(ir, 8);
  BranchOptions opt;
  opt.gap_tol = 0.0;
  opt.node_limit = 3;
  SolveReport r = branch_and_bound(ir, opt);
  EXPECT_LE(r.nodes, 3);
  EXPECT_LE(r.lower_bound, want + 1e-6);
  if (r.incumbent) EXPECT_GE(r.incumbent->objective, want - 1e-6);
}

TEST(Mip, WarmStartBecomesIncumbent) {
  ModelIR ir;
  Var a = ir.add_var("a", 0, 1, true);
  Var x = ir.add_var("x", 0, 5);
  ir.add_constraint("link", LinExpr().add(x, 1).add(a, 3), Relation::kGreaterEqual, 2.5);
  ir.objective().linear.add(x, 1).add(a, 0.4);
  BranchOptions opt;
  opt.warm_starts = {{{a.id, 0.0}}};
  opt.node_limit = 0;
  SolveReport r = branch_and_bound(ir, opt);
  ASSERT_TRUE(r.incumbent.has_value());
  EXPECT_NEAR(r.incumbent->objective, 2.5, 1e-6);
  EXPECT_EQ(r.termination, Termination::kNodeLimit);
}

TEST(Mip, Case3TierE) {
  Network net = read_matpower_file("data/cases/pglib_opf_case3_lmbd.m");
  QcModel m = build_model(net, derive_line_constants(net), {});
  BranchOptions opt;
  opt.time_limit = 120;
  SolveReport r = branch_and_bound(m.ir, opt);
  ASSERT_TRUE(r.incumbent.has_value());
  EXPECT_EQ(r.termination, Termination::kTolerance);
  EXPECT_LE(r.lower_bound, 5812.64);
  EXPECT_LE((r.incumbent->objective - r.lower_bound) / r.lower_bound, 1e-3 + 1e-9);
  // The AC optimum is within 1.5% of the relaxation.
  EXPECT_LE((5812.64 - r.lower_bound) / 5812.64, 0.015);
}

TEST(Mip, CutsTightenAndStayValid) {
  Network net = read_matpower_file("data/cases/pglib_opf_case3_lmbd.m");
  QcModel m = build_model(net, derive_line_constants(net), {});
  BranchOptions bo;
  bo.time_limit = 120;
  SolveReport plain = branch_and_bound(m.ir, bo);

  std::vector<CycleBlock> blocks;
  int id = 0;
  for (const Cycle& c : enumerate_cycles(net)) {
    for (CycleSpace s : {CycleSpace::kCS, CycleSpace::kW}) blocks.push_back(make_cycle_block(m, net, c, id++, s));
  }
  ModelIR ir = m.ir;
  CutOptions co;
  co.time_limit = 120;
  SolveReport cut = branch_and_cut(ir, blocks, co);
  ASSERT_TRUE(cut.incumbent.has_value());
  EXPECT_GT(cut.cuts_added, 0);
  EXPECT_LE(cut.cuts_added, co.max_cuts);
  EXPECT_GE(cut.lower_bound, plain.lower_bound * (1 - 1e-3));
  EXPECT_LE(cut.lower_bound, 5812.64);
}
