#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "acots/obbt.hpp"
#include "test_util.hpp"

using namespace acots;
using acots::testing::make_network;

namespace {

double root_bound(const Network& net, const RelaxationConfig& cfg, const BoundsState& s) {
  Network tight = net;
  apply_bounds(s, tight);
  Relaxation r = build_relaxation(tight, cfg);
  apply_fixings(s, r);
  ContinuousSolution sol = solve_continuous(r.qc.ir);
  EXPECT_EQ(sol.status, SolveStatus::kOptimal);
  return sol.objective;
}

// Feasibility of the relaxation with every z fixed to the bits of `mask`.
bool pattern_feasible(const Network& net, const RelaxationConfig& cfg, const BoundsState* s, int mask) {
  Network tight = net;
  if (s) apply_bounds(*s, tight);
  Relaxation r = build_relaxation(tight, cfg);
  if (s) apply_fixings(*s, r);
  for (std::size_t l = 0; l < r.qc.branch.size(); ++l) {
    const double z = (mask >> l) & 1;
    const Variable& var = r.qc.ir.vars()[r.qc.branch[l].z.id];
    if (z < var.lower || z > var.upper) return false;
    r.qc.ir.fix(r.qc.branch[l].z, z);
  }
  ContinuousSolution sol = solve_continuous(r.qc.ir);
  EXPECT_NE(sol.status, SolveStatus::kNumerical) << mask;
  return sol.status == SolveStatus::kOptimal;
}

}  // namespace

TEST(Obbt, IntervalsShrinkAndBoundRises) {
  for (const char* c : {"case3_lmbd", "case5_pjm"}) {
    Network net = read_matpower_file(std::string("data/cases/pglib_opf_") + c + ".m");
    RelaxationConfig cfg;
    BoundsState before = initial_bounds(net, cfg);
    BoundsState after = tighten(net, cfg);
    ASSERT_FALSE(after.infeasible);
    EXPECT_GE(after.iterations, 1);
    EXPECT_LE(after.iterations, 10);
    for (std::size_t i = 0; i < before.v.size(); ++i) {
      EXPECT_GE(after.v[i].first, before.v[i].first);
      EXPECT_LE(after.v[i].second, before.v[i].second);
      EXPECT_LE(after.v[i].first, after.v[i].second);
    }
    for (std::size_t l = 0; l < before.theta.size(); ++l) {
      EXPECT_GE(after.theta[l].first, before.theta[l].first);
      EXPECT_LE(after.theta[l].second, before.theta[l].second);
    }
    EXPECT_GT(after.total_width_reduction, 0.0) << c;
    EXPECT_GE(root_bound(net, cfg, after), root_bound(net, cfg, before) - 1e-9) << c;
  }
}

TEST(Obbt, ConvergedBoundsStopAfterOneIteration) {
  Network net = read_matpower_file("data/cases/pglib_opf_case3_lmbd.m");
  RelaxationConfig cfg;
  ObbtOptions opt;
  opt.max_iterations = 30;
  BoundsState s = tighten(net, cfg, opt);
  ASSERT_LT(s.last_improvement, opt.conv_tol);
  BoundsState again = tighten(net, cfg, opt, s);
  EXPECT_EQ(again.iterations, s.iterations + 1);
  EXPECT_LT(again.last_improvement, opt.conv_tol);
}

TEST(Obbt, NeededLineIsFixedOn) {
  // A radial line is the only path from the generator to the load.
  Network net = make_network(2, {{1, 2}});
  net.buses[1].demand_p = 1.0;
  RelaxationConfig cfg;
  BoundsState s = tighten(net, cfg);
  ASSERT_FALSE(s.infeasible);
  EXPECT_EQ(s.z[0], std::make_pair(1.0, 1.0));
}

TEST(Obbt, AllPatternsStayFeasible) {
  Network net = read_matpower_file("data/cases/pglib_opf_case3_lmbd.m");
  RelaxationConfig cfg;
  cfg.cycles = enumerate_cycles(net);
  cfg.cycle_hulls = true;
  BoundsState s = tighten(net, cfg);
  ASSERT_FALSE(s.infeasible);
  for (int mask = 0; mask < (1 << net.branches.size()); ++mask) {
    if (pattern_feasible(net, cfg, nullptr, mask)) EXPECT_TRUE(pattern_feasible(net, cfg, &s, mask)) << mask;
  }
}

TEST(Obbt, ThreadedRunMatchesSerial) {
  Network net = read_matpower_file("data/cases/pglib_opf_case5_pjm.m");
  RelaxationConfig cfg;
  ObbtOptions serial, threaded;
  serial.max_iterations = threaded.max_iterations = 2;
  threaded.threads = 4;
  EXPECT_EQ(to_json(tighten(net, cfg, serial)), to_json(tighten(net, cfg, threaded)));
}

TEST(Obbt, JsonRoundTrip) {
  Network net = read_matpower_file("data/cases/pglib_opf_case3_lmbd.m");
  RelaxationConfig cfg;
  cfg.cycles = enumerate_cycles(net);
  cfg.cycle_hulls = true;
  ObbtOptions opt;
  opt.max_iterations = 1;
  BoundsState s = tighten(net, cfg, opt);
  nlohmann::json j = to_json(s);
  EXPECT_EQ(to_json(bounds_from_json(nlohmann::json::parse(j.dump()))), j);
}

TEST(Obbt, StopsAtDeadline) {
  Network net = read_matpower_file("data/cases/pglib_opf_case14_ieee.m");
  RelaxationConfig cfg;
  cfg.cycles = enumerate_cycles(net);
  cfg.cycle_hulls = true;
  ObbtOptions opt;
  opt.time_limit = 0.5;
  const auto t0 = std::chrono::steady_clock::now();
  BoundsState s = tighten(net, cfg, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  // One full iteration takes far longer; the deadline cuts it after the solve in flight.
  EXPECT_LT(secs, 10.0);
  EXPECT_EQ(s.iterations, 1);
  ASSERT_FALSE(s.infeasible);
  BoundsState init = initial_bounds(net, cfg);
  for (std::size_t i = 0; i < init.v.size(); ++i) {
    EXPECT_GE(s.v[i].first, init.v[i].first);
    EXPECT_LE(s.v[i].second, init.v[i].second);
  }
}
