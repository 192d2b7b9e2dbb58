#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "acots/verify.hpp"
#include "test_util.hpp"

using namespace acots;

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST(Verify, OptimalityGap) {
  EXPECT_DOUBLE_EQ(optimality_gap(5812.6, 5812.6), 0.0);
  EXPECT_NEAR(optimality_gap(15174.0, 15008.9), 1.1, 0.05);
  EXPECT_NEAR(optimality_gap(101.0, 100.0), 1.0, 1e-12);
  EXPECT_THROW(optimality_gap(1.0, 0.0), std::domain_error);
  EXPECT_THROW(optimality_gap(1.0, -2.0), std::domain_error);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(1.0, 1e5);
  for (int i = 0; i < 100; ++i) {
    const double ub = u(rng), lb = u(rng), k = u(rng);
    EXPECT_NEAR(optimality_gap(k * ub, k * lb), optimality_gap(ub, lb), 1e-9 * std::abs(optimality_gap(ub, lb)) + 1e-12);
  }
}

TEST(Verify, ReferenceTable) {
  auto ub = read_reference_ub("data/reference_ub.csv");
  EXPECT_EQ(ub.size(), 41u);
  EXPECT_DOUBLE_EQ(ub.at("case3_lmbd"), 5812.6);
  EXPECT_DOUBLE_EQ(ub.at("case14_ieee_sad"), 2727.5);
  EXPECT_DOUBLE_EQ(ub.at("case300_ieee_api"), 684985.5);
  EXPECT_EQ(reference_case_name("data/cases/pglib_opf_case5_pjm.m"), "case5_pjm");
  EXPECT_EQ(reference_case_name("/x/case14_ieee_sad.m"), "case14_ieee_sad");
}

TEST(Verify, OnOffSplitEvenMass) {
  TrilinearBox box{0.9, 1.1, 0.95, 1.05, 0.8, 1.0, -0.5, 0.5};
  TrilinearPoint p;
  p.z = 0.5;
  // Mass 0.25 on two opposite (v_i, v_j) corners, split across the trig pair
  // differently on the cosine and sine sides; pair masses still match.
  p.lc[1] = p.lc[6] = 0.25;
  p.ls[0] = p.ls[7] = 0.25;
  for (int k = 0; k < 8; ++k) {
    const auto xc = extreme_point(box, k, false);
    const auto xs = extreme_point(box, k, true);
    p.wr += p.lc[k] * xc[0] * xc[1] * xc[2];
    p.wi += p.ls[k] * xs[0] * xs[1] * xs[2];
    p.c += p.lc[k] * xc[2];
    p.s += p.ls[k] * xs[2];
  }
  p.vi = 0.25 * 0.9 + 0.25 * 1.1 + 0.5 * 1.0;
  p.vj = 0.25 * 0.95 + 0.25 * 1.05 + 0.5 * 0.97;
  DecompositionResult d = check_theorem1(p, box);
  EXPECT_LE(d.max(), 1e-9);
  EXPECT_NEAR(d.eta0.vi, 1.0, 1e-12);
  EXPECT_NEAR(d.eta0.vj, 0.97, 1e-12);
}

TEST(Verify, OnOffSplitNearlyOn) {
  TrilinearBox box{0.9, 1.1, 0.95, 1.05, 0.8, 1.0, -0.5, 0.5};
  std::mt19937 rng(5);
  TrilinearPoint p = sample_h_point(rng, box, 1.0 - 1e-7, 1.0 - 1e-7);
  DecompositionResult d = check_theorem1(p, box);
  EXPECT_NEAR(d.eta1.wr, p.wr, 1e-6);
  EXPECT_NEAR(d.eta1.vi, p.vi, 1e-6);
  EXPECT_NEAR(d.eta1.c, p.c, 1e-6);
}

TEST(Verify, OnOffSplitRejectsInfeasiblePoint) {
  TrilinearBox box{0.9, 1.1, 0.95, 1.05, 0.8, 1.0, -0.5, 0.5};
  TrilinearPoint p;
  p.z = 0.5;
  p.lc[0] = 0.5;
  p.ls[0] = 0.5;
  p.vi = 1.0;
  p.vj = 1.0;
  try {
    check_theorem1(p, box);
    FAIL() << "expected a precondition error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("violates c "), std::string::npos) << e.what();
  }
  p.z = 1.0;
  EXPECT_THROW(check_theorem1(p, box), std::invalid_argument);
}

TEST(Verify, OnOffSplitSampledPoints) {
  std::mt19937 rng(17);
  for (int b = 0; b < 5; ++b) {
    TrilinearBox box = random_trilinear_box(rng);
    for (int trial = 0; trial < 100; ++trial) {
      TrilinearPoint p = sample_h_point(rng, box, 0.05, 0.95);
      ASSERT_LE(extreme_point_residual(p, box).value, 1e-9);
      if (p.z <= 0.0 || p.z >= 1.0) continue;
      DecompositionResult d = check_theorem1(p, box);
      EXPECT_LE(d.max(), 1e-9) << b << " " << trial;
    }
  }
}

TEST(Verify, ThreeCycleFormsAgree) {
  EXPECT_TRUE(check_prop1(0.1, 0.2));
  EXPECT_TRUE(check_prop1(0.0, 0.0));
  const double a = 0.1, b = 0.2;
  std::array<double, 3> c{std::cos(a), std::cos(b), std::cos(a + b) + 1e-3};
  std::array<double, 3> s{std::sin(a), std::sin(b), std::sin(a + b)};
  CycleResiduals r = cycle3_residuals(c, s);
  EXPECT_NEAR(r.sum_form, 1e-3, 1e-12);
  EXPECT_GT(r.product_form, 1e-4);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-kPi / 2, kPi / 2);
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(check_prop1(u(rng), u(rng)));
}

TEST(Verify, HullOracle) {
  TrilinearBox point{1.0, 1.0, 0.9, 0.9, 0.7, 0.7, 0.2, 0.2};
  EXPECT_NEAR(brute_force_hull_bound(point, {1, 1, 1, 1, 1, 1}, 3), 1.0 + 0.9 + 0.7 + 0.2 + 0.63 + 0.18, 1e-12);
  TrilinearBox unit{0.9, 1.1, 0.95, 1.05, 1.0, 1.0, -0.1, 0.1};
  EXPECT_NEAR(brute_force_hull_bound(unit, {0, 0, 0, 0, 1, 0}, 5), 0.9 * 0.95, 1e-12);
  EXPECT_THROW(brute_force_hull_bound(unit, {0, 0, 0, 0, 1, 0}, 1), std::invalid_argument);
  // A finer grid never does worse than a nested coarser one.
  std::mt19937 rng(29);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    TrilinearBox box = random_trilinear_box(rng);
    HullObjective f{n(rng), n(rng), n(rng), n(rng), n(rng), n(rng)};
    EXPECT_LE(brute_force_hull_bound(box, f, 9), brute_force_hull_bound(box, f, 5) + 1e-12);
  }
}

TEST(Verify, HullDominance) {
  std::mt19937 rng(31);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    TrilinearBox box = random_trilinear_box(rng);
    HullObjective f{n(rng), n(rng), n(rng), n(rng), n(rng), n(rng)};
    const double ep = relaxation_hull_bound(box, f, TrilinearRelaxation::kExtremePoint);
    const double mc = relaxation_hull_bound(box, f, TrilinearRelaxation::kMcCormick);
    const double grid = brute_force_hull_bound(box, f, 20);
    EXPECT_GE(ep, mc - 1e-7) << i;
    EXPECT_LE(ep, grid + 1e-7) << i;
    EXPECT_LE(mc, grid + 1e-7) << i;
  }
}

TEST(Verify, TwoBusPowerFlow) {
  // Newton solution of the two mismatch equations for 1.0 p.u. delivered to bus 2.
  Network net = acots::testing::make_network(2, {{1, 2}});
  net.buses[1].demand_p = 1.0;
  const double v2 = 0.984881066838499, d = 0.100699908875219;
  NonconvexPoint p;
  p.vm = {1.0, v2};
  p.va = {0.0, -d};
  p.z = {1};
  p.p_fr = {1.0 - v2 * (std::cos(d) - 10.0 * std::sin(d))};
  p.q_fr = {10.0 - v2 * (std::sin(d) + 10.0 * std::cos(d))};
  p.p_to = {-1.0};
  p.q_to = {0.0};
  p.pg = {0.1 + p.p_fr[0]};
  p.qg = {p.q_fr[0]};
  ViolationReport r = check_nonconvex_feasibility(net, p, 1e-9);
  EXPECT_TRUE(r.feasible) << r.worst << " " << r.worst_value;

  // Off line with zero flows: nothing to violate on the branch.
  NonconvexPoint off = p;
  off.z = {0};
  off.p_fr = off.q_fr = off.p_to = off.q_to = {0.0};
  ViolationReport ro = check_nonconvex_feasibility(net, off, 1e-9);
  EXPECT_EQ(ro.max_residual.at("flow_fr"), 0.0);
  EXPECT_EQ(ro.max_residual.at("flow_to"), 0.0);
  EXPECT_EQ(ro.max_residual.at("W"), 0.0);
  EXPECT_FALSE(ro.feasible);  // bus 2 load is unserved

  NonconvexPoint bad = p;
  bad.pg.clear();
  EXPECT_THROW(check_nonconvex_feasibility(net, bad), std::invalid_argument);
}

TEST(Verify, AcOptimumOfCaseFiles) {
  for (const char* c : {"case3_lmbd", "case5_pjm", "case14_ieee"}) {
    Network net = read_matpower_file(std::string("data/cases/pglib_opf_") + c + ".m");
    std::ifstream in(std::string("data/fixtures/ac_") + c + ".json");
    nlohmann::json j = nlohmann::json::parse(in);
    NonconvexPoint p;
    for (const auto& b : j["bus"]) {
      p.vm.push_back(b["vm"]);
      p.va.push_back(b["va"]);
    }
    for (const auto& g : j["gen"]) {
      p.pg.push_back(g["pg"]);
      p.qg.push_back(g["qg"]);
    }
    for (const auto& br : j["branch"]) {
      p.z.push_back(1);
      p.p_fr.push_back(br["p_fr"]);
      p.q_fr.push_back(br["q_fr"]);
      p.p_to.push_back(br["p_to"]);
      p.q_to.push_back(br["q_to"]);
    }
    ViolationReport r = check_nonconvex_feasibility(net, p, 1e-6);
    EXPECT_TRUE(r.feasible) << c << " " << r.worst << " " << r.worst_value;
  }
}
