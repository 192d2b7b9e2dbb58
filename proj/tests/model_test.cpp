#include <cmath>

#include <gtest/gtest.h>

#include "acots/model.hpp"
#include "acots/solver.hpp"

namespace acots {
namespace {

TEST(ModelIR, InfeasibleToyReportsInfeasible) {
  ModelIR m;
  Var v = m.add_var("v", -kInf, kInf);
  m.add_constraint("lo", v, Relation::kGreaterEqual, 2.0);
  m.add_constraint("hi", v, Relation::kLessEqual, 1.0);
  EXPECT_EQ(solve_continuous(m).status, SolveStatus::kInfeasible);
  ContinuousOptions raw;
  raw.presolve = false;
  ContinuousSolution s = solve_continuous(m, raw);
  ASSERT_EQ(s.status, SolveStatus::kInfeasible);
  // y_lo * 1 + y_hi * 1 = 0 with y_lo <= 0 <= y_hi, and 2 y_lo + y_hi < 0.
  ASSERT_EQ(s.farkas_rows.size(), 2u);
  EXPECT_NEAR(s.farkas_rows[0] + s.farkas_rows[1], 0.0, 1e-7);
  EXPECT_LT(2.0 * s.farkas_rows[0] + 1.0 * s.farkas_rows[1], 0.0);
}

TEST(ModelIR, EmptyObjectiveGivesZero) {
  ModelIR m;
  Var x = m.add_var("x", 0.0, 1.0);
  Var y = m.add_var("y", 0.0, 1.0);
  m.add_constraint("sum", x + y, Relation::kEqual, 1.0);
  ContinuousSolution s = solve_continuous(m);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_EQ(s.objective, 0.0);
  EXPECT_NEAR(s.x[0] + s.x[1], 1.0, 1e-8);
}

TEST(ModelIR, QuadraticObjectiveAndSoc) {
  // min 2 x^2 - 4 x  -> x = 1, value -2; plus ||(x, y)|| <= 2 and y = 1.
  ModelIR m;
  Var x = m.add_var("x", -10.0, 10.0);
  Var y = m.add_var("y", -kInf, kInf);
  m.objective().linear = -4.0 * LinExpr(x);
  m.objective().quadratic.push_back({x.id, 2.0});
  m.add_constraint("y", y, Relation::kEqual, 1.0);
  m.add_soc("disk", {LinExpr(x), LinExpr(y)}, LinExpr(2.0));
  ContinuousSolution s = solve_continuous(m);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.objective, -2.0, 1e-7);
  EXPECT_NEAR(s.x[x.id], 1.0, 1e-4);
  EXPECT_NEAR(s.dual_bound, -2.0, 1e-6);
}

TEST(ModelIR, PresolveForcingRowsFixVariables) {
  // z fixed to 0 forces w via w <= 2 z, w >= 0; objective pushes w up.
  ModelIR m;
  Var z = m.add_var("z", 0.0, 0.0);
  Var w = m.add_var("w", 0.0, kInf);
  Var u = m.add_var("u", -1.0, 1.0);
  m.add_constraint("gate", w, Relation::kLessEqual, 2.0 * LinExpr(z));
  m.add_constraint("link", u - w, Relation::kLessEqual, 0.0);
  m.objective().linear = -1.0 * LinExpr(w) - LinExpr(u);
  ContinuousSolution s = solve_continuous(m);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_EQ(s.x[w.id], 0.0);
  EXPECT_NEAR(s.x[u.id], 0.0, 1e-7);
}

TEST(ModelIR, RowDualsSatisfyStationarity) {
  // min x + y s.t. x + 2y >= 2, x - y <= 1, bounds [0, 5].
  ModelIR m;
  Var x = m.add_var("x", 0.0, 5.0);
  Var y = m.add_var("y", 0.0, 5.0);
  m.add_constraint("a", x + 2.0 * LinExpr(y), Relation::kGreaterEqual, 2.0);
  m.add_constraint("b", x - y, Relation::kLessEqual, 1.0);
  m.objective().linear = x + y;
  ContinuousSolution s = solve_continuous(m);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.objective, 1.0, 1e-7);
  EXPECT_NEAR(s.row_duals[0], -0.5, 1e-6);
  EXPECT_NEAR(s.row_duals[1], 0.0, 1e-6);
}

TEST(ModelIR, JsonRoundTrip) {
  ModelIR m;
  Var x = m.add_var("x", 0.0, kInf, true);
  Var y = m.add_var("y", -kInf, 3.5);
  m.add_constraint("r", 2.0 * LinExpr(x) - y, Relation::kGreaterEqual, -1.25);
  m.add_soc("c", {LinExpr(x), y + 1.0}, 3.0 * LinExpr(x) + 2.0);
  m.objective().linear = x + 0.5;
  m.objective().quadratic.push_back({y.id, 0.25});
  ModelIR back = ModelIR::from_json(m.to_json());
  EXPECT_EQ(back.to_json(), m.to_json());
  EXPECT_TRUE(back.vars()[0].integer);
  EXPECT_TRUE(std::isinf(back.vars()[1].lower));
}

}  // namespace
}  // namespace acots
