#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "acots/run.hpp"

using namespace acots;

namespace {

const std::string kCase3 = "data/cases/pglib_opf_case3_lmbd.m";

RunConfig case3(RunTier tier) {
  RunConfig c;
  c.case_path = kCase3;
  c.tier = tier;
  c.time_limit = 120;
  return c;
}

int cli(const std::string& args) {
  const int status = std::system((std::string(ACOTS_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, TierNames) {
  for (RunTier t : {RunTier::kPM, RunTier::kE, RunTier::kEC, RunTier::kECB, RunTier::kECBStar}) {
    EXPECT_EQ(parse_tier(to_string(t)), t);
  }
  EXPECT_THROW(parse_tier("ecbstar"), std::invalid_argument);
}

TEST(Cli, Case3TierE) {
  RunReport r = run(case3(RunTier::kE));
  EXPECT_EQ(r.case_name, "case3_lmbd");
  ASSERT_TRUE(r.ub.has_value());
  EXPECT_DOUBLE_EQ(*r.ub, 5812.6);
  ASSERT_TRUE(r.gap_percent.has_value());
  EXPECT_NEAR(*r.gap_percent, 1.0, 0.3);
  EXPECT_EQ(r.termination, "tolerance");
}

TEST(Cli, AllOnBoundIsBelowUb) {
  RunConfig c = case3(RunTier::kE);
  c.all_on = true;
  RunReport r = run(c);
  ASSERT_TRUE(r.gap_percent.has_value());
  EXPECT_GE(*r.gap_percent, 0.0);
  EXPECT_TRUE(r.switching.empty());
}

TEST(Cli, UnitLoadScaleChangesNothing) {
  RunConfig a = case3(RunTier::kE), b = a;
  b.load_scale = 1.0;
  RunReport ra = run(a), rb = run(b);
  ra.wall_time_s = rb.wall_time_s = 0;
  EXPECT_EQ(to_json(ra), to_json(rb));
}

TEST(Cli, UbOverrideAndUnknownCase) {
  RunConfig c = case3(RunTier::kE);
  c.ub = 6000.0;
  RunReport r = run(c);
  EXPECT_DOUBLE_EQ(*r.ub, 6000.0);
  EXPECT_NEAR(*r.gap_percent, (6000.0 - r.lb) / r.lb * 100, 1e-12);

  c.ub.reset();
  c.ub_table = "/nonexistent/ub.csv";
  r = run(c);
  EXPECT_FALSE(r.gap_percent.has_value());
  EXPECT_GT(r.lb, 0.0);
}

TEST(Cli, ReportRoundTrip) {
  RunReport r = run(case3(RunTier::kECBStar));
  r.switching = {2, 3};
  r.warnings = {"w"};
  const std::string text = to_json(r).dump();
  RunReport back = report_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(back.lb, r.lb);
  EXPECT_EQ(back.ub, r.ub);
  EXPECT_EQ(back.gap_percent, r.gap_percent);
  EXPECT_EQ(back.wall_time_s, r.wall_time_s);
  EXPECT_EQ(back.nodes, r.nodes);
  EXPECT_EQ(back.cuts_added, r.cuts_added);
  EXPECT_EQ(back.obbt_iterations, r.obbt_iterations);
  EXPECT_EQ(back.switching, r.switching);
  EXPECT_EQ(to_json(back), to_json(r));

  RunReport none;
  none.termination = "time_limit";
  EXPECT_EQ(report_from_json(to_json(none)).lb, -kInf);
}

TEST(Cli, TierOrderOnCase3) {
  double prev = -kInf;
  for (RunTier t : {RunTier::kPM, RunTier::kE, RunTier::kEC, RunTier::kECB}) {
    RunConfig c = case3(t);
    c.gap_tol = 1e-6;
    RunReport r = run(c);
    EXPECT_GE(r.lb, prev - 1e-6 * std::abs(prev)) << r.tier;
    prev = r.lb;
  }
}

TEST(Cli, SummaryLine) {
  RunReport r;
  r.case_name = "case3_lmbd";
  r.tier = "e";
  r.lb = 5754.321;
  r.wall_time_s = 0.5;
  EXPECT_EQ(summary_line(r), "case3_lmbd e 5754.32 - - 0.50s");
  r.ub = 5812.6;
  r.gap_percent = 1.0128;
  EXPECT_EQ(summary_line(r), "case3_lmbd e 5754.32 5812.60 1.01% 0.50s");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("solve --case " + kCase3 + " --tier e"), 0);
  EXPECT_EQ(cli("solve --case /nonexistent.m"), 2);
  {
    std::ofstream bad("/tmp/acots_bad_case.m");
    bad << "function mpc = bad\nmpc.bus = [1 2;\n";
  }
  EXPECT_EQ(cli("solve --case /tmp/acots_bad_case.m"), 2);
  EXPECT_EQ(cli("solve --case " + kCase3 + " --time-limit 0"), 4);
  EXPECT_EQ(cli("validate --case " + kCase3), 0);
  EXPECT_EQ(cli("cycles --case " + kCase3), 0);
  std::remove("/tmp/acots_bad_case.m");
}
