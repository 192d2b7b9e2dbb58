#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "acots/mip.hpp"
#include "acots/prep.hpp"

namespace acots {

enum class RunTier { kPM, kE, kEC, kECB, kECBStar };

const char* to_string(RunTier tier);
// Accepts pm, e, ec, ecb, ecb-star. Throws std::invalid_argument otherwise.
RunTier parse_tier(const std::string& name);

struct RunConfig {
  std::string case_path;
  RunTier tier = RunTier::kE;
  bool all_on = false;
  double time_limit = 7200.0;
  double gap_tol = 1e-3;
  int max_cuts = 200;
  int obbt_iters = 10;
  double load_scale = 1.0;
  std::optional<double> ub;
  std::string ub_table;  // empty: the table shipped in data/
  std::size_t cycle_cap = kDefaultCycleCap;
  unsigned seed = 0;
  int threads = 1;
};

struct RunReport {
  std::string case_name;
  std::string tier;
  double lb = -kInf;
  std::optional<double> ub;
  std::optional<double> gap_percent;
  int cuts_added = 0;
  int obbt_iterations = 0;
  long nodes = 0;
  double wall_time_s = 0.0;
  std::string termination;
  std::vector<int> switching;  // 1-based positions of in-service branches with z = 0
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);
// "case tier LB UB gap% time", with "-" for missing values.
std::string summary_line(const RunReport& report);

// Parse, scale, preprocess, optionally tighten, then solve at the tier.
// Throws ParseError for unreadable case data.
RunReport run(const RunConfig& config);

// Path of the shipped reference bound table.
std::string default_ub_table();

}  // namespace acots
