#include "acots/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <stdexcept>

#include "acots/obbt.hpp"
#include "acots/verify.hpp"

#ifndef ACOTS_DATA_DIR
#define ACOTS_DATA_DIR "data"
#endif

namespace acots {

const char* to_string(RunTier tier) {
  switch (tier) {
    case RunTier::kPM: return "pm";
    case RunTier::kE: return "e";
    case RunTier::kEC: return "ec";
    case RunTier::kECB: return "ecb";
    case RunTier::kECBStar: return "ecb-star";
  }
  return "?";
}

RunTier parse_tier(const std::string& name) {
  for (RunTier t : {RunTier::kPM, RunTier::kE, RunTier::kEC, RunTier::kECB, RunTier::kECBStar}) {
    if (name == to_string(t)) return t;
  }
  throw std::invalid_argument("unknown tier " + name);
}

std::string default_ub_table() {
  if (std::filesystem::exists("data/reference_ub.csv")) return "data/reference_ub.csv";
  return std::string(ACOTS_DATA_DIR) + "/reference_ub.csv";
}

namespace {

// JSON has no infinities; unbounded values are written as null.
nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double number_or(const nlohmann::json& j, double fallback) { return j.is_null() ? fallback : j.get<double>(); }

// Rounded z of the continuous optimum of the plain tier-E relaxation.
std::vector<std::pair<int, double>> e_tier_pattern(const Network& net, const BoundsState& bounds, const Relaxation& target,
                                                   bool all_on) {
  RelaxationConfig cfg;
  cfg.formulation.all_lines_on = all_on;
  Relaxation e = build_relaxation(net, cfg);
  for (std::size_t l = 0; l < bounds.z.size(); ++l) e.qc.ir.set_bounds(e.qc.branch[l].z, bounds.z[l].first, bounds.z[l].second);
  ContinuousSolution sol = solve_continuous(e.qc.ir);
  if (sol.status != SolveStatus::kOptimal) return {};
  std::vector<std::pair<int, double>> pattern;
  for (std::size_t l = 0; l < e.qc.branch.size(); ++l) {
    pattern.emplace_back(target.qc.branch[l].z.id, sol.x[e.qc.branch[l].z.id] >= 0.5 ? 1.0 : 0.0);
  }
  return pattern;
}

}  // namespace

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j = {{"case", r.case_name},
                      {"tier", r.tier},
                      {"lb", number(r.lb)},
                      {"ub", r.ub ? nlohmann::json(*r.ub) : nlohmann::json(nullptr)},
                      {"gap_percent", r.gap_percent ? nlohmann::json(*r.gap_percent) : nlohmann::json(nullptr)},
                      {"cuts_added", r.cuts_added},
                      {"obbt_iterations", r.obbt_iterations},
                      {"nodes", r.nodes},
                      {"wall_time_s", r.wall_time_s},
                      {"termination", r.termination},
                      {"switching", r.switching}};
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j;
}

RunReport report_from_json(const nlohmann::json& j) {
  RunReport r;
  r.case_name = j.at("case");
  r.tier = j.at("tier");
  // An unbounded lower bound is either -inf (no bound) or +inf (infeasible).
  r.lb = number_or(j.at("lb"), j.at("termination") == "infeasible" ? kInf : -kInf);
  if (!j.at("ub").is_null()) r.ub = j.at("ub").get<double>();
  if (!j.at("gap_percent").is_null()) r.gap_percent = j.at("gap_percent").get<double>();
  r.cuts_added = j.at("cuts_added");
  r.obbt_iterations = j.at("obbt_iterations");
  r.nodes = j.at("nodes");
  r.wall_time_s = j.at("wall_time_s");
  r.termination = j.at("termination");
  r.switching = j.at("switching").get<std::vector<int>>();
  if (j.contains("warnings")) r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

std::string summary_line(const RunReport& r) {
  const std::string ub = r.ub ? fmt::format("{:.2f}", *r.ub) : "-";
  const std::string gap = r.gap_percent ? fmt::format("{:.2f}%", *r.gap_percent) : "-";
  return fmt::format("{} {} {:.2f} {} {} {:.2f}s", r.case_name, r.tier, r.lb, ub, gap, r.wall_time_s);
}

RunReport run(const RunConfig& config) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  RunReport report;
  report.case_name = reference_case_name(config.case_path);
  report.tier = to_string(config.tier);

  Network net = read_matpower_file(config.case_path, &report.warnings);
  if (config.load_scale != 1.0) scale_load(net, config.load_scale);

  const RunTier tier = config.tier;
  const bool with_cycles = tier == RunTier::kEC || tier == RunTier::kECB || tier == RunTier::kECBStar;
  const bool with_obbt = tier == RunTier::kECB || tier == RunTier::kECBStar;

  RelaxationConfig cfg;
  cfg.formulation.tier = tier == RunTier::kPM ? Tier::kPM : Tier::kE;
  cfg.formulation.all_lines_on = config.all_on;
  if (with_cycles) cfg.cycles = enumerate_cycles(net, config.cycle_cap);
  cfg.cycle_hulls = tier == RunTier::kEC || tier == RunTier::kECB;

  BoundsState bounds = initial_bounds(net, cfg);
  Network tight = net;
  if (with_obbt) {
    ObbtOptions o;
    o.max_iterations = config.obbt_iters;
    // Half the budget, so the tree search always gets time for a bound.
    o.time_limit = 0.5 * config.time_limit;
    o.threads = config.threads;
    // Subproblems use the plain relaxation: the cycle hulls cost ten times
    // more per solve and barely move the bounds.
    RelaxationConfig obbt_cfg;
    obbt_cfg.formulation = cfg.formulation;
    bounds = tighten(net, obbt_cfg, o);
    bounds.y.assign(cfg.cycle_hulls ? 2 * cfg.cycles.size() : 0, {config.all_on ? 1.0 : 0.0, 1.0});
    report.obbt_iterations = bounds.iterations;
    apply_bounds(bounds, tight);
  }

  if (bounds.infeasible) {
    report.lb = kInf;
    report.termination = to_string(Termination::kInfeasible);
    report.wall_time_s = elapsed();
    return report;
  }

  Relaxation relax = build_relaxation(tight, cfg);
  apply_fixings(bounds, relax);

  CutOptions opt;
  opt.gap_tol = config.gap_tol;
  opt.time_limit = std::max(0.0, config.time_limit - elapsed());
  opt.max_cuts = config.max_cuts;
  for (const BranchVars& b : relax.qc.branch) opt.heuristic_vars.push_back(b.z);
  if (tier == RunTier::kEC || tier == RunTier::kECB) {
    auto pattern = e_tier_pattern(tight, bounds, relax, config.all_on);
    if (!pattern.empty()) opt.warm_starts.push_back(std::move(pattern));
  }

  SolveReport sr = tier == RunTier::kECBStar ? branch_and_cut(relax.qc.ir, relax.blocks, opt)
                                             : branch_and_bound(relax.qc.ir, opt);
  report.lb = sr.lower_bound;
  report.nodes = sr.nodes;
  report.cuts_added = sr.cuts_added;
  report.termination = to_string(sr.termination);
  for (const std::string& w : sr.warnings) report.warnings.push_back(w);
  if (sr.incumbent) {
    for (std::size_t l = 0; l < relax.qc.branch.size(); ++l) {
      if (sr.incumbent->x[relax.qc.branch[l].z.id] < 0.5) report.switching.push_back(static_cast<int>(l) + 1);
    }
  }

  if (config.ub) {
    report.ub = config.ub;
  } else {
    const std::string table = config.ub_table.empty() ? default_ub_table() : config.ub_table;
    try {
      auto ubs = read_reference_ub(table);
      auto it = ubs.find(report.case_name);
      if (it != ubs.end()) report.ub = it->second;
    } catch (const std::runtime_error& e) {
      report.warnings.push_back(e.what());
    }
  }
  if (report.ub && std::isfinite(report.lb) && report.lb > 0) report.gap_percent = optimality_gap(*report.ub, report.lb);
  report.wall_time_s = elapsed();
  return report;
}

}  // namespace acots
