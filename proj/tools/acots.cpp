#include <cmath>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "acots/obbt.hpp"
#include "acots/run.hpp"

using namespace acots;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitTimeLimit = 4;

void write_json(const std::string& path, const nlohmann::json& j) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

Network load(const std::string& path, double load_scale) {
  std::vector<std::string> warnings;
  Network net = read_matpower_file(path, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  if (load_scale != 1.0) scale_load(net, load_scale);
  return net;
}

int exit_code(const RunReport& r) {
  if (r.termination == "infeasible") return kExitSolver;
  if (!std::isfinite(r.lb)) return r.termination == "time_limit" ? kExitTimeLimit : kExitSolver;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex relaxations and bounds for AC optimal transmission switching"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string tier = "e", output;

  auto add_case = [&](CLI::App* sub) {
    sub->add_option("--case", cfg.case_path, "MATPOWER case file")->required();
    sub->add_option("--load-scale", cfg.load_scale, "Multiply every demand by this factor")->check(CLI::PositiveNumber);
    sub->add_option("--output", output, "Write the JSON result here");
  };

  CLI::App* solve = app.add_subcommand("solve", "Solve a relaxation tier and report the bound");
  add_case(solve);
  solve->add_option("--tier", tier, "pm, e, ec, ecb or ecb-star")
      ->check(CLI::IsMember({"pm", "e", "ec", "ecb", "ecb-star"}));
  solve->add_flag("--all-on", cfg.all_on, "Fix every line on (no switching)");
  solve->add_option("--ub", cfg.ub, "Reference upper bound, overrides the table");
  solve->add_option("--ub-table", cfg.ub_table, "CSV of case_name,ub");
  solve->add_option("--time-limit", cfg.time_limit, "Seconds")->check(CLI::NonNegativeNumber);
  solve->add_option("--gap-tol", cfg.gap_tol, "Relative branch-and-bound gap")->check(CLI::NonNegativeNumber);
  solve->add_option("--max-cuts", cfg.max_cuts, "Cut budget for ecb-star")->check(CLI::NonNegativeNumber);
  solve->add_option("--obbt-iters", cfg.obbt_iters, "Bound tightening iterations for ecb, ecb-star");
  solve->add_option("--cycle-cap", cfg.cycle_cap, "Maximum number of enumerated cycles");
  solve->add_option("--seed", cfg.seed, "Recorded for reproducibility; the pipeline is deterministic");
  solve->add_option("--threads", cfg.threads, "Bound tightening threads")->check(CLI::PositiveNumber);

  CLI::App* obbt = app.add_subcommand("obbt", "Run bound tightening and write the bounds");
  add_case(obbt);
  bool obbt_hulls = false;
  obbt->add_flag("--cycle-hulls", obbt_hulls, "Include the cycle hulls in the tightening model");
  obbt->add_option("--obbt-iters", cfg.obbt_iters, "Iterations");
  obbt->add_option("--time-limit", cfg.time_limit, "Seconds")->check(CLI::NonNegativeNumber);
  obbt->add_option("--threads", cfg.threads, "Threads")->check(CLI::PositiveNumber);
  obbt->add_option("--cycle-cap", cfg.cycle_cap, "Maximum number of enumerated cycles");

  CLI::App* cycles = app.add_subcommand("cycles", "List the 3- and 4-cycles of the network");
  add_case(cycles);
  cycles->add_option("--cycle-cap", cfg.cycle_cap, "Maximum number of enumerated cycles");

  CLI::App* validate_cmd = app.add_subcommand("validate", "Parse a case and check its data");
  add_case(validate_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      cfg.tier = parse_tier(tier);
      RunReport r = run(cfg);
      for (const std::string& w : r.warnings) std::cerr << "warning: " << w << "\n";
      write_json(output, to_json(r));
      std::cout << summary_line(r) << "\n";
      return exit_code(r);
    }
    Network net = load(cfg.case_path, cfg.load_scale);
    if (*obbt) {
      RelaxationConfig rc;
      if (obbt_hulls) {
        rc.cycles = enumerate_cycles(net, cfg.cycle_cap);
        rc.cycle_hulls = true;
      }
      ObbtOptions o;
      o.max_iterations = cfg.obbt_iters;
      o.time_limit = cfg.time_limit;
      o.threads = cfg.threads;
      BoundsState s = tighten(net, rc, o);
      write_json(output, to_json(s));
      std::cout << fmt::format("{} iterations, width reduction {:.6g}, last improvement {:.3g}{}\n", s.iterations,
                               s.total_width_reduction, s.last_improvement, s.infeasible ? ", infeasible" : "");
      return s.infeasible ? kExitSolver : 0;
    }
    if (*cycles) {
      std::vector<Cycle> list = enumerate_cycles(net, cfg.cycle_cap);
      nlohmann::json j = nlohmann::json::array();
      for (const Cycle& c : list) {
        std::cout << fmt::format("{}\n", fmt::join(c.vertices, " "));
        j.push_back({{"buses", c.vertices}, {"arcs", c.arcs}, {"signs", c.signs}});
      }
      write_json(output, j);
      std::cerr << list.size() << " cycles\n";
      return 0;
    }
    std::vector<Violation> v = validate(net);
    nlohmann::json j = nlohmann::json::array();
    for (const Violation& x : v) {
      std::cout << x.entity << ": " << x.rule << "\n";
      j.push_back({{"entity", x.entity}, {"rule", x.rule}});
    }
    write_json(output, j);
    if (v.empty()) std::cout << net.buses.size() << " buses, " << net.branches.size() << " branches, ok\n";
    return v.empty() ? 0 : 1;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cfg.case_path.empty() || !std::ifstream(cfg.case_path) ? kExitParse : kExitSolver;
  }
}
