#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "acots/cyclecuts.hpp"
#include "acots/model.hpp"
#include "acots/solver.hpp"

namespace acots {

enum class Termination { kTolerance, kTimeLimit, kNodeLimit, kInfeasible };

const char* to_string(Termination t);

struct Incumbent {
  std::vector<std::pair<int, double>> pattern;  // branching variable id and value
  double objective = 0.0;
  std::vector<double> x;
};

struct SolveReport {
  double lower_bound = -kInf;
  std::optional<Incumbent> incumbent;
  std::optional<double> gap_vs_reference;  // percent, filled by callers holding a reference bound
  long nodes = 0;
  int cuts_added = 0;
  std::vector<Cut> cuts;  // in the order they were added
  double wall_time = 0.0;
  Termination termination = Termination::kTolerance;
  int numerical_failures = 0;
  double root_bound = -kInf;
  std::vector<std::string> warnings;
};

struct BranchOptions {
  double gap_tol = 1e-3;
  double integrality_tol = 1e-6;
  double time_limit = 7200.0;
  long node_limit = 100000;
  // Variables rounded by the incumbent heuristic; all integer variables when empty.
  std::vector<Var> heuristic_vars;
  // Patterns evaluated before the search, e.g. all lines on.
  std::vector<std::vector<std::pair<int, double>>> warm_starts;
  ContinuousOptions solver;
};

struct CutOptions : BranchOptions {
  int max_cuts = 200;
  double violation_tol = 1e-6;
  int max_rounds_per_node = 20;
};

// Best-bound branch and bound on the model's integer variables.
SolveReport branch_and_bound(const ModelIR& model, const BranchOptions& options = {});

// Branch and bound that separates cycle cuts at the root and at integral
// nodes, for blocks whose lines are all on. Cuts are added to `model`.
SolveReport branch_and_cut(ModelIR& model, std::vector<CycleBlock>& blocks, const CutOptions& options = {});

}  // namespace acots
