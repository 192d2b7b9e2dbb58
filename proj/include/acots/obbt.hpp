#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "acots/cyclecuts.hpp"
#include "acots/network.hpp"
#include "acots/prep.hpp"
#include "acots/qcmodel.hpp"
#include "acots/solver.hpp"

namespace acots {

// What a relaxation is assembled from, apart from the network's bounds.
struct RelaxationConfig {
  FormulationOptions formulation;
  std::vector<Cycle> cycles;
  bool cycle_hulls = false;  // embed the c-s and w hull of every cycle
  CycleOptions cycle;
};

struct Relaxation {
  QcModel qc;
  std::vector<CycleBlock> blocks;  // c-s then w block per cycle, ids 0, 1, ...
};

// Blocks are created for every cycle; hull rows are added only with cycle_hulls.
Relaxation build_relaxation(const Network& network, const RelaxationConfig& config);

struct BoundsState {
  std::vector<std::pair<double, double>> v;      // per bus
  std::vector<std::pair<double, double>> theta;  // on-state angle difference per branch
  std::vector<std::pair<double, double>> z;      // per branch
  std::vector<std::pair<double, double>> y;      // per cycle block
  int iterations = 0;
  double total_width_reduction = 0.0;
  double last_improvement = 0.0;
  bool infeasible = false;
};

// Bounds of the network as given, z and y free unless all lines are on.
BoundsState initial_bounds(const Network& network, const RelaxationConfig& config);

// Writes v and angle bounds into the network.
void apply_bounds(const BoundsState& state, Network& network);
// Fixes z and y in a relaxation built from the same network and config.
void apply_fixings(const BoundsState& state, Relaxation& relaxation);

nlohmann::json to_json(const BoundsState& state);
BoundsState bounds_from_json(const nlohmann::json& j);

struct ObbtOptions {
  int max_iterations = 10;
  double conv_tol = 1e-4;
  double fix_tol = 1e-6;
  double time_limit = 7200.0;
  int threads = 1;
  // Bounds move outward by this much to absorb subsolver error.
  double safety = 1e-7;
  ContinuousOptions solver;
};

// Jacobi bound tightening: every min/max subproblem of an iteration is solved
// against the model built at the start of the iteration, then all bounds are
// merged. Constants and boxes are rebuilt from the new bounds each iteration.
BoundsState tighten(const Network& network, const RelaxationConfig& config, const ObbtOptions& options = {},
                    BoundsState start = {});

}  // namespace acots
