#include "acots/mip.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <set>

namespace acots {

namespace {

using Fixings = std::vector<std::pair<int, double>>;

struct Node {
  Fixings fixings;
  double bound;
  int depth;
  long order;
};

struct NodeOrder {
  // Best bound first; ties to the older node.
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.order > b.order;
  }
};

class Search {
 public:
  Search(ModelIR& model, std::vector<CycleBlock>* blocks, const CutOptions& options)
      : model_(model), blocks_(blocks), opt_(options), start_(std::chrono::steady_clock::now()) {
    for (int v = 0; v < model_.num_vars(); ++v) {
      if (model_.vars()[v].integer) integers_.push_back(v);
    }
    if (opt_.heuristic_vars.empty()) {
      heuristic_ = integers_;
    } else {
      for (Var v : opt_.heuristic_vars) heuristic_.push_back(v.id);
    }
  }

  SolveReport run() {
    for (const Fixings& f : opt_.warm_starts) try_pattern(f);

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push({{}, -kInf, 0, order_++});
    bool root = true;
    report_.termination = Termination::kTolerance;
    while (!open.empty()) {
      const double best_open = open.top().bound;
      if (has_incumbent() && closed(best_open)) break;
      if (elapsed() > opt_.time_limit) {
        report_.termination = Termination::kTimeLimit;
        break;
      }
      if (report_.nodes >= opt_.node_limit) {
        report_.termination = Termination::kNodeLimit;
        break;
      }
      Node node = open.top();
      open.pop();
      if (has_incumbent() && node.bound >= report_.incumbent->objective) continue;
      ++report_.nodes;

      ContinuousSolution sol = solve_node(node.fixings, root);
      double bound = node.bound;
      if (sol.status == SolveStatus::kInfeasible) {
        root = false;
        continue;
      }
      const bool ok = sol.status == SolveStatus::kOptimal;
      if (!ok) {
        ++report_.numerical_failures;
        report_.warnings.push_back(std::string("node solve: ") + to_string(sol.status) + " " + sol.message);
      } else {
        bound = std::max(bound, sol.objective);
      }
      if (root) {
        report_.root_bound = ok ? sol.objective : -kInf;
        root = false;
      }

      const int branch_var = ok ? most_fractional(sol.x) : first_unfixed(node.fixings);
      if (branch_var < 0) {
        if (ok) offer(sol);
        continue;
      }
      if (ok) round_and_try(sol.x, node.fixings);
      if (has_incumbent() && bound >= report_.incumbent->objective) continue;
      for (double value : {0.0, 1.0}) {
        Node child{node.fixings, bound, node.depth + 1, order_++};
        child.fixings.emplace_back(branch_var, value);
        open.push(child);
      }
    }

    double lb = has_incumbent() ? report_.incumbent->objective : kInf;
    if (!open.empty()) lb = std::min(lb, open.top().bound);
    report_.lower_bound = lb;
    if (!has_incumbent() && open.empty() && report_.termination == Termination::kTolerance) {
      report_.termination = Termination::kInfeasible;
    }
    report_.wall_time = elapsed();
    return report_;
  }

 private:
  bool has_incumbent() const { return report_.incumbent.has_value(); }

  bool closed(double bound) const {
    const double inc = report_.incumbent->objective;
    if (!std::isfinite(bound)) return false;
    return inc - bound <= opt_.gap_tol * std::max(std::abs(bound), 1e-9);
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  ModelIR with_fixings(const Fixings& f) const {
    ModelIR ir = model_;
    for (const auto& [v, value] : f) ir.fix(Var{v}, value);
    return ir;
  }

  // Solves the node and, for cut runs, separates at the root and at integral
  // solutions until no violated cut remains.
  ContinuousSolution solve_node(const Fixings& f, bool root) {
    ContinuousSolution sol = solve_continuous(with_fixings(f), opt_.solver);
    if (!blocks_) return sol;
    for (int round = 0; round < opt_.max_rounds_per_node; ++round) {
      if (sol.status != SolveStatus::kOptimal) break;
      if (!root && most_fractional(sol.x) >= 0) break;
      if (!separate_round(sol.x)) break;
      sol = solve_continuous(with_fixings(f), opt_.solver);
    }
    return sol;
  }

  bool separate_round(const std::vector<double>& x) {
    if (report_.cuts_added >= opt_.max_cuts) return false;
    struct Found {
      Cut cut;
      int block;
    };
    std::vector<Found> found;
    for (std::size_t i = 0; i < blocks_->size(); ++i) {
      CycleBlock& b = (*blocks_)[i];
      bool on = true;
      for (Var z : b.z) on = on && x[z.id] >= 1.0 - opt_.integrality_tol;
      if (!on) continue;
      std::string warning;
      auto cut = separate(b, separation_point(b, x), opt_.violation_tol, &warning);
      if (!warning.empty()) report_.warnings.push_back(warning);
      if (cut) found.push_back({*cut, static_cast<int>(i)});
    }
    if (found.empty()) return false;
    std::stable_sort(found.begin(), found.end(), [](const Found& a, const Found& b) {
      if (a.cut.violation != b.cut.violation) return a.cut.violation > b.cut.violation;
      return a.cut.cycle_id < b.cut.cycle_id;
    });
    for (const Found& f : found) {
      if (report_.cuts_added >= opt_.max_cuts) break;
      add_cut(model_, (*blocks_)[f.block], f.cut);
      report_.cuts.push_back(f.cut);
      ++report_.cuts_added;
    }
    return true;
  }

  int most_fractional(const std::vector<double>& x) const {
    int best = -1;
    double best_frac = opt_.integrality_tol;
    for (int v : integers_) {
      const double frac = std::abs(x[v] - std::round(x[v]));
      if (frac > best_frac + 1e-12) {
        best = v;
        best_frac = frac;
      }
    }
    return best;
  }

  int first_unfixed(const Fixings& f) const {
    for (int v : integers_) {
      const Variable& var = model_.vars()[v];
      if (var.lower == var.upper) continue;
      bool fixed = false;
      for (const auto& p : f) fixed = fixed || p.first == v;
      if (!fixed) return v;
    }
    return -1;
  }

  void offer(const ContinuousSolution& sol) {
    if (has_incumbent() && sol.objective >= report_.incumbent->objective) return;
    Incumbent inc;
    inc.objective = sol.objective;
    inc.x = sol.x;
    for (int v : heuristic_) inc.pattern.emplace_back(v, std::round(sol.x[v]));
    report_.incumbent = inc;
  }

  void try_pattern(const Fixings& pattern) {
    std::vector<int> key;
    for (const auto& [v, value] : pattern) key.push_back(value > 0.5 ? v : -v - 1);
    std::sort(key.begin(), key.end());
    if (!tried_.insert(key).second) return;
    ContinuousSolution sol = solve_node(pattern, false);
    if (sol.status != SolveStatus::kOptimal) return;
    if (most_fractional(sol.x) >= 0) return;
    offer(sol);
  }

  void round_and_try(const std::vector<double>& x, const Fixings& node) {
    Fixings pattern = node;
    for (int v : heuristic_) {
      bool fixed = false;
      for (const auto& p : node) fixed = fixed || p.first == v;
      if (!fixed) pattern.emplace_back(v, x[v] >= 0.5 ? 1.0 : 0.0);
    }
    try_pattern(pattern);
  }

  ModelIR& model_;
  std::vector<CycleBlock>* blocks_;
  CutOptions opt_;
  std::chrono::steady_clock::time_point start_;
  std::vector<int> integers_, heuristic_;
  std::set<std::vector<int>> tried_;
  SolveReport report_;
  long order_ = 0;
};

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kTolerance:
      return "tolerance";
    case Termination::kTimeLimit:
      return "time_limit";
    case Termination::kNodeLimit:
      return "node_limit";
    case Termination::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

SolveReport branch_and_bound(const ModelIR& model, const BranchOptions& options) {
  ModelIR copy = model;
  CutOptions opt;
  static_cast<BranchOptions&>(opt) = options;
  return Search(copy, nullptr, opt).run();
}

SolveReport branch_and_cut(ModelIR& model, std::vector<CycleBlock>& blocks, const CutOptions& options) {
  return Search(model, &blocks, options).run();
}

}  // namespace acots
