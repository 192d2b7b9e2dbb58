#include "acots/obbt.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace acots {

Relaxation build_relaxation(const Network& network, const RelaxationConfig& config) {
  Relaxation r;
  r.qc = build_model(network, derive_line_constants(network), config.formulation);
  int id = 0;
  for (const Cycle& c : config.cycles) {
    for (CycleSpace s : {CycleSpace::kCS, CycleSpace::kW}) {
      r.blocks.push_back(make_cycle_block(r.qc, network, c, id++, s, config.cycle));
      if (config.cycle_hulls) build_cycle_hull(r.qc.ir, r.blocks.back());
    }
  }
  return r;
}

BoundsState initial_bounds(const Network& network, const RelaxationConfig& config) {
  BoundsState s;
  for (const Bus& b : network.buses) s.v.emplace_back(b.v_min, b.v_max);
  for (const Branch& br : network.branches) {
    s.theta.emplace_back(br.theta_min, br.theta_max);
    s.z.emplace_back(config.formulation.all_lines_on ? 1.0 : 0.0, 1.0);
  }
  s.y.assign(config.cycle_hulls ? 2 * config.cycles.size() : 0, {0.0, 1.0});
  if (config.formulation.all_lines_on) {
    for (auto& y : s.y) y.first = 1.0;
  }
  return s;
}

void apply_bounds(const BoundsState& state, Network& network) {
  for (std::size_t i = 0; i < network.buses.size() && i < state.v.size(); ++i) {
    network.buses[i].v_min = state.v[i].first;
    network.buses[i].v_max = state.v[i].second;
  }
  for (std::size_t l = 0; l < network.branches.size() && l < state.theta.size(); ++l) {
    network.branches[l].theta_min = state.theta[l].first;
    network.branches[l].theta_max = state.theta[l].second;
  }
}

void apply_fixings(const BoundsState& state, Relaxation& r) {
  ModelIR& ir = r.qc.ir;
  for (std::size_t l = 0; l < state.z.size() && l < r.qc.branch.size(); ++l) {
    ir.set_bounds(r.qc.branch[l].z, state.z[l].first, state.z[l].second);
  }
  for (std::size_t b = 0; b < state.y.size() && b < r.blocks.size(); ++b) {
    if (r.blocks[b].y.id >= 0) ir.set_bounds(r.blocks[b].y, state.y[b].first, state.y[b].second);
  }
}

nlohmann::json to_json(const BoundsState& s) {
  return {{"v", s.v},
          {"theta", s.theta},
          {"z", s.z},
          {"y", s.y},
          {"iterations", s.iterations},
          {"total_width_reduction", s.total_width_reduction},
          {"last_improvement", s.last_improvement},
          {"infeasible", s.infeasible}};
}

BoundsState bounds_from_json(const nlohmann::json& j) {
  BoundsState s;
  j.at("v").get_to(s.v);
  j.at("theta").get_to(s.theta);
  j.at("z").get_to(s.z);
  j.at("y").get_to(s.y);
  s.iterations = j.at("iterations").get<int>();
  s.total_width_reduction = j.at("total_width_reduction").get<double>();
  s.last_improvement = j.at("last_improvement").get<double>();
  s.infeasible = j.at("infeasible").get<bool>();
  return s;
}

namespace {

enum class Target { kV, kTheta, kZ, kY };

struct Task {
  Target target;
  int index;
  bool maximize;
  double result = 0.0;
  bool infeasible = false;
  bool failed = false;
};

double width(const std::pair<double, double>& b) { return b.second - b.first; }

void solve_task(const Relaxation& r, Task& t, const ContinuousOptions& solver) {
  ModelIR ir = r.qc.ir;
  Var v;
  switch (t.target) {
    case Target::kV:
      v = r.qc.bus[t.index].v;
      break;
    case Target::kTheta:
      v = r.qc.branch[t.index].theta;
      ir.fix(r.qc.branch[t.index].z, 1.0);
      break;
    case Target::kZ:
      v = r.qc.branch[t.index].z;
      break;
    case Target::kY:
      v = r.blocks[t.index].y;
      break;
  }
  ir.objective() = {};
  ir.objective().linear = LinExpr().add(v, t.maximize ? -1.0 : 1.0);
  ContinuousSolution sol = solve_continuous(ir, solver);
  if (sol.status == SolveStatus::kInfeasible) {
    t.infeasible = true;
  } else if (sol.status != SolveStatus::kOptimal) {
    t.failed = true;
  } else {
    t.result = t.maximize ? -sol.objective : sol.objective;
  }
}

}  // namespace

BoundsState tighten(const Network& network, const RelaxationConfig& config, const ObbtOptions& options,
                    BoundsState start) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  BoundsState s = start.v.empty() ? initial_bounds(network, config) : std::move(start);
  Network net = network;

  for (int it = 0; it < options.max_iterations && elapsed() < options.time_limit; ++it) {
    apply_bounds(s, net);
    Relaxation r = build_relaxation(net, config);
    apply_fixings(s, r);

    std::vector<Task> tasks;
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
      for (bool mx : {false, true}) tasks.push_back({Target::kV, static_cast<int>(i), mx});
    }
    for (std::size_t l = 0; l < net.branches.size(); ++l) {
      if (s.z[l].second < 0.5) continue;
      for (bool mx : {false, true}) tasks.push_back({Target::kTheta, static_cast<int>(l), mx});
      if (s.z[l].first < 0.5) {
        for (bool mx : {false, true}) tasks.push_back({Target::kZ, static_cast<int>(l), mx});
      }
    }
    for (std::size_t b = 0; b < s.y.size(); ++b) {
      if (s.y[b].first < s.y[b].second) {
        for (bool mx : {false, true}) tasks.push_back({Target::kY, static_cast<int>(b), mx});
      }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < tasks.size(); k = next++) {
        // Past the deadline the remaining bounds stay as they are.
        if (elapsed() >= options.time_limit) {
          tasks[k].failed = true;
          continue;
        }
        solve_task(r, tasks[k], options.solver);
      }
    };
    const int threads = std::max(1, options.threads);
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    BoundsState n = s;
    for (const Task& t : tasks) {
      if (t.failed) continue;
      if (t.infeasible) {
        if (t.target == Target::kTheta) {
          // No relaxation point with this line on.
          n.z[t.index] = {0.0, 0.0};
        } else {
          n.infeasible = true;
        }
        continue;
      }
      const double lo = t.result - options.safety, hi = t.result + options.safety;
      switch (t.target) {
        case Target::kV:
          if (t.maximize) n.v[t.index].second = std::min(n.v[t.index].second, hi);
          else n.v[t.index].first = std::max(n.v[t.index].first, lo);
          break;
        case Target::kTheta:
          if (t.maximize) n.theta[t.index].second = std::min(n.theta[t.index].second, hi);
          else n.theta[t.index].first = std::max(n.theta[t.index].first, lo);
          break;
        case Target::kZ:
          if (!t.maximize && t.result > options.fix_tol) n.z[t.index] = {1.0, 1.0};
          if (t.maximize && t.result < 1.0 - options.fix_tol) n.z[t.index] = {0.0, 0.0};
          break;
        case Target::kY:
          if (!t.maximize && t.result > options.fix_tol) n.y[t.index] = {1.0, 1.0};
          if (t.maximize && t.result < 1.0 - options.fix_tol) n.y[t.index] = {0.0, 0.0};
          break;
      }
    }
    ++n.iterations;
    if (n.infeasible) return n;

    double improvement = 0.0, reduction = 0.0;
    auto merge = [&](std::vector<std::pair<double, double>>& now, const std::vector<std::pair<double, double>>& before) {
      for (std::size_t k = 0; k < now.size(); ++k) {
        if (now[k].first > now[k].second) {
          const double mid = 0.5 * (now[k].first + now[k].second);
          now[k] = {mid, mid};
        }
        improvement = std::max({improvement, now[k].first - before[k].first, before[k].second - now[k].second});
        reduction += width(before[k]) - width(now[k]);
      }
    };
    merge(n.v, s.v);
    merge(n.theta, s.theta);
    merge(n.z, s.z);
    merge(n.y, s.y);
    n.last_improvement = improvement;
    n.total_width_reduction += reduction;
    s = std::move(n);
    if (improvement < options.conv_tol) break;
  }
  return s;
}

}  // namespace acots
