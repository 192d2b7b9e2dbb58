#include <cmath>
#include <map>
#include <numbers>

#include "acots/network.hpp"

namespace acots {

std::vector<Violation> validate(const Network& net) {
  std::vector<Violation> out;
  std::map<int, std::set<int>> nbrs;
  std::set<int> ids;
  for (const Bus& b : net.buses) ids.insert(b.id);
  if (net.ref_buses.empty()) out.push_back({"network", "no reference bus"});
  for (int r : net.ref_buses) {
    if (!ids.count(r)) out.push_back({"bus " + std::to_string(r), "reference bus does not exist"});
  }
  for (const Bus& b : net.buses) {
    const std::string who = "bus " + std::to_string(b.id);
    if (!(b.v_min > 0.0)) out.push_back({who, "v_min must be positive"});
    if (b.v_min > b.v_max) out.push_back({who, "v_min exceeds v_max"});
  }
  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    const Generator& gen = net.generators[g];
    const std::string who = "generator " + std::to_string(g);
    if (!ids.count(gen.bus)) out.push_back({who, "references unknown bus " + std::to_string(gen.bus)});
    if (gen.p_min > gen.p_max) out.push_back({who, "p_min exceeds p_max"});
    if (gen.q_min > gen.q_max) out.push_back({who, "q_min exceeds q_max"});
    if (gen.c2 < 0.0) out.push_back({who, "negative quadratic cost (nonconvex objective)"});
  }
  for (std::size_t l = 0; l < net.branches.size(); ++l) {
    const Branch& br = net.branches[l];
    const std::string who = "branch " + std::to_string(l);
    for (int e : {br.from, br.to}) {
      if (!ids.count(e)) out.push_back({who, "references unknown bus " + std::to_string(e)});
    }
    nbrs[br.from].insert(br.to);
    nbrs[br.to].insert(br.from);
    if (!(br.tap_sq() > 0.0)) out.push_back({who, "zero tap magnitude"});
    if (br.theta_min > br.theta_max) out.push_back({who, "theta_min exceeds theta_max"});
    const double theta_u = std::max(std::abs(br.theta_min), std::abs(br.theta_max));
    if (theta_u > std::numbers::pi / 2 + 1e-12) {
      out.push_back({who, "angle bound " + std::to_string(theta_u) + " exceeds pi/2 (theta_u <= pi/2 assumption)"});
    }
  }
  for (const Bus& b : net.buses) {
    const bool leaf = nbrs[b.id].size() == 1 && b.demand_p == 0.0 && b.demand_q == 0.0;
    if (leaf != (net.leaf_noload_buses.count(b.id) > 0)) {
      out.push_back({"bus " + std::to_string(b.id), "leaf_noload_buses membership inconsistent"});
    }
  }
  return out;
}

}  // namespace acots
