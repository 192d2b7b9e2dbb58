#include "acots/prep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace acots {

LineConstants derive_line_constants(const Network& network) {
  LineConstants k;
  const std::size_t m = network.branches.size();
  k.theta_u.resize(m);
  k.cos_chord.resize(m);
  k.sin_chord.resize(m);
  k.c_min.resize(m);
  k.c_max.resize(m);
  k.s_min.resize(m);
  k.s_max.resize(m);
  for (std::size_t l = 0; l < m; ++l) {
    const double lo = network.branches[l].theta_min, hi = network.branches[l].theta_max;
    k.theta_u[l] = std::max(std::abs(lo), std::abs(hi));
    if (k.theta_u[l] > std::numbers::pi / 2 + 1e-12) {
      throw std::domain_error("branch " + std::to_string(l) + " angle bound exceeds pi/2");
    }
    if (hi - lo > 1e-12) {
      k.cos_chord[l] = (std::cos(hi) - std::cos(lo)) / (hi - lo);
      k.sin_chord[l] = (std::sin(hi) - std::sin(lo)) / (hi - lo);
    } else {
      k.cos_chord[l] = -std::sin(lo);
      k.sin_chord[l] = std::cos(lo);
    }
    k.c_min[l] = std::min(std::cos(lo), std::cos(hi));
    k.c_max[l] = (lo <= 0.0 && hi >= 0.0) ? 1.0 : std::max(std::cos(lo), std::cos(hi));
    k.s_min[l] = std::sin(lo);
    k.s_max[l] = std::sin(hi);
  }
  std::vector<double> sorted = k.theta_u;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::size_t take = std::min(sorted.size(), network.buses.empty() ? 0 : network.buses.size() - 1);
  for (std::size_t i = 0; i < take; ++i) k.theta_big_m += sorted[i];
  return k;
}

namespace {

// Branch ids per unordered bus pair.
using ArcMap = std::map<std::pair<int, int>, std::vector<int>>;

const std::vector<int>& arcs_between(const ArcMap& arcs, int a, int b) {
  return arcs.at({std::min(a, b), std::max(a, b)});
}

void expand(const Network& net, const ArcMap& arcs, const std::vector<int>& seq, std::vector<Cycle>& out) {
  const std::size_t n = seq.size();
  std::vector<const std::vector<int>*> options(n);
  for (std::size_t k = 0; k < n; ++k) options[k] = &arcs_between(arcs, seq[k], seq[(k + 1) % n]);
  std::vector<std::size_t> pick(n, 0);
  while (true) {
    Cycle c;
    c.vertices = seq;
    for (std::size_t k = 0; k < n; ++k) {
      const int a = (*options[k])[pick[k]];
      c.arcs.push_back(a);
      c.signs.push_back(net.branches[a].from == seq[k] ? 1 : -1);
    }
    out.push_back(std::move(c));
    std::size_t k = 0;
    while (k < n && ++pick[k] == options[k]->size()) pick[k++] = 0;
    if (k == n) break;
  }
}

}  // namespace

std::vector<Cycle> enumerate_cycles(const Network& network, std::size_t cap) {
  ArcMap arcs;
  std::map<int, std::vector<int>> nbrs;
  for (std::size_t l = 0; l < network.branches.size(); ++l) {
    const Branch& br = network.branches[l];
    if (br.from == br.to) continue;
    auto key = std::make_pair(std::min(br.from, br.to), std::max(br.from, br.to));
    if (arcs[key].empty()) {
      nbrs[br.from].push_back(br.to);
      nbrs[br.to].push_back(br.from);
    }
    arcs[key].push_back(static_cast<int>(l));
  }
  for (auto& [v, list] : nbrs) std::sort(list.begin(), list.end());
  auto adjacent = [&](int a, int b) { return arcs.count({std::min(a, b), std::max(a, b)}) > 0; };

  std::vector<std::vector<int>> tri, quad;
  for (const auto& [a, na] : nbrs) {
    for (std::size_t x = 0; x < na.size(); ++x) {
      const int b = na[x];
      if (b <= a) continue;
      for (std::size_t y = x + 1; y < na.size(); ++y) {
        const int d = na[y];
        if (adjacent(b, d)) tri.push_back({a, b, d});
        for (int c : nbrs[b]) {
          if (c <= a || c == d || !adjacent(c, d)) continue;
          quad.push_back({a, b, c, d});
        }
      }
    }
  }
  auto by_set = [](const std::vector<int>& p, const std::vector<int>& q) {
    std::vector<int> sp = p, sq = q;
    std::sort(sp.begin(), sp.end());
    std::sort(sq.begin(), sq.end());
    return sp != sq ? sp < sq : p < q;
  };
  std::sort(tri.begin(), tri.end(), by_set);
  std::sort(quad.begin(), quad.end(), by_set);

  std::vector<Cycle> out;
  for (const auto* group : {&tri, &quad}) {
    for (const auto& seq : *group) {
      expand(network, arcs, seq, out);
      if (out.size() >= cap) {
        out.resize(cap);
        return out;
      }
    }
  }
  return out;
}

}  // namespace acots
