#pragma once

#include <cstddef>
#include <vector>

#include "acots/network.hpp"

namespace acots {

struct LineConstants {
  // Per branch, indexed like Network::branches.
  std::vector<double> theta_u;
  std::vector<double> cos_chord, sin_chord;
  std::vector<double> c_min, c_max;
  std::vector<double> s_min, s_max;
  double theta_big_m = 0.0;
};

// Throws std::domain_error when an angle bound exceeds pi/2.
LineConstants derive_line_constants(const Network& network);

struct Cycle {
  std::vector<int> vertices;  // bus ids in traversal order
  std::vector<int> arcs;      // arcs[k] joins vertices[k] and vertices[k+1 mod n]
  std::vector<int> signs;     // +1 when arcs[k] points along the traversal
};

inline constexpr std::size_t kDefaultCycleCap = 5000;

// All simple 3- and 4-cycles, 3-cycles first, each group ordered by sorted
// vertex set. Parallel branches yield one cycle per branch combination.
std::vector<Cycle> enumerate_cycles(const Network& network, std::size_t cap = kDefaultCycleCap);

}  // namespace acots
