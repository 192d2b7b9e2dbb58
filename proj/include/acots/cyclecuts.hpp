#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "acots/model.hpp"
#include "acots/network.hpp"
#include "acots/prep.hpp"
#include "acots/qcmodel.hpp"

namespace acots {

enum class CycleSpace { kCS, kW };

const char* to_string(CycleSpace space);

// One product identity L = constant + sum coef * prod(x[idx]) over the cycle
// coordinates. L is x[lhs], w_bus * x[lhs] when factor_bus >= 0, or 0 when
// lhs < 0.
struct CycleIdentity {
  int lhs = -1;
  int factor_bus = -1;  // index into Network::buses
  double constant = 0.0;
  std::vector<std::pair<double, std::vector<int>>> terms;
};

struct CycleBlock {
  int id = 0;
  Cycle cycle;
  CycleSpace space = CycleSpace::kCS;
  std::vector<LinExpr> x;  // coordinates in model variables, orientation applied
  std::vector<std::pair<double, double>> x_bounds;  // on-state boxes
  std::vector<std::pair<int, int>> pairs;           // 0-based coordinate pairs
  std::vector<CycleIdentity> identities;
  std::vector<Var> z;           // statuses of the cycle's branches
  std::vector<Var> factor_w;    // w of factor_bus per identity, id -1 when none
  std::vector<std::pair<double, double>> factor_w_bounds;

  // Filled by the builders below.
  Var y;
  std::vector<Var> lambdas, pair_vars, u;  // u[e] = w * x[lhs] for factored identities

  // Row k has coordinate j at its upper bound when bit j of k is set.
  std::vector<std::vector<double>> extreme_matrix() const;
  // Value of identity e's product side at a coordinate vector.
  double identity_terms(int e, const std::vector<double>& x) const;
};

struct CycleOptions {
  // Adds the two three-term 3-cycle identities to the c-s hull.
  bool include_trilinear_identities = false;
};

// Coordinates, boxes, and identities of `cycle` in one space. Boxes come from
// the model's trilinear boxes, so they follow the network's current bounds.
CycleBlock make_cycle_block(const QcModel& m, const Network& network, const Cycle& cycle, int id, CycleSpace space,
                            const CycleOptions& options = {});

// Linearized identities gated by zhat = sum(1 - z): -M zhat <= L - terms <= M zhat,
// products replaced by McCormick pair variables. M comes from interval
// arithmetic over the boxes widened to contain 0.
void build_bigm_cycle_constraints(ModelIR& ir, CycleBlock& block);
double cycle_big_m(const CycleBlock& block, int identity);

// Extreme-point hull of the block with an on/off cycle binary y.
void build_cycle_hull(ModelIR& ir, CycleBlock& block);

struct Cut {
  int cycle_id = 0;
  CycleSpace space = CycleSpace::kCS;
  std::vector<double> beta_x;  // per coordinate
  std::vector<double> beta_l;  // per identity left-hand side
  double rhs = 0.0;
  double violation = 0.0;  // beta . point - rhs at the separated point
};

struct SeparationPoint {
  std::vector<double> x;  // coordinates
  std::vector<double> l;  // identity left-hand sides
};

// Coordinates and left-hand sides at model values. Factored identities read u
// when present and use w * x otherwise.
SeparationPoint separation_point(const CycleBlock& block, const std::vector<double>& values);

// Benders feasibility cut for the y = 1 hull, or nothing when the point is in it.
std::optional<Cut> separate(const CycleBlock& block, const SeparationPoint& point, double violation_tol = 1e-6,
                            std::string* warning = nullptr);

// max over the y = 1 hull of beta . (x, l) - rhs, by LP.
double cut_validity_gap(const CycleBlock& block, const Cut& cut);

// Adds the cut to the model, creating u variables when needed. With
// globalize, the row carries M * zhat so it stays valid when lines switch off.
void add_cut(ModelIR& ir, CycleBlock& block, const Cut& cut, bool globalize = true);

// Ensures u variables with McCormick rows exist for factored identities.
void ensure_u_vars(ModelIR& ir, CycleBlock& block);

}  // namespace acots
