#pragma once

#include <array>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "acots/network.hpp"
#include "acots/qcmodel.hpp"

namespace acots {

// (ub - lb) / lb * 100. Throws std::domain_error when lb <= 0.
double optimality_gap(double ub, double lb);

// Reference upper bounds, "case_name,ub" with a header row.
std::map<std::string, double> read_reference_ub(const std::string& path);
// Case name for the table: file stem without a "pglib_opf_" prefix.
std::string reference_case_name(const std::string& case_path);

// One point of the on/off trilinear set of a branch, in the order
// (w^R, w^I, c, s, lambda^c, lambda^s, z, v_i, v_j).
struct TrilinearPoint {
  double wr = 0.0, wi = 0.0, c = 0.0, s = 0.0;
  std::array<double, 8> lc{}, ls{};
  double z = 0.0, vi = 0.0, vj = 0.0;
};

struct RowResidual {
  double value = 0.0;
  std::string row;
};

// Largest violation of the extreme-point rows at the point, with the row name.
RowResidual extreme_point_residual(const TrilinearPoint& p, const TrilinearBox& box);
// Distance of the point from H0 (everything zero but v, v in its box).
RowResidual h0_residual(const TrilinearPoint& p, const TrilinearBox& box);
// Violation of the on-state rows: z = 1, w and c, s from lambda, the link, and
// v equal to both lambda combinations.
RowResidual h1_residual(const TrilinearPoint& p, const TrilinearBox& box);

// Box of a typical line: v in [0.8, 1.15] and an angle range inside [-pi/2, pi/2].
TrilinearBox random_trilinear_box(std::mt19937& rng);

// Vertex of the extreme-point set for a random objective, z restricted to
// [z_lo, z_hi], snapped so its sums hold to rounding.
TrilinearPoint sample_h_point(std::mt19937& rng, const TrilinearBox& box, double z_lo, double z_hi);

struct DecompositionResult {
  TrilinearPoint eta0, eta1;
  double h0 = 0.0;             // residual of eta0 in H0
  double h1 = 0.0;             // residual of eta1 in H1
  double recombination = 0.0;  // max |(1 - z) eta0 + z eta1 - point|
  double max() const;
};

// Splits a point of H with z in (0, 1) into eta0 in H0 and eta1 in H1.
// Throws std::invalid_argument naming the row when the point violates H by
// more than tol, or when z is outside (0, 1).
DecompositionResult check_theorem1(const TrilinearPoint& point, const TrilinearBox& box, double tol = 1e-9);

struct CycleResiduals {
  double sum_form = 0.0;     // c_ik = c_ij c_jk - s_ij s_jk, s_ik = c_ij s_jk + s_ij c_jk
  double product_form = 0.0;  // the two three-term identities with constants 1 and 0
};

// Residuals of both 3-cycle forms at (c, s) for arcs ij, jk, ik.
CycleResiduals cycle3_residuals(const std::array<double, 3>& c, const std::array<double, 3>& s);
// True when the exact values for theta_ik = theta_ij + theta_jk satisfy both forms to 1e-12.
bool check_prop1(double theta_ij, double theta_jk);

// Coefficients of a linear objective over (v_i, v_j, c, s, w^R, w^I).
using HullObjective = std::array<double, 6>;

// Minimum over a grid_n^4 grid of exact points (v_i, v_j, c, s, v_i v_j c, v_i v_j s)
// of the on-state box.
double brute_force_hull_bound(const TrilinearBox& box, const HullObjective& objective, int grid_n);

enum class TrilinearRelaxation { kExtremePoint, kMcCormick };

// LP minimum of the objective over the on-state relaxation of the box.
double relaxation_hull_bound(const TrilinearBox& box, const HullObjective& objective, TrilinearRelaxation kind);

// Point of the nonconvex model: per-bus magnitudes and angles, per-branch
// status and end flows, per-generator dispatch, all in p.u.
struct NonconvexPoint {
  std::vector<double> vm, va;
  std::vector<int> z;
  std::vector<double> p_fr, q_fr, p_to, q_to;
  std::vector<double> pg, qg;
  // Lifted values; derived from vm, va and z when left empty.
  std::vector<double> w, wr, wi;
};

struct ViolationReport {
  // Family -> largest absolute residual: "balance", "flow_fr", "flow_to", "w", "W".
  std::map<std::string, double> max_residual;
  std::string worst;  // "family[index]"
  double worst_value = 0.0;
  bool feasible = false;  // worst_value <= tol
};

// Residuals of power balance, both end flows, w = v^2 and W = z V_i conj(V_j)
// with z substituted. Throws std::invalid_argument when a vector has the wrong length.
ViolationReport check_nonconvex_feasibility(const Network& network, const NonconvexPoint& point, double tol = 1e-6);

}  // namespace acots
