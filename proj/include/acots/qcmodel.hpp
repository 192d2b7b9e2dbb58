#pragma once

#include <array>
#include <string>
#include <vector>

#include "acots/model.hpp"
#include "acots/network.hpp"
#include "acots/prep.hpp"

namespace acots {

enum class Tier { kPM, kE };

struct FormulationOptions {
  Tier tier = Tier::kE;
  bool all_lines_on = false;
  bool include_lifted_nonlinear_cuts = true;
  bool include_current_constraints = true;
  // When true, the lifted nonlinear cuts scale both w^z terms by
  // (v_min_i + v_max_i). That variant cuts off AC points once the two ends
  // have different voltage bounds, so the default scales the from-side term
  // by (v_min_j + v_max_j).
  bool lnc_printed_form = false;
};

// Box of the trilinear terms v_i v_j c and v_i v_j s on one branch.
struct TrilinearBox {
  double vi_lo, vi_hi, vj_lo, vj_hi;
  double c_lo, c_hi, s_lo, s_hi;
};

struct TrilinearVars {
  Var vi, vj, c, s, wr, wi, z;
  std::array<Var, 8> lc{}, ls{};  // filled by add_extreme_point_block
  Var vv;                         // filled by add_mccormick_block
};

// Extreme point k (0-based) of the box: bit 2 picks v_i, bit 1 v_j, bit 0 the trig coordinate.
std::array<double, 3> extreme_point(const TrilinearBox& box, int k, bool sine);

struct BusVars {
  Var v, w, theta;
};

struct BranchVars {
  Var z, theta, c, s, wr, wi, wz_fr, wz_to;
  Var p_fr, q_fr, p_to, q_to, l;
  TrilinearVars tri;
};

struct QcModel {
  ModelIR ir;
  std::vector<BusVars> bus;  // indexed like Network::buses
  std::vector<BranchVars> branch;
  std::vector<Var> pg, qg;
  std::vector<TrilinearBox> boxes;
  double theta_big_m = 0.0;
};

QcModel build_model(const Network& network, const LineConstants& constants, const FormulationOptions& options);

// An AC operating point: voltages per bus (indexed like Network::buses),
// dispatch per generator, and a 0/1 status per branch.
struct AcPoint {
  std::vector<double> vm, va, pg, qg;
  std::vector<int> z;
};

// Values of every model variable at the lifted image of `point`.
std::vector<double> lift_ac_point(const QcModel& m, const Network& network, const AcPoint& point);

// Sub-builders used by build_model; exposed for tests and oracles.
void add_flow_block(QcModel& m, const Network& network, int branch, const FormulationOptions& options);
void add_trig_envelopes(QcModel& m, const Network& network, const LineConstants& constants, int branch,
                        const FormulationOptions& options);
void add_extreme_point_block(ModelIR& ir, TrilinearVars& vars, const TrilinearBox& box, const std::string& tag);
void add_mccormick_block(ModelIR& ir, TrilinearVars& vars, const TrilinearBox& box, const std::string& tag);
void add_valid_inequalities(QcModel& m, const Network& network, int branch, const FormulationOptions& options);

// Product w = x * y on the box when z = 1; w = 0 when z = 0, with x and y
// either zero or anywhere in their boxes.
struct OnOffBox {
  double x_lo, x_hi, y_lo, y_hi;
  bool x_zero_off, y_zero_off;
};
void add_onoff_product(ModelIR& ir, Var w, Var x, Var y, Var z, const OnOffBox& box, const std::string& tag);

// Interval product bounds.
std::pair<double, double> product_range(double a_lo, double a_hi, double b_lo, double b_hi);

}  // namespace acots
