#pragma once

#include <string>
#include <vector>

#include "acots/conic.hpp"
#include "acots/model.hpp"

namespace acots {

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kNumerical };

const char* to_string(SolveStatus status);

struct ContinuousOptions {
  IpmSettings ipm;
  bool presolve = true;
};

struct ContinuousSolution {
  SolveStatus status = SolveStatus::kNumerical;
  bool inaccurate = false;
  double objective = 0.0;
  // Dual objective of the conic subproblem, a valid lower bound up to the
  // solver's feasibility tolerance.
  double dual_bound = 0.0;
  std::vector<double> x;
  // Row multipliers in the convention c + sum_r dual_r * a_r + ... = 0, so
  // <= rows have dual >= 0 and >= rows have dual <= 0.
  std::vector<double> row_duals;
  // For infeasible problems solved without presolve: multipliers y on the
  // rows (same sign convention) proving infeasibility.
  std::vector<double> farkas_rows;
  int iterations = 0;
  std::string message;
};

struct SubsolverCapabilities {
  bool linear_rows = true;
  bool soc_blocks = true;
  bool quadratic_objective = true;
};

class Subsolver {
 public:
  virtual ~Subsolver() = default;
  virtual SubsolverCapabilities capabilities() const = 0;
  // Integrality flags are ignored: integer variables range over their bounds.
  virtual ContinuousSolution solve(const ModelIR& model) const = 0;
};

class ConicIpmSubsolver : public Subsolver {
 public:
  explicit ConicIpmSubsolver(ContinuousOptions options = {}) : options_(options) {}
  SubsolverCapabilities capabilities() const override { return {}; }
  ContinuousSolution solve(const ModelIR& model) const override;

 private:
  ContinuousOptions options_;
};

ContinuousSolution solve_continuous(const ModelIR& model, const ContinuousOptions& options = {});

}  // namespace acots
