#pragma once

#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace acots {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Var {
  int id = -1;
};

struct Term {
  int var;
  double coef;
};

// Affine expression sum(coef * var) + constant.
class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(double constant) : constant_(constant) {}  // NOLINT
  LinExpr(Var v) { terms_.push_back({v.id, 1.0}); }  // NOLINT

  LinExpr& add(Var v, double coef) {
    terms_.push_back({v.id, coef});
    return *this;
  }
  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double k);

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }
  void set_constant(double c) { constant_ = c; }
  // Merges duplicate variables and drops zero coefficients.
  LinExpr& compress();
  double evaluate(const std::vector<double>& x) const;

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a);
LinExpr operator*(double k, LinExpr a);
LinExpr operator*(LinExpr a, double k);

struct Variable {
  std::string name;
  double lower = -kInf;
  double upper = kInf;
  bool integer = false;
};

struct LinearConstraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

// ||t|| <= r
struct SocConstraint {
  std::string name;
  std::vector<LinExpr> t;
  LinExpr r;
};

// Objective: linear part plus sum of quad[k].coef * x_{quad[k].var}^2.
struct Objective {
  LinExpr linear;
  std::vector<Term> quadratic;
};

class ModelIR {
 public:
  Var add_var(std::string name, double lower, double upper, bool integer = false);
  Var var(const std::string& name) const;
  std::optional<Var> find_var(const std::string& name) const;
  bool has_var(const std::string& name) const { return index_.count(name) > 0; }

  // lhs (relation) rhs, moved to sum(a x) (relation) b form.
  int add_constraint(std::string name, const LinExpr& lhs, Relation relation, const LinExpr& rhs = {});
  int add_soc(std::string name, std::vector<LinExpr> t, LinExpr r);

  void set_bounds(Var v, double lower, double upper);
  void fix(Var v, double value) { set_bounds(v, value, value); }
  Objective& objective() { return objective_; }
  const Objective& objective() const { return objective_; }

  int num_vars() const { return static_cast<int>(vars_.size()); }
  const std::vector<Variable>& vars() const { return vars_; }
  std::vector<Variable>& mutable_vars() { return vars_; }
  const Variable& variable(Var v) const { return vars_.at(v.id); }
  const std::vector<LinearConstraint>& constraints() const { return rows_; }
  const std::vector<SocConstraint>& socs() const { return socs_; }

  double objective_value(const std::vector<double>& x) const;
  // Largest violation of bounds, rows, and cones at x; optionally names the
  // worst offender.
  double max_violation(const std::vector<double>& x, std::string* worst = nullptr) const;

  nlohmann::json to_json() const;
  static ModelIR from_json(const nlohmann::json& j);

 private:
  std::vector<Variable> vars_;
  std::unordered_map<std::string, int> index_;
  std::vector<LinearConstraint> rows_;
  std::vector<SocConstraint> socs_;
  Objective objective_;
};

}  // namespace acots
