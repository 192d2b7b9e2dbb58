#include "acots/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace acots {

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  constant_ += o.constant_;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  for (const Term& t : o.terms_) terms_.push_back({t.var, -t.coef});
  constant_ -= o.constant_;
  return *this;
}

LinExpr& LinExpr::operator*=(double k) {
  for (Term& t : terms_) t.coef *= k;
  constant_ *= k;
  return *this;
}

LinExpr& LinExpr::compress() {
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> out;
  for (const Term& t : terms_) {
    if (!out.empty() && out.back().var == t.var) {
      out.back().coef += t.coef;
    } else {
      out.push_back(t);
    }
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.coef == 0.0; }), out.end());
  terms_ = std::move(out);
  return *this;
}

double LinExpr::evaluate(const std::vector<double>& x) const {
  double v = constant_;
  for (const Term& t : terms_) v += t.coef * x[t.var];
  return v;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator-(LinExpr a) { return a *= -1.0; }
LinExpr operator*(double k, LinExpr a) { return a *= k; }
LinExpr operator*(LinExpr a, double k) { return a *= k; }

Var ModelIR::add_var(std::string name, double lower, double upper, bool integer) {
  if (index_.count(name)) throw std::invalid_argument("duplicate variable " + name);
  const int id = static_cast<int>(vars_.size());
  index_.emplace(name, id);
  vars_.push_back({std::move(name), lower, upper, integer});
  return Var{id};
}

Var ModelIR::var(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown variable " + name);
  return Var{it->second};
}

std::optional<Var> ModelIR::find_var(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return Var{it->second};
}

int ModelIR::add_constraint(std::string name, const LinExpr& lhs, Relation relation, const LinExpr& rhs) {
  LinExpr e = lhs - rhs;
  e.compress();
  for (const Term& t : e.terms()) {
    if (t.var < 0 || t.var >= num_vars()) throw std::out_of_range("constraint " + name + " references unknown variable");
  }
  rows_.push_back({std::move(name), e.terms(), relation, -e.constant()});
  return static_cast<int>(rows_.size()) - 1;
}

int ModelIR::add_soc(std::string name, std::vector<LinExpr> t, LinExpr r) {
  for (LinExpr& e : t) e.compress();
  r.compress();
  socs_.push_back({std::move(name), std::move(t), std::move(r)});
  return static_cast<int>(socs_.size()) - 1;
}

void ModelIR::set_bounds(Var v, double lower, double upper) {
  vars_.at(v.id).lower = lower;
  vars_.at(v.id).upper = upper;
}

double ModelIR::objective_value(const std::vector<double>& x) const {
  double v = objective_.linear.evaluate(x);
  for (const Term& q : objective_.quadratic) v += q.coef * x[q.var] * x[q.var];
  return v;
}

double ModelIR::max_violation(const std::vector<double>& x, std::string* worst) const {
  double mx = 0.0;
  auto note = [&](double v, const std::string& name) {
    if (v > mx) {
      mx = v;
      if (worst) *worst = name;
    }
  };
  for (int i = 0; i < num_vars(); ++i) {
    note(vars_[i].lower - x[i], vars_[i].name);
    note(x[i] - vars_[i].upper, vars_[i].name);
  }
  for (const LinearConstraint& r : rows_) {
    double a = 0.0;
    for (const Term& t : r.terms) a += t.coef * x[t.var];
    switch (r.relation) {
      case Relation::kLessEqual: note(a - r.rhs, r.name); break;
      case Relation::kGreaterEqual: note(r.rhs - a, r.name); break;
      case Relation::kEqual: note(std::abs(a - r.rhs), r.name); break;
    }
  }
  for (const SocConstraint& s : socs_) {
    double n2 = 0.0;
    for (const LinExpr& e : s.t) {
      const double v = e.evaluate(x);
      n2 += v * v;
    }
    note(std::sqrt(n2) - s.r.evaluate(x), s.name);
  }
  return mx;
}

namespace {

nlohmann::json bound_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double bound_from_json(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>() == "inf" ? kInf : -kInf;
  return j.get<double>();
}

nlohmann::json expr_to_json(const LinExpr& e) {
  nlohmann::json terms = nlohmann::json::array();
  for (const Term& t : e.terms()) terms.push_back({t.var, t.coef});
  return {{"terms", terms}, {"constant", e.constant()}};
}

LinExpr expr_from_json(const nlohmann::json& j) {
  LinExpr e(j.at("constant").get<double>());
  for (const auto& t : j.at("terms")) e.add(Var{t[0].get<int>()}, t[1].get<double>());
  return e;
}

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::kLessEqual: return "<=";
    case Relation::kEqual: return "=";
    case Relation::kGreaterEqual: return ">=";
  }
  return "?";
}

Relation relation_from(const std::string& s) {
  if (s == "<=") return Relation::kLessEqual;
  if (s == "=") return Relation::kEqual;
  if (s == ">=") return Relation::kGreaterEqual;
  throw std::invalid_argument("bad relation " + s);
}

}  // namespace

// Schema: variables [{name, lower, upper, integer}], linear rows in triplet
// form [row, col, value] with per-row relation/rhs, SOC blocks, objective.
nlohmann::json ModelIR::to_json() const {
  nlohmann::json j;
  j["variables"] = nlohmann::json::array();
  for (const Variable& v : vars_) {
    j["variables"].push_back(
        {{"name", v.name}, {"lower", bound_to_json(v.lower)}, {"upper", bound_to_json(v.upper)}, {"integer", v.integer}});
  }
  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json triplets = nlohmann::json::array();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    rows.push_back({{"name", rows_[r].name}, {"relation", relation_name(rows_[r].relation)}, {"rhs", rows_[r].rhs}});
    for (const Term& t : rows_[r].terms) triplets.push_back({r, t.var, t.coef});
  }
  j["linear_rows"] = rows;
  j["linear_triplets"] = triplets;
  j["soc_blocks"] = nlohmann::json::array();
  for (const SocConstraint& s : socs_) {
    nlohmann::json t = nlohmann::json::array();
    for (const LinExpr& e : s.t) t.push_back(expr_to_json(e));
    j["soc_blocks"].push_back({{"name", s.name}, {"t", t}, {"r", expr_to_json(s.r)}});
  }
  nlohmann::json quad = nlohmann::json::array();
  for (const Term& q : objective_.quadratic) quad.push_back({q.var, q.coef});
  j["objective"] = {{"linear", expr_to_json(objective_.linear)}, {"quadratic_diagonal", quad}};
  return j;
}

ModelIR ModelIR::from_json(const nlohmann::json& j) {
  ModelIR m;
  for (const auto& v : j.at("variables")) {
    m.add_var(v.at("name").get<std::string>(), bound_from_json(v.at("lower")), bound_from_json(v.at("upper")),
              v.at("integer").get<bool>());
  }
  const auto& rows = j.at("linear_rows");
  std::vector<LinExpr> lhs(rows.size());
  for (const auto& t : j.at("linear_triplets")) lhs[t[0].get<std::size_t>()].add(Var{t[1].get<int>()}, t[2].get<double>());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    m.add_constraint(rows[r].at("name").get<std::string>(), lhs[r], relation_from(rows[r].at("relation").get<std::string>()),
                     rows[r].at("rhs").get<double>());
  }
  for (const auto& s : j.at("soc_blocks")) {
    std::vector<LinExpr> t;
    for (const auto& e : s.at("t")) t.push_back(expr_from_json(e));
    m.add_soc(s.at("name").get<std::string>(), std::move(t), expr_from_json(s.at("r")));
  }
  m.objective_.linear = expr_from_json(j.at("objective").at("linear"));
  for (const auto& q : j.at("objective").at("quadratic_diagonal")) {
    m.objective_.quadratic.push_back({q[0].get<int>(), q[1].get<double>()});
  }
  return m;
}

}  // namespace acots
