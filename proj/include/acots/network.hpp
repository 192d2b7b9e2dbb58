#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace acots {

struct Bus {
  int id = 0;
  int type = 1;
  double demand_p = 0.0, demand_q = 0.0;
  double shunt_g = 0.0, shunt_b = 0.0;
  double v_min = 0.9, v_max = 1.1;
};

struct Generator {
  int bus = 0;
  double p_min = 0.0, p_max = 0.0;
  double q_min = 0.0, q_max = 0.0;
  // Cost in file units: c2 [$/MW^2 h], c1 [$/MW h], c0 [$/h].
  double c2 = 0.0, c1 = 0.0, c0 = 0.0;
};

struct Branch {
  int from = 0, to = 0;
  double g = 0.0, b = 0.0;      // series admittance
  double g_c = 0.0, b_c = 0.0;  // charging admittance at each end
  double tap_re = 1.0, tap_im = 0.0;
  double s_max = 0.0;  // 0 means unlimited
  double theta_min = 0.0, theta_max = 0.0;
  double i_sq_max = 0.0;  // 0 means unlimited

  double tap_sq() const { return tap_re * tap_re + tap_im * tap_im; }
};

struct Network {
  std::string name;
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Generator> generators;
  std::vector<Branch> branches;
  std::set<int> ref_buses;
  // Buses with one neighbouring bus (possibly over parallel branches) and no demand.
  std::set<int> leaf_noload_buses;

  int bus_index(int id) const;
  // Recomputes the id index and leaf_noload_buses from buses and branches.
  void refresh();

 private:
  std::unordered_map<int, int> index_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

Network parse_matpower(std::string_view text, std::vector<std::string>* warnings = nullptr);
Network read_matpower_file(const std::string& path, std::vector<std::string>* warnings = nullptr);

struct Violation {
  std::string entity;
  std::string rule;
};

std::vector<Violation> validate(const Network& network);

// Multiplies every bus demand by `factor`.
void scale_load(Network& network, double factor);

}  // namespace acots
