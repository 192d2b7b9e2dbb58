#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "acots/network.hpp"

namespace acots {

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
      line_(line),
      column_(column) {}

namespace {

struct Matrix {
  std::vector<std::vector<double>> rows;
  int line = 0;
};

class Scanner {
 public:
  explicit Scanner(std::string_view text) : s_(text) {}

  bool done() {
    skip_blank(true);
    return pos_ >= s_.size();
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  int line() const { return line_; }
  int column() const { return col_; }

  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  // Skips spaces and comments; newlines too when `newlines` is set.
  void skip_blank(bool newlines) {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '%') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (c == '.' && s_.substr(pos_, 3) == "...") {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
        if (pos_ < s_.size()) advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string identifier() {
    std::string out;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '.')) {
      out += s_[pos_];
      advance();
    }
    return out;
  }

  void expect(char c) {
    skip_blank(false);
    if (peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  double number() {
    std::size_t start = pos_;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '+' || c == '-') {
        advance();
      } else {
        break;
      }
    }
    std::string tok(s_.substr(start, pos_ - start));
    if (tok == "Inf" || tok == "inf" || tok == "+Inf") return INFINITY;
    if (tok == "-Inf" || tok == "-inf") return -INFINITY;
    if (tok == "NaN" || tok == "nan") return NAN;
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      col_ -= static_cast<int>(pos_ - start);
      fail("invalid number '" + tok + "'");
    }
    return 0.0;
  }

  std::string rest_of_line() {
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '\n') {
      out += s_[pos_];
      advance();
    }
    return out;
  }

  void skip_until(char close) {
    while (pos_ < s_.size() && s_[pos_] != close) {
      if (s_[pos_] == '\'') {
        advance();
        while (pos_ < s_.size() && s_[pos_] != '\'') advance();
      }
      if (pos_ < s_.size()) advance();
    }
    if (pos_ >= s_.size()) fail(std::string("unterminated block, expected '") + close + "'");
    advance();
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, col_); }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

Matrix read_matrix(Scanner& sc) {
  Matrix m;
  m.line = sc.line();
  sc.expect('[');
  std::vector<double> row;
  auto end_row = [&]() {
    if (!row.empty()) m.rows.push_back(std::move(row));
    row.clear();
  };
  while (true) {
    sc.skip_blank(false);
    char c = sc.peek();
    if (c == '\0') sc.fail("unterminated matrix");
    if (c == ']') {
      sc.advance();
      break;
    }
    if (c == ';' || c == '\n') {
      sc.advance();
      end_row();
      continue;
    }
    if (c == ',') {
      sc.advance();
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.' || c == 'I' || c == 'N' ||
        c == 'i' || c == 'n') {
      row.push_back(sc.number());
      continue;
    }
    sc.fail(std::string("unexpected character '") + c + "' in matrix");
  }
  end_row();
  sc.skip_blank(false);
  if (sc.peek() == ';') sc.advance();
  return m;
}

double col(const std::vector<double>& r, std::size_t i, double fallback) {
  return i < r.size() ? r[i] : fallback;
}

}  // namespace

int Network::bus_index(int id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown bus id " + std::to_string(id));
  return it->second;
}

void Network::refresh() {
  index_.clear();
  for (std::size_t i = 0; i < buses.size(); ++i) index_[buses[i].id] = static_cast<int>(i);
  std::map<int, std::set<int>> nbrs;
  for (const Branch& br : branches) {
    nbrs[br.from].insert(br.to);
    nbrs[br.to].insert(br.from);
  }
  leaf_noload_buses.clear();
  for (const Bus& b : buses) {
    if (nbrs[b.id].size() == 1 && b.demand_p == 0.0 && b.demand_q == 0.0) leaf_noload_buses.insert(b.id);
  }
}

Network parse_matpower(std::string_view text, std::vector<std::string>* warnings) {
  auto warn = [&](const std::string& w) {
    if (warnings) warnings->push_back(w);
  };
  Scanner sc(text);
  std::map<std::string, Matrix> mats;
  std::optional<double> base_mva;
  std::string name;
  while (!sc.done()) {
    const int line = sc.line(), column = sc.column();
    std::string id = sc.identifier();
    if (id.empty()) sc.fail(std::string("unexpected character '") + sc.peek() + "'");
    if (id == "function") {
      std::string rest = sc.rest_of_line();
      auto eq = rest.find('=');
      name = rest.substr(eq == std::string::npos ? 0 : eq + 1);
      name.erase(0, name.find_first_not_of(" \t"));
      name.erase(name.find_last_not_of(" \t\r;") + 1);
      continue;
    }
    sc.skip_blank(false);
    if (sc.peek() != '=') {
      // Bare statements (e.g. `end`) are ignored.
      sc.skip_blank(false);
      if (sc.peek() == ';') sc.advance();
      continue;
    }
    sc.advance();
    sc.skip_blank(false);
    const char c = sc.peek();
    if (id.rfind("mpc.", 0) != 0) throw ParseError("unexpected assignment to '" + id + "'", line, column);
    const std::string field = id.substr(4);
    if (c == '[') {
      mats[field] = read_matrix(sc);
    } else if (c == '{') {
      sc.skip_until('}');
      sc.skip_blank(false);
      if (sc.peek() == ';') sc.advance();
    } else if (c == '\'') {
      sc.advance();
      sc.skip_until('\'');
      sc.skip_blank(false);
      if (sc.peek() == ';') sc.advance();
    } else {
      double v = sc.number();
      sc.skip_blank(false);
      if (sc.peek() == ';') sc.advance();
      if (field == "baseMVA") base_mva = v;
    }
  }

  for (const char* req : {"bus", "gen", "branch", "gencost"}) {
    if (!mats.count(req)) throw ParseError(std::string("missing mpc.") + req, sc.line(), sc.column());
  }
  if (!base_mva) throw ParseError("missing mpc.baseMVA", sc.line(), sc.column());

  Network net;
  net.name = name;
  net.base_mva = *base_mva;
  const double base = net.base_mva;
  constexpr double kDeg = std::numbers::pi / 180.0;

  auto check_width = [&](const std::string& what, const Matrix& m, std::size_t need, std::size_t used) {
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
      if (m.rows[r].size() < need) {
        throw ParseError("mpc." + what + " row " + std::to_string(r + 1) + " has too few columns", m.line, 1);
      }
    }
    if (!m.rows.empty() && m.rows[0].size() > used) {
      warn("mpc." + what + ": " + std::to_string(m.rows[0].size() - used) + " extra columns ignored");
    }
  };

  const Matrix& bm = mats["bus"];
  check_width("bus", bm, 13, 13);
  std::set<int> isolated;
  for (const auto& r : bm.rows) {
    Bus b;
    b.id = static_cast<int>(r[0]);
    b.type = static_cast<int>(r[1]);
    if (b.type == 4) {
      isolated.insert(b.id);
      continue;
    }
    b.demand_p = r[2] / base;
    b.demand_q = r[3] / base;
    b.shunt_g = r[4] / base;
    b.shunt_b = r[5] / base;
    b.v_max = r[11];
    b.v_min = r[12];
    if (b.type == 3) net.ref_buses.insert(b.id);
    net.buses.push_back(b);
  }
  net.refresh();
  auto known = [&](int id) {
    try {
      net.bus_index(id);
      return true;
    } catch (const std::out_of_range&) {
      return false;
    }
  };

  const Matrix& gm = mats["gen"];
  const Matrix& cm = mats["gencost"];
  check_width("gen", gm, 10, 10);
  if (cm.rows.size() < gm.rows.size()) throw ParseError("mpc.gencost has fewer rows than mpc.gen", cm.line, 1);
  for (std::size_t g = 0; g < gm.rows.size(); ++g) {
    const auto& r = gm.rows[g];
    const int bus = static_cast<int>(r[0]);
    if (isolated.count(bus)) continue;
    if (!known(bus)) throw ParseError("generator " + std::to_string(g + 1) + " references unknown bus " + std::to_string(bus), gm.line, 1);
    if (r[7] <= 0) continue;
    Generator gen;
    gen.bus = bus;
    gen.q_max = r[3] / base;
    gen.q_min = r[4] / base;
    gen.p_max = r[8] / base;
    gen.p_min = r[9] / base;
    const auto& c = cm.rows[g];
    if (c.size() < 4) throw ParseError("mpc.gencost row " + std::to_string(g + 1) + " too short", cm.line, 1);
    if (static_cast<int>(c[0]) != 2) {
      throw ParseError("mpc.gencost row " + std::to_string(g + 1) + " is not polynomial (model 2)", cm.line, 1);
    }
    const int ncost = static_cast<int>(c[3]);
    if (c.size() < static_cast<std::size_t>(4 + ncost)) {
      throw ParseError("mpc.gencost row " + std::to_string(g + 1) + " has fewer coefficients than NCOST", cm.line, 1);
    }
    std::vector<double> coef(c.begin() + 4, c.begin() + 4 + ncost);  // highest order first
    while (coef.size() > 3 && coef.front() == 0.0) coef.erase(coef.begin());
    if (coef.size() > 3) {
      throw ParseError("mpc.gencost row " + std::to_string(g + 1) + " has degree > 2", cm.line, 1);
    }
    const std::size_t k = coef.size();
    gen.c0 = k >= 1 ? coef[k - 1] : 0.0;
    gen.c1 = k >= 2 ? coef[k - 2] : 0.0;
    gen.c2 = k >= 3 ? coef[k - 3] : 0.0;
    net.generators.push_back(gen);
  }

  const Matrix& brm = mats["branch"];
  check_width("branch", brm, 11, 13);
  for (std::size_t l = 0; l < brm.rows.size(); ++l) {
    const auto& r = brm.rows[l];
    const int f = static_cast<int>(r[0]), t = static_cast<int>(r[1]);
    if (r[10] <= 0) continue;
    if (isolated.count(f) || isolated.count(t)) continue;
    for (int e : {f, t}) {
      if (!known(e)) {
        throw ParseError("branch " + std::to_string(l + 1) + " references unknown bus " + std::to_string(e), brm.line, 1);
      }
    }
    Branch br;
    br.from = f;
    br.to = t;
    const double rs = r[2], xs = r[3];
    const double den = rs * rs + xs * xs;
    if (den == 0.0) throw ParseError("branch " + std::to_string(l + 1) + " has zero impedance", brm.line, 1);
    br.g = rs / den;
    br.b = -xs / den;
    br.g_c = 0.0;
    br.b_c = r[4] / 2.0;
    br.s_max = r[5] / base;
    double ratio = r[8];
    if (ratio == 0.0) ratio = 1.0;
    const double shift = r[9] * kDeg;
    br.tap_re = ratio * std::cos(shift);
    br.tap_im = ratio * std::sin(shift);
    if (!(std::abs(ratio) > 0.0)) throw ParseError("branch " + std::to_string(l + 1) + " has zero tap magnitude", brm.line, 1);
    const double amin = col(r, 11, 0.0), amax = col(r, 12, 0.0);
    const bool unlimited = (amin == 0.0 && amax == 0.0) || amin <= -360.0 || amax >= 360.0;
    if (r.size() < 13 || unlimited) {
      br.theta_min = -std::numbers::pi / 2;
      br.theta_max = std::numbers::pi / 2;
    } else {
      br.theta_min = amin * kDeg;
      br.theta_max = amax * kDeg;
    }
    net.branches.push_back(br);
  }
  net.refresh();
  return net;
}

Network read_matpower_file(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Network net = parse_matpower(ss.str(), warnings);
  if (net.name.empty()) {
    std::string base = path.substr(path.find_last_of('/') + 1);
    net.name = base.substr(0, base.rfind('.'));
  }
  return net;
}

void scale_load(Network& network, double factor) {
  for (Bus& b : network.buses) {
    b.demand_p *= factor;
    b.demand_q *= factor;
  }
  network.refresh();
}

}  // namespace acots
