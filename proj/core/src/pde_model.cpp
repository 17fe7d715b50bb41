#include "pielab/pde_model.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pielab {

using nlohmann::json;

Eigen::MatrixXd build_core_lift(int n1, int n2, double a, double b) {
  const int rows = 2 * n1 + 4 * n2;
  const int cols = n1 + 2 * n2;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(rows, cols);
  auto I1 = Eigen::MatrixXd::Identity(n1, n1);
  auto I2 = Eigen::MatrixXd::Identity(n2, n2);
  int r = 0;
  t.block(r, 0, n1, n1) = I1;                      // x1(a)
  r += n1;
  t.block(r, 0, n1, n1) = I1;                      // x1(b)
  r += n1;
  t.block(r, n1, n2, n2) = I2;                     // x2(a)
  r += n2;
  t.block(r, n1, n2, n2) = I2;                     // x2(b)
  t.block(r, n1 + n2, n2, n2) = (b - a) * I2;
  r += n2;
  t.block(r, n1 + n2, n2, n2) = I2;                // dx2(a)
  r += n2;
  t.block(r, n1 + n2, n2, n2) = I2;                // dx2(b)
  return t;
}

WellPosednessReport check_wellposed(const PDESystem& sys) {
  WellPosednessReport rep;
  const int nb = sys.bc_count();
  rep.bt = sys.B * build_core_lift(sys.n1, sys.n2, sys.a, sys.b);
  if (nb == 0) {
    rep.invertible = true;
    rep.condition = 1.0;
    return rep;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_bt(rep.bt);
  const double smax = svd_bt.singularValues()(0);
  const double smin = svd_bt.singularValues()(nb - 1);
  rep.invertible = smin >= kSingularTol * std::max(smax, 1.0);
  rep.condition = smin > 0.0 ? smax / smin
                             : std::numeric_limits<double>::infinity();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd_b(sys.B);
  const double bmax = svd_b.singularValues()(0);
  for (int i = 0; i < svd_b.singularValues().size(); ++i) {
    if (svd_b.singularValues()(i) >= kSingularTol * std::max(bmax, 1.0)) {
      ++rep.rank_of_b;
    }
  }
  rep.prohibited_bc_detected = !rep.invertible && rep.rank_of_b == nb;
  return rep;
}

namespace {

// Arithmetic over numbers and named parameters: + - * / with unary minus
// and parentheses.  Used for matrix entries in system files.
class ExprParser {
 public:
  ExprParser(const std::string& text, const std::map<std::string, double>& params,
             const std::string& where)
      : s_(text), params_(params), where_(where) {}

  double parse() {
    const double v = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw PdeFormatError(where_ + ": bad expression '" + s_ + "': " + msg);
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(unsigned(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  double expr() {
    double v = term();
    for (;;) {
      if (eat('+')) {
        v += term();
      } else if (eat('-')) {
        v -= term();
      } else {
        return v;
      }
    }
  }
  double term() {
    double v = factor();
    for (;;) {
      if (eat('*')) {
        v *= factor();
      } else if (eat('/')) {
        const double d = factor();
        if (d == 0.0) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }
  double factor() {
    skip_ws();
    if (eat('-')) return -factor();
    if (eat('+')) return factor();
    if (eat('(')) {
      const double v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (pos_ >= s_.size()) fail("unexpected end");
    if (std::isdigit(unsigned(s_[pos_])) || s_[pos_] == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("malformed number");
      }
      pos_ += used;
      return v;
    }
    if (std::isalpha(unsigned(s_[pos_])) || s_[pos_] == '_') {
      std::size_t end = pos_;
      while (end < s_.size() &&
             (std::isalnum(unsigned(s_[end])) || s_[end] == '_')) {
        ++end;
      }
      const std::string name = s_.substr(pos_, end - pos_);
      pos_ = end;
      auto it = params_.find(name);
      if (it == params_.end()) fail("unknown parameter '" + name + "'");
      return it->second;
    }
    fail("unexpected character");
  }

  const std::string& s_;
  const std::map<std::string, double>& params_;
  const std::string where_;
  std::size_t pos_ = 0;
};

double entry_value(const json& j, const std::map<std::string, double>& params,
                   const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    return ExprParser(j.get_ref<const std::string&>(), params, where).parse();
  }
  throw PdeFormatError(where + ": expected number or expression string");
}

int require_int(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<int>() < 0) {
    throw PdeFormatError(std::string(key) + ": expected nonnegative integer");
  }
  return j[key].get<int>();
}

PolyMat parse_poly_matrix(const json& j, int rows, int cols,
                          const std::map<std::string, double>& params,
                          const std::string& key) {
  PolyMat m(rows, cols);
  if (!j.contains(key)) return m;
  const json& arr = j[key];
  if (!arr.is_array()) throw PdeFormatError(key + ": expected array of entries");
  std::vector<bool> seen(std::size_t(rows) * cols, false);
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string where = key + "[" + std::to_string(k) + "]";
    const json& e = arr[k];
    if (!e.is_object() || !e.contains("row") || !e.contains("col") ||
        !e.contains("coeffs")) {
      throw PdeFormatError(where + ": expected {row, col, coeffs}");
    }
    const int r = e["row"].get<int>();
    const int c = e["col"].get<int>();
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw PdeFormatError(where + ": index outside " + std::to_string(rows) +
                           "x" + std::to_string(cols));
    }
    if (!e["coeffs"].is_array() || e["coeffs"].empty()) {
      throw PdeFormatError(where + ".coeffs: expected nonempty array");
    }
    Poly p;
    for (std::size_t d = 0; d < e["coeffs"].size(); ++d) {
      const double v = entry_value(e["coeffs"][d], params,
                                   where + ".coeffs[" + std::to_string(d) + "]");
      p.add(Poly::monomial(mono(unsigned(d)), AffineCoeff(v)));
    }
    if (seen[std::size_t(r) * cols + c]) {
      throw PdeFormatError(where + ": duplicate entry (" + std::to_string(r) +
                           "," + std::to_string(c) + ")");
    }
    seen[std::size_t(r) * cols + c] = true;
    m.at(r, c) = p;
  }
  return m;
}

}  // namespace

PDEFile load_pde_text(const std::string& text,
                      const std::map<std::string, double>& overrides) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw PdeFormatError(std::string("json parse error: ") + e.what());
  }
  if (!j.is_object()) throw PdeFormatError("top level: expected object");

  PDEFile out;
  if (j.contains("description")) {
    if (!j["description"].is_string()) {
      throw PdeFormatError("description: expected string");
    }
    out.description = j["description"].get<std::string>();
  }

  if (j.contains("parameters")) {
    if (!j["parameters"].is_object()) {
      throw PdeFormatError("parameters: expected object of name -> default");
    }
    for (const auto& [name, val] : j["parameters"].items()) {
      if (!val.is_number()) {
        throw PdeFormatError("parameters." + name + ": expected number");
      }
      out.params[name] = val.get<double>();
    }
  }
  for (const auto& [name, val] : overrides) {
    auto it = out.params.find(name);
    if (it == out.params.end()) {
      throw PdeFormatError("override '" + name + "': not a declared parameter");
    }
    it->second = val;
  }

  PDESystem& sys = out.system;
  if (!j.contains("domain") || !j["domain"].is_array() ||
      j["domain"].size() != 2 || !j["domain"][0].is_number() ||
      !j["domain"][1].is_number()) {
    throw PdeFormatError("domain: expected [a, b]");
  }
  sys.a = j["domain"][0].get<double>();
  sys.b = j["domain"][1].get<double>();
  if (!(sys.a < sys.b)) throw PdeFormatError("domain: need a < b");

  sys.n0 = require_int(j, "n0");
  sys.n1 = require_int(j, "n1");
  sys.n2 = require_int(j, "n2");
  if (sys.n() < 1) throw PdeFormatError("state dimension n0+n1+n2 must be >= 1");

  sys.A0 = parse_poly_matrix(j, sys.n(), sys.n(), out.params, "A0");
  sys.A1 = parse_poly_matrix(j, sys.n(), sys.n1 + sys.n2, out.params, "A1");
  sys.A2 = parse_poly_matrix(j, sys.n(), sys.n2, out.params, "A2");

  sys.B = Eigen::MatrixXd::Zero(sys.bc_count(), sys.bv_count());
  if (sys.bc_count() > 0) {
    if (!j.contains("B") || !j["B"].is_array() ||
        int(j["B"].size()) != sys.bc_count()) {
      throw PdeFormatError("B: expected " + std::to_string(sys.bc_count()) +
                           " rows");
    }
    for (int r = 0; r < sys.bc_count(); ++r) {
      const json& row = j["B"][r];
      if (!row.is_array() || int(row.size()) != sys.bv_count()) {
        throw PdeFormatError("B[" + std::to_string(r) + "]: expected " +
                             std::to_string(sys.bv_count()) + " entries");
      }
      for (int c = 0; c < sys.bv_count(); ++c) {
        sys.B(r, c) = entry_value(row[c], out.params,
                                  "B[" + std::to_string(r) + "][" +
                                      std::to_string(c) + "]");
      }
    }
  } else if (j.contains("B") && !j["B"].empty()) {
    throw PdeFormatError("B: system with n1 = n2 = 0 takes no boundary rows");
  }
  return out;
}

PDEFile load_pde(const std::string& path,
                 const std::map<std::string, double>& overrides) {
  std::ifstream in(path);
  if (!in) throw PdeFormatError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return load_pde_text(buf.str(), overrides);
  } catch (PdeFormatError& e) {
    throw PdeFormatError(path + ": " + e.what());
  }
}

namespace {

json poly_matrix_to_json(const PolyMat& m) {
  json arr = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      const Poly& p = m.at(i, j);
      if (p.zero()) continue;
      if (!p.numeric() || p.degree(Var::Theta) > 0 || p.degree(Var::Nu) > 0) {
        throw PdeFormatError("serialize: coefficient depends on more than s");
      }
      std::vector<double> coeffs(std::size_t(p.degree(Var::S)) + 1, 0.0);
      for (const auto& [key, c] : p.coeffs()) {
        coeffs[mono_exp(key, Var::S)] = c.constant;
      }
      arr.push_back({{"row", i}, {"col", j}, {"coeffs", coeffs}});
    }
  }
  return arr;
}

}  // namespace

std::string serialize_pde(const PDESystem& sys) {
  json j;
  j["domain"] = {sys.a, sys.b};
  j["n0"] = sys.n0;
  j["n1"] = sys.n1;
  j["n2"] = sys.n2;
  if (!sys.A0.zero()) j["A0"] = poly_matrix_to_json(sys.A0);
  if (!sys.A1.zero()) j["A1"] = poly_matrix_to_json(sys.A1);
  if (!sys.A2.zero()) j["A2"] = poly_matrix_to_json(sys.A2);
  if (sys.bc_count() > 0) {
    json rows = json::array();
    for (int r = 0; r < sys.B.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < sys.B.cols(); ++c) row.push_back(sys.B(r, c));
      rows.push_back(row);
    }
    j["B"] = rows;
  }
  return j.dump(2) + "\n";
}

PDESystem make_diffusion_family(int channels) {
  PDESystem sys;
  sys.n2 = channels;
  sys.a = 0.0;
  sys.b = 1.0;
  sys.A0 = PolyMat::identity(channels);
  sys.A1 = PolyMat::zero(channels, channels);
  sys.A2 = PolyMat::identity(channels);
  sys.B = Eigen::MatrixXd::Zero(2 * channels, 4 * channels);
  sys.B.block(0, 0, channels, channels).setIdentity();
  sys.B.block(channels, channels, channels, channels).setIdentity();
  return sys;
}

bool pde_equal(const PDESystem& x, const PDESystem& y) {
  if (x.n0 != y.n0 || x.n1 != y.n1 || x.n2 != y.n2 || x.a != y.a || x.b != y.b) {
    return false;
  }
  if (x.B.rows() != y.B.rows() || x.B.cols() != y.B.cols() || x.B != y.B) {
    return false;
  }
  return max_coeff_diff(x.A0, y.A0) == 0.0 && max_coeff_diff(x.A1, y.A1) == 0.0 &&
         max_coeff_diff(x.A2, y.A2) == 0.0;
}

}  // namespace pielab
