#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace pielab {

// Coefficients with magnitude below this are dropped when a polynomial is
// brought to canonical form.
inline constexpr double kCoeffDropTol = 1e-14;

// Kernel variables.  S is the outer variable, Theta the inner one, Nu a
// transient integration variable that never survives a public operation.
enum class Var : int { S = 0, Theta = 1, Nu = 2 };

// Monomial s^i theta^j nu^k packed as i | j<<8 | k<<16.  Exponents stay far
// below 256 for every construction in this library; ops assert on overflow.
using Mono = std::uint32_t;

constexpr Mono mono(unsigned i, unsigned j = 0, unsigned k = 0) {
  return i | (j << 8) | (k << 16);
}
constexpr unsigned mono_exp(Mono m, Var v) {
  return (m >> (8 * static_cast<int>(v))) & 0xffu;
}
constexpr unsigned mono_total_deg(Mono m) {
  return mono_exp(m, Var::S) + mono_exp(m, Var::Theta) + mono_exp(m, Var::Nu);
}

// Graded lexicographic order: lower total degree first; within a grade the
// monomial with the higher s exponent (then theta, then nu) comes first.
// Gives every polynomial a deterministic coefficient ordering.
struct GradedLex {
  bool operator()(Mono x, Mono y) const {
    const unsigned dx = mono_total_deg(x), dy = mono_total_deg(y);
    if (dx != dy) return dx < dy;
    for (Var v : {Var::S, Var::Theta, Var::Nu}) {
      const unsigned ex = mono_exp(x, v), ey = mono_exp(y, v);
      if (ex != ey) return ex > ey;
    }
    return false;
  }
};

// Scalar coefficient, affine in decision variables:
//   value = constant + sum_k weight_k * var_k.
// Terms are kept sorted by variable id with no duplicates and no weights
// below kCoeffDropTol.
struct AffineCoeff {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;

  AffineCoeff() = default;
  explicit AffineCoeff(double c) : constant(c) {}
  static AffineCoeff variable(int id, double weight = 1.0);

  bool numeric() const { return terms.empty(); }
  bool negligible() const;
  void accumulate(const AffineCoeff& o, double scale = 1.0);
  void rescale(double k);
  double max_abs() const;
};

// Product of two coefficients.  At most one side may carry decision
// variables; a bilinear product throws std::invalid_argument.
AffineCoeff coeff_mul(const AffineCoeff& x, const AffineCoeff& y);

// Scalar polynomial over (s, theta, nu) in canonical form: monomials with
// every coefficient magnitude below kCoeffDropTol are absent.
class Poly {
 public:
  using Map = std::map<Mono, AffineCoeff, GradedLex>;

  Poly() = default;
  explicit Poly(double c);
  static Poly monomial(Mono m, AffineCoeff c);
  static Poly variable_coeff(int var_id, double weight = 1.0);

  bool zero() const { return c_.empty(); }
  bool numeric() const;
  const Map& coeffs() const { return c_; }
  void set_coeff(Mono m, AffineCoeff c);
  const AffineCoeff* find(Mono m) const;

  void add(const Poly& o, double scale = 1.0);
  void rescale(double k);
  int degree(Var v) const;

  friend Poly poly_mul(const Poly& x, const Poly& y);

 private:
  void trim();
  Map c_;
};

// Integration bound: a domain constant or one of the surviving variables.
struct Bound {
  enum Kind { kConst, kS, kTheta } kind = kConst;
  double value = 0.0;

  static Bound at(double c) { return {kConst, c}; }
  static Bound s() { return {kS, 0.0}; }
  static Bound theta() { return {kTheta, 0.0}; }
};

// Matrix-valued polynomial.  Entries are stored densely row-major; an entry
// with an empty coefficient map is an exact zero, so the storage is sparse
// in effect.  All entries of one matrix share the same variables and domain
// conventions; the matrix itself carries no domain.
class PolyMat {
 public:
  PolyMat() = default;
  PolyMat(int rows, int cols);
  static PolyMat constant(const Eigen::MatrixXd& m);
  static PolyMat identity(int n);
  static PolyMat zero(int rows, int cols) { return PolyMat(rows, cols); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Poly& at(int i, int j);
  const Poly& at(int i, int j) const;

  bool numeric() const;
  bool zero() const;
  int degree(Var v) const;

  PolyMat transpose() const;
  PolyMat block(int i0, int j0, int r, int c) const;
  void set_block(int i0, int j0, const PolyMat& m);

  // Moves every exponent of `from` onto `to`.  Used to retarget kernels
  // before composition, e.g. N1(s,theta) -> N1(nu,theta).
  PolyMat rename(Var from, Var to) const;
  // Exchanges the exponents of s and theta.
  PolyMat swap_st() const;

  PolyMat diff(Var v) const;
  PolyMat eval_var(Var v, double value) const;

  // Numeric evaluation; requires numeric coefficients and no nu exponents.
  Eigen::MatrixXd eval(double s, double theta = 0.0) const;

  friend PolyMat operator+(const PolyMat& x, const PolyMat& y);
  friend PolyMat operator-(const PolyMat& x, const PolyMat& y);
  friend PolyMat operator*(const PolyMat& x, const PolyMat& y);
  PolyMat scaled(double k) const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Poly> e_;
};

PolyMat poly_add(const PolyMat& x, const PolyMat& y, double scale_y = 1.0);
PolyMat poly_mul(const PolyMat& x, const PolyMat& y);

// Definite integral over v between lo and hi.  The antiderivative is exact;
// bounds substitute a constant or transfer the exponent onto s or theta.
PolyMat poly_int(const PolyMat& p, Var v, Bound lo, Bound hi);

// One scalar equation sum_k weight_k * var_k = rhs.
struct LinearEq {
  std::vector<std::pair<int, double>> terms;
  double rhs = 0.0;
};

// Equations forcing lhs == rhs coefficient-wise, one per (entry, monomial)
// with any nonzero presence on either side, in deterministic order.
std::vector<LinearEq> coeff_match(const PolyMat& lhs, const PolyMat& rhs);

// Largest absolute difference over all (entry, monomial) coefficients,
// comparing constants and decision-variable weights alike.
double max_coeff_diff(const PolyMat& x, const PolyMat& y);

// Substitutes numeric values for decision variables; ids absent from the
// map keep weight zero.
PolyMat substitute_vars(const PolyMat& p, const std::map<int, double>& vals);

std::string to_string(const PolyMat& p);

}  // namespace pielab
