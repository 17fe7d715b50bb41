#include "pielab/poly.hpp"

#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pielab {

namespace {

Mono mono_mul(Mono x, Mono y) {
  assert(mono_exp(x, Var::S) + mono_exp(y, Var::S) < 256u);
  assert(mono_exp(x, Var::Theta) + mono_exp(y, Var::Theta) < 256u);
  assert(mono_exp(x, Var::Nu) + mono_exp(y, Var::Nu) < 256u);
  return x + y;
}

Mono mono_with_exp(Mono m, Var v, unsigned e) {
  const int sh = 8 * static_cast<int>(v);
  return (m & ~(0xffu << sh)) | (e << sh);
}

}  // namespace

AffineCoeff AffineCoeff::variable(int id, double weight) {
  AffineCoeff c;
  if (std::abs(weight) >= kCoeffDropTol) c.terms.emplace_back(id, weight);
  return c;
}

bool AffineCoeff::negligible() const {
  return std::abs(constant) < kCoeffDropTol && terms.empty();
}

double AffineCoeff::max_abs() const {
  double m = std::abs(constant);
  for (const auto& [id, w] : terms) m = std::max(m, std::abs(w));
  return m;
}

void AffineCoeff::accumulate(const AffineCoeff& o, double scale) {
  constant += scale * o.constant;
  if (o.terms.empty()) return;
  std::vector<std::pair<int, double>> merged;
  merged.reserve(terms.size() + o.terms.size());
  std::size_t i = 0, j = 0;
  while (i < terms.size() || j < o.terms.size()) {
    if (j == o.terms.size() ||
        (i < terms.size() && terms[i].first < o.terms[j].first)) {
      merged.push_back(terms[i++]);
    } else if (i == terms.size() || terms[i].first > o.terms[j].first) {
      merged.emplace_back(o.terms[j].first, scale * o.terms[j].second);
      ++j;
    } else {
      const double w = terms[i].second + scale * o.terms[j].second;
      if (std::abs(w) >= kCoeffDropTol) merged.emplace_back(terms[i].first, w);
      ++i;
      ++j;
    }
  }
  terms = std::move(merged);
}

void AffineCoeff::rescale(double k) {
  constant *= k;
  for (auto& [id, w] : terms) w *= k;
  std::erase_if(terms,
                [](const auto& t) { return std::abs(t.second) < kCoeffDropTol; });
}

AffineCoeff coeff_mul(const AffineCoeff& x, const AffineCoeff& y) {
  if (!x.numeric() && !y.numeric()) {
    throw std::invalid_argument(
        "coeff_mul: product of two decision-variable coefficients");
  }
  const AffineCoeff& affine = x.numeric() ? y : x;
  const double k = x.numeric() ? x.constant : y.constant;
  AffineCoeff r = affine;
  r.rescale(k);
  return r;
}

Poly::Poly(double c) {
  if (std::abs(c) >= kCoeffDropTol) c_.emplace(mono(0), AffineCoeff(c));
}

Poly Poly::monomial(Mono m, AffineCoeff c) {
  Poly p;
  if (!c.negligible()) p.c_.emplace(m, std::move(c));
  return p;
}

Poly Poly::variable_coeff(int var_id, double weight) {
  return monomial(mono(0), AffineCoeff::variable(var_id, weight));
}

bool Poly::numeric() const {
  for (const auto& [m, c] : c_) {
    if (!c.numeric()) return false;
  }
  return true;
}

void Poly::set_coeff(Mono m, AffineCoeff c) {
  if (c.negligible()) {
    c_.erase(m);
  } else {
    c_[m] = std::move(c);
  }
}

const AffineCoeff* Poly::find(Mono m) const {
  auto it = c_.find(m);
  return it == c_.end() ? nullptr : &it->second;
}

void Poly::add(const Poly& o, double scale) {
  for (const auto& [m, c] : o.c_) {
    auto [it, fresh] = c_.try_emplace(m);
    it->second.accumulate(c, scale);
  }
  trim();
}

void Poly::rescale(double k) {
  for (auto& [m, c] : c_) c.rescale(k);
  trim();
}

int Poly::degree(Var v) const {
  int d = 0;
  for (const auto& [m, c] : c_) d = std::max(d, int(mono_exp(m, v)));
  return d;
}

void Poly::trim() {
  for (auto it = c_.begin(); it != c_.end();) {
    it = it->second.negligible() ? c_.erase(it) : std::next(it);
  }
}

Poly poly_mul(const Poly& x, const Poly& y) {
  Poly r;
  for (const auto& [mx, cx] : x.c_) {
    for (const auto& [my, cy] : y.c_) {
      auto [it, fresh] = r.c_.try_emplace(mono_mul(mx, my));
      it->second.accumulate(coeff_mul(cx, cy));
    }
  }
  r.trim();
  return r;
}

PolyMat::PolyMat(int rows, int cols) : rows_(rows), cols_(cols) {
  assert(rows >= 0 && cols >= 0);
  e_.resize(std::size_t(rows) * cols);
}

PolyMat PolyMat::constant(const Eigen::MatrixXd& m) {
  PolyMat p(int(m.rows()), int(m.cols()));
  for (int i = 0; i < p.rows_; ++i) {
    for (int j = 0; j < p.cols_; ++j) {
      p.at(i, j) = Poly(m(i, j));
    }
  }
  return p;
}

PolyMat PolyMat::identity(int n) {
  return constant(Eigen::MatrixXd::Identity(n, n));
}

Poly& PolyMat::at(int i, int j) {
  assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
  return e_[std::size_t(i) * cols_ + j];
}

const Poly& PolyMat::at(int i, int j) const {
  assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
  return e_[std::size_t(i) * cols_ + j];
}

bool PolyMat::numeric() const {
  for (const Poly& p : e_) {
    if (!p.numeric()) return false;
  }
  return true;
}

bool PolyMat::zero() const {
  for (const Poly& p : e_) {
    if (!p.zero()) return false;
  }
  return true;
}

int PolyMat::degree(Var v) const {
  int d = 0;
  for (const Poly& p : e_) d = std::max(d, p.degree(v));
  return d;
}

PolyMat PolyMat::transpose() const {
  PolyMat r(cols_, rows_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      r.at(j, i) = at(i, j);
    }
  }
  return r;
}

PolyMat PolyMat::block(int i0, int j0, int r, int c) const {
  assert(i0 + r <= rows_ && j0 + c <= cols_);
  PolyMat out(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) {
      out.at(i, j) = at(i0 + i, j0 + j);
    }
  }
  return out;
}

void PolyMat::set_block(int i0, int j0, const PolyMat& m) {
  assert(i0 + m.rows_ <= rows_ && j0 + m.cols_ <= cols_);
  for (int i = 0; i < m.rows_; ++i) {
    for (int j = 0; j < m.cols_; ++j) {
      at(i0 + i, j0 + j) = m.at(i, j);
    }
  }
}

namespace {

Poly map_monomials(const Poly& p, const auto& fn) {
  Poly r;
  for (const auto& [m, c] : p.coeffs()) {
    auto [m2, scale] = fn(m);
    if (std::abs(scale) < kCoeffDropTol) continue;
    AffineCoeff c2 = c;
    c2.rescale(scale);
    auto* existing = r.find(m2);
    if (existing) {
      AffineCoeff merged = *existing;
      merged.accumulate(c2);
      r.set_coeff(m2, merged);
    } else {
      r.set_coeff(m2, c2);
    }
  }
  return r;
}

PolyMat entrywise(const PolyMat& p, const auto& fn) {
  PolyMat r(p.rows(), p.cols());
  for (int i = 0; i < p.rows(); ++i) {
    for (int j = 0; j < p.cols(); ++j) {
      r.at(i, j) = fn(p.at(i, j));
    }
  }
  return r;
}

}  // namespace

PolyMat PolyMat::rename(Var from, Var to) const {
  assert(from != to);
  return entrywise(*this, [&](const Poly& p) {
    return map_monomials(p, [&](Mono m) {
      const unsigned e = mono_exp(m, from);
      Mono m2 = mono_with_exp(m, from, 0);
      const unsigned e2 = mono_exp(m2, to) + e;
      assert(e2 < 256u);
      return std::pair{mono_with_exp(m2, to, e2), 1.0};
    });
  });
}

PolyMat PolyMat::swap_st() const {
  return entrywise(*this, [&](const Poly& p) {
    return map_monomials(p, [&](Mono m) {
      Mono m2 = mono(mono_exp(m, Var::Theta), mono_exp(m, Var::S),
                     mono_exp(m, Var::Nu));
      return std::pair{m2, 1.0};
    });
  });
}

PolyMat PolyMat::diff(Var v) const {
  return entrywise(*this, [&](const Poly& p) {
    return map_monomials(p, [&](Mono m) {
      const unsigned e = mono_exp(m, v);
      if (e == 0) return std::pair{m, 0.0};
      return std::pair{mono_with_exp(m, v, e - 1), double(e)};
    });
  });
}

PolyMat PolyMat::eval_var(Var v, double value) const {
  return entrywise(*this, [&](const Poly& p) {
    return map_monomials(p, [&](Mono m) {
      const unsigned e = mono_exp(m, v);
      return std::pair{mono_with_exp(m, v, 0), std::pow(value, double(e))};
    });
  });
}

Eigen::MatrixXd PolyMat::eval(double s, double theta) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) {
      double acc = 0.0;
      for (const auto& [m, c] : at(i, j).coeffs()) {
        if (!c.numeric()) {
          throw std::invalid_argument("PolyMat::eval: decision variables present");
        }
        assert(mono_exp(m, Var::Nu) == 0);
        acc += c.constant * std::pow(s, double(mono_exp(m, Var::S))) *
               std::pow(theta, double(mono_exp(m, Var::Theta)));
      }
      out(i, j) = acc;
    }
  }
  return out;
}

PolyMat operator+(const PolyMat& x, const PolyMat& y) { return poly_add(x, y); }

PolyMat operator-(const PolyMat& x, const PolyMat& y) {
  return poly_add(x, y, -1.0);
}

PolyMat operator*(const PolyMat& x, const PolyMat& y) { return poly_mul(x, y); }

PolyMat PolyMat::scaled(double k) const {
  PolyMat r = *this;
  for (Poly& p : r.e_) p.rescale(k);
  return r;
}

PolyMat poly_add(const PolyMat& x, const PolyMat& y, double scale_y) {
  assert(x.rows() == y.rows() && x.cols() == y.cols());
  PolyMat r = x;
  for (int i = 0; i < r.rows(); ++i) {
    for (int j = 0; j < r.cols(); ++j) {
      r.at(i, j).add(y.at(i, j), scale_y);
    }
  }
  return r;
}

PolyMat poly_mul(const PolyMat& x, const PolyMat& y) {
  assert(x.cols() == y.rows());
  PolyMat r(x.rows(), y.cols());
  for (int i = 0; i < x.rows(); ++i) {
    for (int k = 0; k < x.cols(); ++k) {
      const Poly& xik = x.at(i, k);
      if (xik.zero()) continue;
      for (int j = 0; j < y.cols(); ++j) {
        const Poly& ykj = y.at(k, j);
        if (ykj.zero()) continue;
        r.at(i, j).add(poly_mul(xik, ykj));
      }
    }
  }
  return r;
}

namespace {

// Substitutes a bound for variable v: constants scale the coefficient,
// variable bounds transfer the exponent.
PolyMat subst_bound(const PolyMat& p, Var v, Bound bnd) {
  switch (bnd.kind) {
    case Bound::kConst:
      return p.eval_var(v, bnd.value);
    case Bound::kS:
      return p.rename(v, Var::S);
    case Bound::kTheta:
      return p.rename(v, Var::Theta);
  }
  return p;
}

}  // namespace

PolyMat poly_int(const PolyMat& p, Var v, Bound lo, Bound hi) {
  PolyMat anti = entrywise(p, [&](const Poly& q) {
    return map_monomials(q, [&](Mono m) {
      const unsigned e = mono_exp(m, v);
      assert(e + 1 < 256u);
      return std::pair{mono_with_exp(m, v, e + 1), 1.0 / double(e + 1)};
    });
  });
  return subst_bound(anti, v, hi) - subst_bound(anti, v, lo);
}

std::vector<LinearEq> coeff_match(const PolyMat& lhs, const PolyMat& rhs) {
  assert(lhs.rows() == rhs.rows() && lhs.cols() == rhs.cols());
  PolyMat d = lhs - rhs;
  std::vector<LinearEq> eqs;
  for (int i = 0; i < d.rows(); ++i) {
    for (int j = 0; j < d.cols(); ++j) {
      for (const auto& [m, c] : d.at(i, j).coeffs()) {
        LinearEq eq;
        eq.terms = c.terms;
        eq.rhs = -c.constant;
        eqs.push_back(std::move(eq));
      }
    }
  }
  return eqs;
}

double max_coeff_diff(const PolyMat& x, const PolyMat& y) {
  assert(x.rows() == y.rows() && x.cols() == y.cols());
  PolyMat d = x - y;
  double m = 0.0;
  for (int i = 0; i < d.rows(); ++i) {
    for (int j = 0; j < d.cols(); ++j) {
      for (const auto& [mono_key, c] : d.at(i, j).coeffs()) {
        m = std::max(m, c.max_abs());
      }
    }
  }
  return m;
}

PolyMat substitute_vars(const PolyMat& p, const std::map<int, double>& vals) {
  return entrywise(p, [&](const Poly& q) {
    Poly r;
    for (const auto& [m, c] : q.coeffs()) {
      AffineCoeff folded(c.constant);
      for (const auto& [id, w] : c.terms) {
        auto it = vals.find(id);
        folded.constant += w * (it == vals.end() ? 0.0 : it->second);
      }
      if (!folded.negligible()) r.set_coeff(m, folded);
    }
    return r;
  });
}

std::string to_string(const PolyMat& p) {
  std::ostringstream os;
  const char* names[3] = {"s", "t", "v"};
  for (int i = 0; i < p.rows(); ++i) {
    for (int j = 0; j < p.cols(); ++j) {
      if (p.at(i, j).zero()) continue;
      os << "(" << i << "," << j << "):";
      for (const auto& [m, c] : p.at(i, j).coeffs()) {
        os << " ";
        if (!c.numeric()) os << "[affine]";
        os << c.constant;
        for (Var v : {Var::S, Var::Theta, Var::Nu}) {
          const unsigned e = mono_exp(m, v);
          if (e > 0) os << "*" << names[static_cast<int>(v)] << "^" << e;
        }
      }
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace pielab
