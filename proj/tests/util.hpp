#pragma once

#include <random>

#include "pielab/pi_operator.hpp"
#include "pielab/poly.hpp"

namespace pielab::testutil {

// Random numeric polynomial matrix over the requested variables with entries
// of per-variable degree <= deg and coefficients in [-2, 2].
inline PolyMat random_poly_mat(std::mt19937_64& rng, int rows, int cols,
                               int deg, bool use_theta) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> keep(0.0, 1.0);
  PolyMat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      Poly p;
      for (int a = 0; a <= deg; ++a) {
        for (int b = 0; b <= (use_theta ? deg : 0); ++b) {
          if (keep(rng) < 0.4) continue;
          p.add(Poly::monomial(mono(a, b), AffineCoeff(coef(rng))));
        }
      }
      m.at(i, j) = p;
    }
  }
  return m;
}

// Random numeric 3-PI operator with polynomial parameters of per-variable
// degree <= deg.
inline PIOperator random_pi(std::mt19937_64& rng, int rows, int cols, int deg,
                            double a, double b) {
  PIOperator p = pi_zero(rows, cols, a, b);
  p.mult = random_poly_mat(rng, rows, cols, deg, false);
  p.lower = random_poly_mat(rng, rows, cols, deg, true);
  p.upper = random_poly_mat(rng, rows, cols, deg, true);
  return p;
}

// Random numeric polynomial column vector in s.
inline PolyMat random_poly_vec(std::mt19937_64& rng, int rows, int deg) {
  return random_poly_mat(rng, rows, 1, deg, false);
}

}  // namespace pielab::testutil
