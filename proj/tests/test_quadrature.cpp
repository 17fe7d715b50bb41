#include "pielab/quadrature.hpp"

#include <cmath>

#include "doctest.h"

using namespace pielab;

namespace {

double monomial_integral(int k, double a, double b) {
  return (std::pow(b, k + 1) - std::pow(a, k + 1)) / (k + 1);
}

}  // namespace

TEST_CASE("rule is exact for monomials up to degree 2*order-1") {
  for (int order : {4, 16, 64}) {
    QuadratureRule rule = gauss_legendre(order, -0.7, 1.3);
    for (int k = 0; k < 2 * order && k <= 40; ++k) {
      double acc = 0.0;
      for (int i = 0; i < rule.nodes.size(); ++i) {
        acc += rule.weights[i] * std::pow(rule.nodes[i], k);
      }
      const double exact = monomial_integral(k, -0.7, 1.3);
      CHECK(std::abs(acc - exact) < 1e-13 * (1.0 + std::abs(exact)));
    }
  }
}

TEST_CASE("weights are positive and sum to the interval length") {
  QuadratureRule rule = gauss_legendre(64, 2.0, 5.0);
  CHECK(rule.weights.minCoeff() > 0.0);
  CHECK(rule.weights.sum() == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(rule.nodes.minCoeff() > 2.0);
  CHECK(rule.nodes.maxCoeff() < 5.0);
}

TEST_CASE("l2_inner on known functions") {
  QuadratureRule rule = gauss_legendre(64, 0.0, 1.0);
  PolyMat one(1, 1), s(1, 1);
  one.at(0, 0) = Poly(1.0);
  s.at(0, 0) = Poly::monomial(mono(1), AffineCoeff(1.0));
  CHECK(l2_inner(sample_poly(one, rule), sample_poly(one, rule), rule) ==
        doctest::Approx(1.0).epsilon(1e-13));
  CHECK(l2_inner(sample_poly(s, rule), sample_poly(s, rule), rule) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-13));

  // degree-9 alternating-series approximant of sin against its exact
  // polynomial self-integral
  Poly sin9;
  double fact = 1.0;
  for (int k = 1; k <= 9; k += 2) {
    fact *= (k == 1) ? 1.0 : double(k) * (k - 1);
    const double c = ((k - 1) / 2 % 2 == 0 ? 1.0 : -1.0) / fact;
    sin9.add(Poly::monomial(mono(k), AffineCoeff(c)));
  }
  PolyMat f(1, 1);
  f.at(0, 0) = sin9;
  PolyMat sq = f.transpose() * f;
  PolyMat exact = poly_int(sq.rename(Var::S, Var::Nu), Var::Nu, Bound::at(0.0),
                           Bound::at(1.0));
  const double quad = l2_inner(sample_poly(f, rule), sample_poly(f, rule), rule);
  CHECK(std::abs(quad - exact.eval(0.0)(0, 0)) < 1e-10);
}

TEST_CASE("x_inner differentiates the partition") {
  QuadratureRule rule = gauss_legendre(64, 0.0, 2.0);
  PolyMat x(2, 1);
  x.at(0, 0) = Poly::monomial(mono(1), AffineCoeff(1.0));   // H1 state s
  x.at(1, 0) = Poly::monomial(mono(2), AffineCoeff(1.0));   // H2 state s^2
  // <x,x>_X = int_0^2 (d/ds s)^2 + (d2/ds2 s^2)^2 = 2 + 4*2 = 10
  CHECK(x_inner(x, x, 0, 1, 1, rule) == doctest::Approx(10.0).epsilon(1e-13));
}
