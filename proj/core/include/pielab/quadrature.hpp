#pragma once

#include <Eigen/Dense>

#include "pielab/poly.hpp"

namespace pielab {

// Gauss-Legendre rule on [a, b]; exact for polynomials of degree
// 2*order - 1 or less.
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  double a = 0.0;
  double b = 1.0;
};

inline constexpr int kDefaultQuadOrder = 64;

QuadratureRule gauss_legendre(int order, double a, double b);

// L2 inner product of two sampled vector functions, columns indexed by the
// rule's nodes.
double l2_inner(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                const QuadratureRule& rule);

// Samples a numeric polynomial column vector at the rule's nodes.
Eigen::MatrixXd sample_poly(const PolyMat& x, const QuadratureRule& rule);

// Inner product weighting the (n0, n1, n2) partition by (id, d/ds, d^2/ds^2):
// <x,y> = <x0,y0> + <x1',y1'> + <x2'',y2''>.  Inputs are numeric polynomial
// column vectors of height n0+n1+n2; derivatives are taken symbolically.
double x_inner(const PolyMat& x, const PolyMat& y, int n0, int n1, int n2,
               const QuadratureRule& rule);

}  // namespace pielab
