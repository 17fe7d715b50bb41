#include "pielab/quadrature.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pielab {

QuadratureRule gauss_legendre(int order, double a, double b) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order < 1");
  QuadratureRule rule;
  rule.a = a;
  rule.b = b;
  rule.nodes.resize(order);
  rule.weights.resize(order);

  // Roots of P_n on [-1, 1] by Newton iteration from the Chebyshev guess.
  for (int i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = 0.5 * (b - a) * x + 0.5 * (a + b);
    rule.weights[i] = 0.5 * (b - a) * w;
  }
  return rule;
}

double l2_inner(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                const QuadratureRule& rule) {
  assert(x.cols() == rule.nodes.size() && y.cols() == rule.nodes.size());
  assert(x.rows() == y.rows());
  double acc = 0.0;
  for (int j = 0; j < x.cols(); ++j) {
    acc += rule.weights[j] * x.col(j).dot(y.col(j));
  }
  return acc;
}

Eigen::MatrixXd sample_poly(const PolyMat& x, const QuadratureRule& rule) {
  assert(x.cols() == 1);
  Eigen::MatrixXd out(x.rows(), rule.nodes.size());
  for (int j = 0; j < rule.nodes.size(); ++j) {
    out.col(j) = x.eval(rule.nodes[j]);
  }
  return out;
}

double x_inner(const PolyMat& x, const PolyMat& y, int n0, int n1, int n2,
               const QuadratureRule& rule) {
  assert(x.rows() == n0 + n1 + n2 && x.cols() == 1);
  assert(y.rows() == n0 + n1 + n2 && y.cols() == 1);
  PolyMat dx(x.rows(), 1), dy(y.rows(), 1);
  dx.set_block(0, 0, x.block(0, 0, n0, 1));
  dy.set_block(0, 0, y.block(0, 0, n0, 1));
  dx.set_block(n0, 0, x.block(n0, 0, n1, 1).diff(Var::S));
  dy.set_block(n0, 0, y.block(n0, 0, n1, 1).diff(Var::S));
  dx.set_block(n0 + n1, 0, x.block(n0 + n1, 0, n2, 1).diff(Var::S).diff(Var::S));
  dy.set_block(n0 + n1, 0, y.block(n0 + n1, 0, n2, 1).diff(Var::S).diff(Var::S));
  return l2_inner(sample_poly(dx, rule), sample_poly(dy, rule), rule);
}

}  // namespace pielab
