#include "pielab/pi_operator.hpp"

#include <cassert>
#include <stdexcept>

namespace pielab {

namespace {

void check_same_shape(const PIOperator& x, const PIOperator& y) {
  if (x.rows != y.rows || x.cols != y.cols || x.a != y.a || x.b != y.b) {
    throw std::invalid_argument("PI operators differ in shape or domain");
  }
}

}  // namespace

PIOperator pi_zero(int rows, int cols, double a, double b) {
  return {rows, cols, a, b, PolyMat(rows, cols), PolyMat(rows, cols),
          PolyMat(rows, cols)};
}

PIOperator pi_identity(int n, double a, double b) {
  PIOperator p = pi_zero(n, n, a, b);
  p.mult = PolyMat::identity(n);
  return p;
}

PIOperator pi_from_mult(const PolyMat& n0, double a, double b) {
  PIOperator p = pi_zero(n0.rows(), n0.cols(), a, b);
  p.mult = n0;
  return p;
}

PIOperator pi_parts(const PolyMat& n0, const PolyMat& n1, const PolyMat& n2,
                    double a, double b) {
  assert(n0.rows() == n1.rows() && n0.cols() == n1.cols());
  assert(n0.rows() == n2.rows() && n0.cols() == n2.cols());
  return {n0.rows(), n0.cols(), a, b, n0, n1, n2};
}

PIOperator pi_add(const PIOperator& x, const PIOperator& y) {
  check_same_shape(x, y);
  PIOperator r = x;
  r.mult = x.mult + y.mult;
  r.lower = x.lower + y.lower;
  r.upper = x.upper + y.upper;
  return r;
}

PIOperator pi_scale(const PIOperator& x, double k) {
  PIOperator r = x;
  r.mult = x.mult.scaled(k);
  r.lower = x.lower.scaled(k);
  r.upper = x.upper.scaled(k);
  return r;
}

PIOperator pi_compose(const PIOperator& o, const PIOperator& i) {
  if (o.cols != i.rows || o.a != i.a || o.b != i.b) {
    throw std::invalid_argument("pi_compose: operand shapes or domains differ");
  }
  if (!o.numeric() && !i.numeric()) {
    throw std::invalid_argument(
        "pi_compose: both operands carry decision variables");
  }
  const Bound lo_a = Bound::at(o.a), hi_b = Bound::at(o.b);
  const Bound at_s = Bound::s(), at_t = Bound::theta();

  // Kernels retargeted for the integration variable: outer kernels become
  // functions of (s, nu), inner kernels functions of (nu, theta).
  const PolyMat b1 = o.lower.rename(Var::Theta, Var::Nu);
  const PolyMat b2 = o.upper.rename(Var::Theta, Var::Nu);
  const PolyMat n1 = i.lower.rename(Var::S, Var::Nu);
  const PolyMat n2 = i.upper.rename(Var::S, Var::Nu);
  const PolyMat n0t = i.mult.rename(Var::S, Var::Theta);

  const PolyMat b1n1 = b1 * n1;
  const PolyMat b1n2 = b1 * n2;
  const PolyMat b2n1 = b2 * n1;
  const PolyMat b2n2 = b2 * n2;

  PIOperator r = pi_zero(o.rows, i.cols, o.a, o.b);
  r.mult = o.mult * i.mult;
  r.lower = o.mult * i.lower + o.lower * n0t +
            poly_int(b1n2, Var::Nu, lo_a, at_t) +
            poly_int(b1n1, Var::Nu, at_t, at_s) +
            poly_int(b2n1, Var::Nu, at_s, hi_b);
  r.upper = o.mult * i.upper + o.upper * n0t +
            poly_int(b1n2, Var::Nu, lo_a, at_s) +
            poly_int(b2n2, Var::Nu, at_s, at_t) +
            poly_int(b2n1, Var::Nu, at_t, hi_b);
  return r;
}

PIOperator pi_adjoint(const PIOperator& p) {
  PIOperator r = pi_zero(p.cols, p.rows, p.a, p.b);
  r.mult = p.mult.transpose();
  r.lower = p.upper.swap_st().transpose();
  r.upper = p.lower.swap_st().transpose();
  return r;
}

PIOperator pi_concat(const PIOperator& x, const PIOperator& y) {
  if (x.a != y.a || x.b != y.b) {
    throw std::invalid_argument("pi_concat: domains differ");
  }
  PIOperator r = pi_zero(x.rows + y.rows, x.cols + y.cols, x.a, x.b);
  for (auto field : {&PIOperator::mult, &PIOperator::lower, &PIOperator::upper}) {
    (r.*field).set_block(0, 0, x.*field);
    (r.*field).set_block(x.rows, x.cols, y.*field);
  }
  return r;
}

Eigen::VectorXd pi_apply_at(const PIOperator& p, const VectorFn& x, double s0,
                            int order) {
  Eigen::VectorXd acc = p.mult.eval(s0) * x(s0);
  if (!p.lower.zero() && s0 > p.a) {
    QuadratureRule sub = gauss_legendre(order, p.a, s0);
    for (int j = 0; j < sub.nodes.size(); ++j) {
      acc += sub.weights[j] * (p.lower.eval(s0, sub.nodes[j]) * x(sub.nodes[j]));
    }
  }
  if (!p.upper.zero() && s0 < p.b) {
    QuadratureRule sub = gauss_legendre(order, s0, p.b);
    for (int j = 0; j < sub.nodes.size(); ++j) {
      acc += sub.weights[j] * (p.upper.eval(s0, sub.nodes[j]) * x(sub.nodes[j]));
    }
  }
  return acc;
}

Eigen::MatrixXd pi_apply_numeric(const PIOperator& p, const VectorFn& x,
                                 const QuadratureRule& rule) {
  Eigen::MatrixXd out(p.rows, rule.nodes.size());
  const int order = int(rule.nodes.size());
  for (int i = 0; i < rule.nodes.size(); ++i) {
    out.col(i) = pi_apply_at(p, x, rule.nodes[i], order);
  }
  return out;
}

PolyMat pi_apply_poly(const PIOperator& p, const PolyMat& x) {
  if (x.cols() != 1 || x.rows() != p.cols) {
    throw std::invalid_argument("pi_apply_poly: input must be a cols-vector");
  }
  if (x.degree(Var::Theta) != 0 || x.degree(Var::Nu) != 0) {
    throw std::invalid_argument("pi_apply_poly: input must depend on s only");
  }
  const PolyMat xt = x.rename(Var::S, Var::Theta);
  PolyMat r = p.mult * x;
  r = r + poly_int(p.lower * xt, Var::Theta, Bound::at(p.a), Bound::s());
  r = r + poly_int(p.upper * xt, Var::Theta, Bound::s(), Bound::at(p.b));
  return r;
}

VectorFn poly_fn(const PolyMat& x) {
  return [x](double s) -> Eigen::VectorXd { return x.eval(s); };
}

double pi_max_coeff_diff(const PIOperator& x, const PIOperator& y) {
  check_same_shape(x, y);
  return std::max({max_coeff_diff(x.mult, y.mult),
                   max_coeff_diff(x.lower, y.lower),
                   max_coeff_diff(x.upper, y.upper)});
}

PIOperator pi_substitute(const PIOperator& p, const std::map<int, double>& vals) {
  PIOperator r = p;
  r.mult = substitute_vars(p.mult, vals);
  r.lower = substitute_vars(p.lower, vals);
  r.upper = substitute_vars(p.upper, vals);
  return r;
}

}  // namespace pielab
