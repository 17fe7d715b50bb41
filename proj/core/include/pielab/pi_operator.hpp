#pragma once

#include <Eigen/Dense>
#include <functional>

#include "pielab/poly.hpp"
#include "pielab/quadrature.hpp"

namespace pielab {

// 3-PI operator on L2(a,b)^cols -> L2(a,b)^rows:
//   (P x)(s) = mult(s) x(s) + int_a^s lower(s,t) x(t) dt
//                          + int_s^b upper(s,t) x(t) dt.
// All three parameter matrices are rows x cols polynomial matrices; mult
// depends on s only, the kernels on (s, theta).
struct PIOperator {
  int rows = 0;
  int cols = 0;
  double a = 0.0;
  double b = 1.0;
  PolyMat mult;
  PolyMat lower;
  PolyMat upper;

  bool numeric() const {
    return mult.numeric() && lower.numeric() && upper.numeric();
  }
};

PIOperator pi_zero(int rows, int cols, double a, double b);
PIOperator pi_identity(int n, double a, double b);
PIOperator pi_from_mult(const PolyMat& n0, double a, double b);
PIOperator pi_parts(const PolyMat& n0, const PolyMat& n1, const PolyMat& n2,
                    double a, double b);

PIOperator pi_add(const PIOperator& x, const PIOperator& y);
PIOperator pi_scale(const PIOperator& x, double k);

// Composition outer.inner via the closed-form kernel identities.  At most
// one operand may carry decision variables.
PIOperator pi_compose(const PIOperator& outer, const PIOperator& inner);

// L2 adjoint: transposes the multiplier in place and the kernels across the
// diagonal s = theta.
PIOperator pi_adjoint(const PIOperator& p);

// Block-diagonal concatenation diag(x, y).
PIOperator pi_concat(const PIOperator& x, const PIOperator& y);

using VectorFn = std::function<Eigen::VectorXd(double)>;

// (P x)(s0) for numeric P; kernel integrals use Gauss-Legendre rules of
// `order` nodes on each side of the seam at s0.
Eigen::VectorXd pi_apply_at(const PIOperator& p, const VectorFn& x, double s0,
                            int order = kDefaultQuadOrder);

// Samples (P x) at the rule's nodes; the rule must cover [a, b].
Eigen::MatrixXd pi_apply_numeric(const PIOperator& p, const VectorFn& x,
                                 const QuadratureRule& rule);

// Exact application to a polynomial column vector in s.
PolyMat pi_apply_poly(const PIOperator& p, const PolyMat& x);

// Callable view of a numeric polynomial column vector.
VectorFn poly_fn(const PolyMat& x);

// Largest coefficient difference across the three parameter matrices.
double pi_max_coeff_diff(const PIOperator& x, const PIOperator& y);

// Substitutes decision-variable values in all three parameters.
PIOperator pi_substitute(const PIOperator& p, const std::map<int, double>& vals);

}  // namespace pielab
