#include "pielab/pie_convert.hpp"

#include <random>
#include <stdexcept>

#include "pielab/quadrature.hpp"

namespace pielab {

namespace {

// c0 + c1 * v
Poly affine(Var v, double c0, double c1) {
  Poly p(c0);
  unsigned i = v == Var::S ? 1 : 0;
  unsigned j = v == Var::Theta ? 1 : 0;
  p.add(Poly::monomial(mono(i, j, v == Var::Nu ? 1 : 0), AffineCoeff(c1)));
  return p;
}

void set_diag(PolyMat& m, int r0, int c0, int count, const Poly& p) {
  for (int i = 0; i < count; ++i) m.at(r0 + i, c0 + i) = p;
}

struct Blocks {
  // Row offsets of the boundary-value vector (x1(a); x1(b); x2(a); x2(b);
  // dx2(a); dx2(b)) and column offsets of the core traces (x1(a); x2(a);
  // dx2(a)).
  int n0, n1, n2, n, bc, bv;
  double a, b;

  explicit Blocks(const PDESystem& sys)
      : n0(sys.n0), n1(sys.n1), n2(sys.n2), n(sys.n()), bc(sys.bc_count()),
        bv(sys.bv_count()), a(sys.a), b(sys.b) {}

  // State contribution of the core traces: rows (n0; n1; n2), columns the
  // core traces.
  PolyMat trace_gain() const {
    PolyMat k(n, bc);
    set_diag(k, n0, 0, n1, Poly(1.0));
    set_diag(k, n0 + n1, n1, n2, Poly(1.0));
    set_diag(k, n0 + n1, n1 + n2, n2, affine(Var::S, -a, 1.0));
    return k;
  }

  // Fundamental-state contribution of the right-end boundary values.
  PolyMat boundary_kernel() const {
    PolyMat q(bv, n);
    set_diag(q, n1, n0, n1, Poly(1.0));
    set_diag(q, 2 * n1 + n2, n0 + n1, n2, affine(Var::Theta, b, -1.0));
    set_diag(q, 2 * n1 + 3 * n2, n0 + n1, n2, Poly(1.0));
    return q;
  }

  // Unconstrained reconstruction kernel (integration from the left end).
  PolyMat free_state_kernel() const {
    PolyMat l(n, n);
    set_diag(l, n0, n0, n1, Poly(1.0));
    Poly s_minus_theta = affine(Var::S, 0.0, 1.0);
    s_minus_theta.add(affine(Var::Theta, 0.0, -1.0));
    set_diag(l, n0 + n1, n0 + n1, n2, s_minus_theta);
    return l;
  }

  PolyMat state_mult() const {
    PolyMat g(n, n);
    set_diag(g, 0, 0, n0, Poly(1.0));
    return g;
  }

  // Slope counterparts: rows (dx1; dx2).
  PolyMat slope_trace_gain() const {
    PolyMat v(n1 + n2, bc);
    set_diag(v, n1, n1 + n2, n2, Poly(1.0));
    return v;
  }
  PolyMat free_slope_kernel() const {
    PolyMat l(n1 + n2, n);
    set_diag(l, n1, n0 + n1, n2, Poly(1.0));
    return l;
  }
  PolyMat slope_mult() const {
    PolyMat g(n1 + n2, n);
    set_diag(g, 0, n0, n1, Poly(1.0));
    return g;
  }
};

// -(BT)^-1 B applied to the boundary kernel; solves the boundary rows for the
// core traces.
PolyMat core_trace_solution(const PDESystem& sys, const Blocks& bl) {
  WellPosednessReport rep = check_wellposed(sys);
  if (!rep.invertible) {
    throw std::invalid_argument(
        "pie conversion requires an invertible boundary trace map");
  }
  Eigen::MatrixXd m = bl.bc > 0
                          ? Eigen::MatrixXd(-rep.bt.inverse() * sys.B)
                          : Eigen::MatrixXd::Zero(0, bl.bv);
  return PolyMat::constant(m) * bl.boundary_kernel();
}

PolyMat a2_mult(const PDESystem& sys) {
  PolyMat m(sys.n(), sys.n());
  m.set_block(0, sys.n0 + sys.n1, sys.A2);
  return m;
}

}  // namespace

PIOperator build_state_map(const PDESystem& sys) {
  Blocks bl(sys);
  PolyMat constrained = bl.trace_gain() * core_trace_solution(sys, bl);
  return pi_parts(bl.state_mult(), bl.free_state_kernel() + constrained,
                  constrained, sys.a, sys.b);
}

PIOperator build_slope_map(const PDESystem& sys) {
  Blocks bl(sys);
  PolyMat constrained = bl.slope_trace_gain() * core_trace_solution(sys, bl);
  return pi_parts(bl.slope_mult(), bl.free_slope_kernel() + constrained,
                  constrained, sys.a, sys.b);
}

PIERealization build_pie(const PDESystem& sys) {
  PIERealization pie;
  pie.state_map = build_state_map(sys);
  pie.slope_map = build_slope_map(sys);
  pie.generator = pi_parts(
      sys.A0 * pie.state_map.mult + sys.A1 * pie.slope_map.mult + a2_mult(sys),
      sys.A0 * pie.state_map.lower + sys.A1 * pie.slope_map.lower,
      sys.A0 * pie.state_map.upper + sys.A1 * pie.slope_map.upper, sys.a,
      sys.b);
  return pie;
}

PIOperator build_generator_composed(const PDESystem& sys) {
  PIOperator t = build_state_map(sys);
  PIOperator h = build_slope_map(sys);
  PIOperator acc = pi_compose(pi_from_mult(sys.A0, sys.a, sys.b), t);
  acc = pi_add(acc, pi_compose(pi_from_mult(sys.A1, sys.a, sys.b), h));
  return pi_add(acc, pi_from_mult(a2_mult(sys), sys.a, sys.b));
}

namespace {

PolyMat random_state(std::mt19937_64& rng, int n, int deg) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PolyMat x(n, 1);
  for (int i = 0; i < n; ++i) {
    Poly p;
    for (int d = 0; d <= deg; ++d) {
      p.add(Poly::monomial(mono(unsigned(d)), AffineCoeff(u(rng))));
    }
    x.at(i, 0) = p;
  }
  return x;
}

// (x0, dx1, d^2 x2) of a reconstructed state.
PolyMat fundamental_of(const PolyMat& x, int n0, int n1, int n2) {
  PolyMat d = x;
  if (n1 > 0) d.set_block(n0, 0, x.block(n0, 0, n1, 1).diff(Var::S));
  if (n2 > 0) {
    d.set_block(n0 + n1, 0,
                x.block(n0 + n1, 0, n2, 1).diff(Var::S).diff(Var::S));
  }
  return d;
}

}  // namespace

ConversionResiduals verify_conversion(const PDESystem& sys,
                                      const PIERealization& pie, int trials,
                                      unsigned long long seed) {
  std::mt19937_64 rng(seed);
  ConversionResiduals res;
  const int n0 = sys.n0, n1 = sys.n1, n2 = sys.n2, n = sys.n();
  QuadratureRule rule = gauss_legendre(kDefaultQuadOrder, sys.a, sys.b);

  for (int trial = 0; trial < trials; ++trial) {
    PolyMat xhat = random_state(rng, n, 3);
    PolyMat yhat = random_state(rng, n, 3);
    PolyMat x = pi_apply_poly(pie.state_map, xhat);
    PolyMat y = pi_apply_poly(pie.state_map, yhat);

    // Boundary rows on the reconstructed state.
    Eigen::VectorXd bf(sys.bv_count());
    Eigen::MatrixXd xa = x.eval(sys.a, 0.0);
    Eigen::MatrixXd xb = x.eval(sys.b, 0.0);
    PolyMat xs = x.diff(Var::S);
    Eigen::MatrixXd xsa = xs.eval(sys.a, 0.0);
    Eigen::MatrixXd xsb = xs.eval(sys.b, 0.0);
    for (int i = 0; i < n1; ++i) {
      bf(i) = xa(n0 + i, 0);
      bf(n1 + i) = xb(n0 + i, 0);
    }
    for (int i = 0; i < n2; ++i) {
      bf(2 * n1 + i) = xa(n0 + n1 + i, 0);
      bf(2 * n1 + n2 + i) = xb(n0 + n1 + i, 0);
      bf(2 * n1 + 2 * n2 + i) = xsa(n0 + n1 + i, 0);
      bf(2 * n1 + 3 * n2 + i) = xsb(n0 + n1 + i, 0);
    }
    if (sys.bc_count() > 0) {
      res.boundary = std::max(
          res.boundary, (sys.B * bf).cwiseAbs().maxCoeff());
    }

    // Fundamental-state recovery.
    res.reconstruction = std::max(
        res.reconstruction,
        max_coeff_diff(fundamental_of(x, n0, n1, n2), xhat));

    // Inner-product preservation.
    const double lhs = x_inner(x, y, n0, n1, n2, rule);
    const double rhs =
        l2_inner(sample_poly(xhat, rule), sample_poly(yhat, rule), rule);
    res.inner_product = std::max(res.inner_product, std::abs(lhs - rhs));

    // Dynamics: the PDE right side on the reconstruction matches A xhat.
    PolyMat slope = pi_apply_poly(pie.slope_map, xhat);
    PolyMat x2ss = x.block(n0 + n1, 0, n2, 1).diff(Var::S).diff(Var::S);
    PolyMat lhs_dyn = sys.A0 * x + sys.A1 * slope + sys.A2 * x2ss;
    PolyMat rhs_dyn = pi_apply_poly(pie.generator, xhat);
    for (double node : rule.nodes) {
      Eigen::MatrixXd diff = lhs_dyn.eval(node, 0.0) - rhs_dyn.eval(node, 0.0);
      res.dynamics = std::max(res.dynamics, diff.cwiseAbs().maxCoeff());
    }
  }
  return res;
}

}  // namespace pielab
