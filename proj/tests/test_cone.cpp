#include <random>

#include "doctest.h"
#include "pielab/cone.hpp"
#include "util.hpp"

using namespace pielab;

namespace {

// Gram values for a d=0 scalar variable: slots (size 3) are
// (value feature, left-integral feature, right-integral feature).
std::vector<Eigen::MatrixXd> zero_gram(const SDPProblem& prob) {
  std::vector<Eigen::MatrixXd> g;
  for (int size : prob.block_sizes()) {
    g.push_back(Eigen::MatrixXd::Zero(size, size));
  }
  return g;
}

PIOperator instantiate(const SDPProblem& prob, const PosPIVar& var,
                       const std::vector<Eigen::MatrixXd>& gram) {
  return pi_substitute(var.op, prob.assignment(gram));
}

Eigen::MatrixXd random_psd(std::mt19937_64& rng, int size) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(size, size);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) m(i, j) = u(rng);
  }
  return m.transpose() * m;
}

// Feature stack of the factorization proof: per weight block,
// (Z1(nu) x(nu); int_a^nu Z2(nu,th) x(th) dth; int_nu^b Z2(nu,th) x(th) dth).
Eigen::VectorXd feature_stack(const Eigen::VectorXd& xnu, const PolyMat& x,
                              double nu, double a, double b, int n, int d) {
  const int q1 = n * (d + 1);
  const int q2 = n * (d + 1) * (d + 1);
  auto z1 = [&](double v) {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(q1, n);
    for (int m = 0; m <= d; ++m) {
      z.block(m * n, 0, n, n) =
          std::pow(v, m) * Eigen::MatrixXd::Identity(n, n);
    }
    return z;
  };
  auto z2 = [&](double v, double w) {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(q2, n);
    for (int i = 0; i <= d; ++i) {
      for (int j = 0; j <= d; ++j) {
        z.block((i * (d + 1) + j) * n, 0, n, n) =
            std::pow(v, i) * std::pow(w, j) *
            Eigen::MatrixXd::Identity(n, n);
      }
    }
    return z;
  };
  Eigen::VectorXd stack = Eigen::VectorXd::Zero(q1 + 2 * q2);
  stack.head(q1) = z1(nu) * xnu;
  QuadratureRule left = gauss_legendre(32, a, nu);
  QuadratureRule right = gauss_legendre(32, nu, b);
  Eigen::MatrixXd xl = sample_poly(x, left);
  Eigen::MatrixXd xr = sample_poly(x, right);
  for (int k = 0; k < left.nodes.size(); ++k) {
    stack.segment(q1, q2) += left.weights(k) * (z2(nu, left.nodes(k)) * xl.col(k));
    stack.tail(q2) += right.weights(k) * (z2(nu, right.nodes(k)) * xr.col(k));
  }
  return stack;
}

}  // namespace

TEST_CASE("degree-zero scalar variable matches the hand-integrated kernels") {
  const double a = 0.25, b = 1.75;
  SDPProblem prob;
  PosPIVar var = declare_pos_pivar(prob, 1, 0, a, b);
  CHECK(prob.block_sizes() == std::vector<int>{3, 3});
  CHECK(prob.var_count() == 12);

  auto gram = zero_gram(prob);
  gram[0] << 2.0, 0.3, -0.2,
             0.3, 0.5,  0.1,
            -0.2, 0.1,  0.7;
  PIOperator p = instantiate(prob, var, gram);

  CHECK(p.mult.eval(0.0, 0.0)(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  // N1 = P12 + P31 + (th - a) P33 + (s - th) P32 + (b - s) P22
  // N2 = P13 + P21 + (s - a) P33 + (th - s) P23 + (b - th) P22
  for (double s : {0.3, 0.9, 1.6}) {
    for (double th : {0.4, 1.1}) {
      const double n1 = 0.3 + (-0.2) + (th - a) * 0.7 + (s - th) * 0.1 +
                        (b - s) * 0.5;
      const double n2 = -0.2 + 0.3 + (s - a) * 0.7 + (th - s) * 0.1 +
                        (b - th) * 0.5;
      CHECK(p.lower.eval(s, th)(0, 0) == doctest::Approx(n1).epsilon(1e-13));
      CHECK(p.upper.eval(s, th)(0, 0) == doctest::Approx(n2).epsilon(1e-13));
    }
  }
}

TEST_CASE("zero Gram gives the zero operator and rank-one gives identity") {
  SDPProblem prob;
  PosPIVar var = declare_pos_pivar(prob, 1, 0, 0.0, 1.0);
  auto gram = zero_gram(prob);
  PIOperator zero = instantiate(prob, var, gram);
  CHECK(zero.mult.zero());
  CHECK(zero.lower.zero());
  CHECK(zero.upper.zero());

  gram[0](0, 0) = 1.0;
  PIOperator ident = instantiate(prob, var, gram);
  CHECK(pi_max_coeff_diff(ident, pi_identity(1, 0.0, 1.0)) < 1e-15);
}

TEST_CASE("declared variables are self-adjoint at the coefficient level") {
  for (int n : {1, 2}) {
    for (int d : {0, 1, 2}) {
      CAPTURE(n);
      CAPTURE(d);
      SDPProblem prob;
      PosPIVar var = declare_pos_pivar(prob, n, d, -0.5, 1.5);
      CHECK(pi_max_coeff_diff(pi_adjoint(var.op), var.op) < 1e-13);
    }
  }
}

TEST_CASE("random PSD Grams assemble nonnegative operators") {
  std::mt19937_64 rng(314159);
  SDPProblem prob;
  const int n = 2, d = 1;
  PosPIVar var = declare_pos_pivar(prob, n, d, 0.0, 1.0);
  std::vector<Eigen::MatrixXd> gram;
  for (int size : prob.block_sizes()) gram.push_back(random_psd(rng, size));
  PIOperator p = instantiate(prob, var, gram);

  QuadratureRule rule = gauss_legendre(kDefaultQuadOrder, 0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    PolyMat x = testutil::random_poly_vec(rng, n, 3);
    Eigen::MatrixXd xs = sample_poly(x, rule);
    Eigen::MatrixXd px = pi_apply_numeric(p, poly_fn(x), rule);
    CHECK(l2_inner(xs, px, rule) >= -1e-8);
  }
}

TEST_CASE("quadratic form factors through the weighted feature stack") {
  std::mt19937_64 rng(99);
  const double a = 0.0, b = 1.0;
  for (int n : {1, 2}) {
    CAPTURE(n);
    const int d = 1;
    SDPProblem prob;
    PosPIVar var = declare_pos_pivar(prob, n, d, a, b);
    std::vector<Eigen::MatrixXd> gram;
    for (int size : prob.block_sizes()) gram.push_back(random_psd(rng, size));
    PIOperator p = instantiate(prob, var, gram);

    QuadratureRule rule = gauss_legendre(kDefaultQuadOrder, a, b);
    for (int rep = 0; rep < 3; ++rep) {
      PolyMat x = testutil::random_poly_vec(rng, n, 2);
      Eigen::MatrixXd xs = sample_poly(x, rule);
      Eigen::MatrixXd px = pi_apply_numeric(p, poly_fn(x), rule);
      const double direct = l2_inner(xs, px, rule);

      double factored = 0.0;
      for (int k = 0; k < rule.nodes.size(); ++k) {
        const double nu = rule.nodes(k);
        Eigen::VectorXd w = feature_stack(xs.col(k), x, nu, a, b, n, d);
        const double unit = w.dot(gram[0] * w);
        const double bump = (nu - a) * (b - nu) * w.dot(gram[1] * w);
        factored += rule.weights(k) * (unit + bump);
      }
      CHECK(direct == doctest::Approx(factored).epsilon(1e-6));
    }
  }
}

TEST_CASE("identity shift makes the form coercive on samples") {
  std::mt19937_64 rng(7);
  const double eps = 1e-4;
  SDPProblem prob;
  PosPIVar var = declare_pos_pivar(prob, 2, 1, 0.0, 1.0);
  std::vector<Eigen::MatrixXd> gram;
  for (int size : prob.block_sizes()) gram.push_back(random_psd(rng, size));
  PIOperator p = pi_add(instantiate(prob, var, gram),
                        pi_scale(pi_identity(2, 0.0, 1.0), eps));

  QuadratureRule rule = gauss_legendre(kDefaultQuadOrder, 0.0, 1.0);
  for (int rep = 0; rep < 25; ++rep) {
    PolyMat x = testutil::random_poly_vec(rng, 2, 3);
    Eigen::MatrixXd xs = sample_poly(x, rule);
    Eigen::MatrixXd px = pi_apply_numeric(p, poly_fn(x), rule);
    CHECK(l2_inner(xs, px, rule) >=
          (eps - 1e-8) * l2_inner(xs, xs, rule) - 1e-12);
  }
}

TEST_CASE("operator equality constraints match coefficients") {
  SDPProblem prob;
  PosPIVar var = declare_pos_pivar(prob, 1, 0, 0.0, 1.0);

  SUBCASE("identical sides append nothing") {
    enforce_op_eq(prob, var.op, var.op);
    CHECK(prob.equalities().empty());
  }
  SUBCASE("matching against a fixed operator yields one equation per slot") {
    PIOperator target = pi_scale(pi_identity(1, 0.0, 1.0), 2.0);
    enforce_op_eq(prob, var.op, target);
    // mult spans {1, s, s^2} from the weighted block; each kernel spans
    // {1, s, theta, s^2, theta^2, s^3, theta^3} once the weighted segments
    // are integrated.  3 + 7 + 7 equations.
    CHECK(prob.equalities().size() == 17);
    bool found_mult = false;
    for (const auto& eq : prob.equalities()) {
      if (eq.rhs == 2.0) found_mult = true;
    }
    CHECK(found_mult);
  }
  SUBCASE("shape mismatch is rejected") {
    CHECK_THROWS_AS(enforce_op_eq(prob, var.op, pi_identity(2, 0.0, 1.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(enforce_op_eq(prob, var.op, pi_identity(1, 0.0, 2.0)),
                    std::invalid_argument);
  }
}

TEST_CASE("gram sizing follows the monomial counts") {
  SDPProblem prob;
  PosPIVar var = declare_pos_pivar(prob, 3, 2, 0.0, 1.0);
  // q1 = 3 * 3 = 9, q2 = 3 * 9 = 27, size = 9 + 2 * 27 = 63.
  CHECK(prob.block_sizes() == std::vector<int>{63, 63});
  CHECK(var.op.rows == 3);
  const int per_block = 63 * 64 / 2;
  CHECK(prob.var_count() == 2 * per_block);
}
