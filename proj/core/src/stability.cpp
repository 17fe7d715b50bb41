#include "pielab/stability.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>

namespace pielab {

namespace {

bool poly_covers(const Poly& cand, const Poly& target) {
  for (const auto& [mono, coeff] : target.coeffs()) {
    (void)coeff;
    const AffineCoeff* c = cand.find(mono);
    if (c == nullptr || c->terms.empty()) return false;
  }
  return true;
}

bool mat_covers(const PolyMat& cand, const PolyMat& target) {
  for (int i = 0; i < target.rows(); ++i)
    for (int j = 0; j < target.cols(); ++j)
      if (!poly_covers(cand.at(i, j), target.at(i, j))) return false;
  return true;
}

bool op_covers(const PIOperator& cand, const PIOperator& target) {
  return mat_covers(cand.mult, target.mult) &&
         mat_covers(cand.lower, target.lower) &&
         mat_covers(cand.upper, target.upper);
}

// States touched by the multiplier part; the slack's multiplier basis is
// restricted to these so the equality cannot force Gram rows to zero.
std::vector<int> mult_support(const PIOperator& deriv) {
  std::vector<int> states;
  for (int i = 0; i < deriv.rows; ++i) {
    bool hit = false;
    for (int j = 0; j < deriv.cols && !hit; ++j)
      hit = !deriv.mult.at(i, j).zero() || !deriv.mult.at(j, i).zero();
    if (hit) states.push_back(i);
  }
  return states;
}

// Smallest cone degree whose member support reaches every monomial of the
// derivative operator.  Monomials the slack cannot touch would otherwise
// turn into hard zero constraints on P and hollow out the search space.
int covering_degree(const PIOperator& deriv, int d, int n, double a, double b,
                    const std::vector<int>& mult_states) {
  for (int dq = d; dq <= d + 8; ++dq) {
    SDPProblem trial;
    PosPIVar cand = declare_pos_pivar_support(trial, n, dq, a, b, mult_states);
    if (op_covers(cand.op, deriv)) return dq;
  }
  throw std::runtime_error(
      "check_stability: no slack degree within range covers the derivative operator");
}

double min_eigenvalue(const std::vector<Eigen::MatrixXd>& blocks) {
  double m = 0.0;
  bool any = false;
  for (const auto& blk : blocks) {
    if (blk.rows() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blk);
    const double lo = es.eigenvalues().minCoeff();
    m = any ? std::min(m, lo) : lo;
    any = true;
  }
  return any ? m : 0.0;
}

}  // namespace

Certificate check_stability(const StabilityQuery& q) {
  if (!(q.coercivity > 0.0))
    throw std::invalid_argument("check_stability: coercivity must be positive");
  if (q.decay < 0.0)
    throw std::invalid_argument("check_stability: decay must be nonnegative");
  if (q.d < 0) throw std::invalid_argument("check_stability: degree must be nonnegative");

  const PIOperator& T = q.pie.state_map;
  const PIOperator& A = q.pie.generator;
  if (T.rows != T.cols || A.rows != A.cols || T.rows != A.rows ||
      T.a != A.a || T.b != A.b)
    throw std::invalid_argument("check_stability: realization maps disagree in shape or domain");
  const int n = T.rows;

  SDPProblem prob;
  PosPIVar P = declare_pos_pivar(prob, n, q.d, T.a, T.b);
  const PIOperator Pop =
      pi_add(P.op, pi_scale(pi_identity(n, T.a, T.b), q.coercivity));

  PIOperator D = pi_scale(pi_add(pi_compose(pi_adjoint(A), pi_compose(Pop, T)),
                                 pi_compose(pi_adjoint(T), pi_compose(Pop, A))),
                          -1.0);
  if (q.decay > 0.0)
    D = pi_add(D, pi_scale(pi_compose(pi_adjoint(T), T), -q.decay));
  // Self-adjoint up to roundoff; averaging with the adjoint makes the two
  // kernels exact mirror images, so the matched coefficient equations
  // collapse pairwise when the backend canonicalizes them.
  D = pi_scale(pi_add(D, pi_adjoint(D)), 0.5);

  const std::vector<int> mask = mult_support(D);
  const int dq = covering_degree(D, q.d, n, T.a, T.b, mask);
  PosPIVar slack = declare_pos_pivar_support(prob, n, dq, T.a, T.b, mask);
  enforce_op_eq(prob, D, slack.op);

  SDPSolution sol = solve(prob);

  Certificate cert;
  cert.iterations = sol.iterations;
  cert.detail = sol.detail;
  cert.max_equality_residual = sol.primal_residual;
  // A run that terminated far from primal feasibility found no certificate
  // at this degree; that is a statement about the search, not an
  // instability claim.  Only near-feasible non-witnessed exits stay
  // inconclusive.
  constexpr double kNoCertificateResidual = 1e-4;
  switch (sol.status) {
    case SDPSolution::Status::kFeasible:
      cert.status = Certificate::Status::kCertified;
      break;
    case SDPSolution::Status::kInfeasible:
      cert.status = Certificate::Status::kNotCertified;
      break;
    default:
      cert.status = sol.primal_residual > kNoCertificateResidual
                        ? Certificate::Status::kNotCertified
                        : Certificate::Status::kInconclusive;
      break;
  }
  if (cert.status == Certificate::Status::kCertified) {
    cert.gram = {sol.gram.at(std::size_t(P.block_unit)),
                 sol.gram.at(std::size_t(P.block_weighted))};
    cert.min_gram_eigenvalue = min_eigenvalue(cert.gram);
    cert.lyapunov = pi_substitute(Pop, prob.assignment(sol.gram));
  }
  return cert;
}

BisectionResult bisect_margin(const ParameterFamily& family, double lo,
                              double hi, double tol, int d, double coercivity,
                              double decay) {
  if (!family.make)
    throw std::invalid_argument("bisect_margin: family has no generator");
  if (!(lo < hi))
    throw std::invalid_argument("bisect_margin: need lo < hi");
  if (!(tol > 0.0))
    throw std::invalid_argument("bisect_margin: need a positive tolerance");

  constexpr int kMaxProbes = 40;
  BisectionResult out;
  out.parameter = family.name;
  int inconclusive = 0;

  auto probe = [&](double value) {
    Certificate cert;
    try {
      StabilityQuery q;
      q.pie = build_pie(family.make(value));
      q.d = d;
      q.coercivity = coercivity;
      q.decay = decay;
      cert = check_stability(q);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "bisect_margin: probe " << family.name << " = " << value
          << " failed: " << e.what();
      throw std::runtime_error(msg.str());
    }
    out.probes.push_back({value, cert.status});
    if (cert.status == Certificate::Status::kInconclusive) ++inconclusive;
    return cert.status;
  };

  if (probe(lo) != Certificate::Status::kCertified)
    throw std::invalid_argument(
        "bisect_margin: lower endpoint did not certify; widen the bracket downward");
  if (probe(hi) == Certificate::Status::kCertified)
    throw std::invalid_argument(
        "bisect_margin: upper endpoint certified; widen the bracket upward");

  double clo = lo, chi = hi;
  while (chi - clo > tol && int(out.probes.size()) < kMaxProbes) {
    const double mid = 0.5 * (clo + chi);
    // Inconclusive probes narrow from above: certification is the positive
    // event and must never be inferred from a failed solve.
    if (probe(mid) == Certificate::Status::kCertified)
      clo = mid;
    else
      chi = mid;
  }
  if (chi - clo > tol)
    throw std::runtime_error(
        "bisect_margin: probe budget exhausted before the requested width");
  if (inconclusive == int(out.probes.size()))
    throw std::runtime_error("bisect_margin: every probe was inconclusive");

  out.certified_at = clo;
  out.not_certified_at = chi;
  out.bracket = chi - clo;
  return out;
}

}  // namespace pielab
