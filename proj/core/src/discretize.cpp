#include "pielab/discretize.hpp"

#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace pielab {
namespace {

using Stencil = std::vector<std::pair<int, double>>;

// Second-order first derivative at node k; one-sided at the endpoints.
Stencil d1_stencil(int k, int m, double h) {
  if (k == 0)
    return {{0, -1.5 / h}, {1, 2.0 / h}, {2, -0.5 / h}};
  if (k == m - 1)
    return {{m - 1, 1.5 / h}, {m - 2, -2.0 / h}, {m - 3, 0.5 / h}};
  return {{k - 1, -0.5 / h}, {k + 1, 0.5 / h}};
}

// Second-order second derivative at node k; one-sided at the endpoints.
Stencil d2_stencil(int k, int m, double h) {
  const double h2 = h * h;
  if (k == 0)
    return {{0, 2.0 / h2}, {1, -5.0 / h2}, {2, 4.0 / h2}, {3, -1.0 / h2}};
  if (k == m - 1)
    return {{m - 1, 2.0 / h2},
            {m - 2, -5.0 / h2},
            {m - 3, 4.0 / h2},
            {m - 4, -1.0 / h2}};
  return {{k - 1, 1.0 / h2}, {k, -2.0 / h2}, {k + 1, 1.0 / h2}};
}

}  // namespace

DiscretizedSystem discretize(const PDESystem& sys, int m) {
  if (m < 20)
    throw std::invalid_argument("discretize: needs at least 20 grid points");
  const int n = sys.n(), n0 = sys.n0, n1 = sys.n1, n2 = sys.n2;
  const double h = (sys.b - sys.a) / (m - 1);
  const int nm = n * m;
  auto at = [n](int k, int i) { return k * n + i; };

  // Upwind-consistent dissipation scale for the transported states; O(h),
  // so it vanishes under refinement.  Pure central differences admit
  // spurious right-half-plane modes for first-order transport.
  double dissipation = 0.0;
  if (n1 > 0) {
    double speed = 0.0;
    for (int k = 0; k < m; ++k)
      speed = std::max(speed, sys.A1.eval(sys.a + k * h).leftCols(n1).norm());
    dissipation = 0.5 * h * speed;
  }

  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(nm, nm);
  for (int k = 0; k < m; ++k) {
    const double s = sys.a + k * h;
    const Eigen::MatrixXd a0 = sys.A0.eval(s);
    const Eigen::MatrixXd a1 = sys.A1.eval(s);
    const Eigen::MatrixXd a2 = sys.A2.eval(s);
    const Stencil d1 = d1_stencil(k, m, h);
    const Stencil d2 = d2_stencil(k, m, h);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) gen(at(k, i), at(k, j)) += a0(i, j);
      for (int j = 0; j < n1 + n2; ++j)
        for (const auto& [t, c] : d1)
          gen(at(k, i), at(t, n0 + j)) += a1(i, j) * c;
      for (int j = 0; j < n2; ++j)
        for (const auto& [t, c] : d2)
          gen(at(k, i), at(t, n0 + n1 + j)) += a2(i, j) * c;
    }
    if (k > 0 && k < m - 1)
      for (int i = n0; i < n0 + n1; ++i)
        for (const auto& [t, c] : d2)
          gen(at(k, i), at(t, i)) += dissipation * c;
  }

  DiscretizedSystem out;
  out.grid_size = m;
  const int bc = sys.bc_count();
  if (bc == 0) {
    out.matrix = std::move(gen);
    return out;
  }

  // Boundary value extraction in the order
  // (x1(a); x1(b); x2(a); x2(b); dx2(a); dx2(b)).
  Eigen::MatrixXd bv = Eigen::MatrixXd::Zero(sys.bv_count(), nm);
  int r = 0;
  for (int i = 0; i < n1; ++i) bv(r++, at(0, n0 + i)) = 1.0;
  for (int i = 0; i < n1; ++i) bv(r++, at(m - 1, n0 + i)) = 1.0;
  for (int i = 0; i < n2; ++i) bv(r++, at(0, n0 + n1 + i)) = 1.0;
  for (int i = 0; i < n2; ++i) bv(r++, at(m - 1, n0 + n1 + i)) = 1.0;
  for (int side : {0, m - 1})
    for (int i = 0; i < n2; ++i) {
      for (const auto& [t, c] : d1_stencil(side, m, h))
        bv(r, at(t, n0 + n1 + i)) = c;
      ++r;
    }
  const Eigen::MatrixXd cons = sys.B * bv;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(cons.transpose());
  qr.setThreshold(1e-10);
  const int rank = int(qr.rank());
  if (rank < bc)
    throw std::invalid_argument(
        "discretize: boundary elimination system is rank deficient");
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd null_basis = q.rightCols(nm - rank);
  out.matrix = null_basis.transpose() * gen * null_basis;
  return out;
}

double discretization_oracle(const PDESystem& sys, int m) {
  const DiscretizedSystem d = discretize(sys, m);
  if (d.matrix.rows() == 0)
    return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Eigen::MatrixXd> es(d.matrix, false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("discretize: eigenvalue iteration failed");
  return es.eigenvalues().real().maxCoeff();
}

}  // namespace pielab
