#pragma once

#include <Eigen/Dense>

#include "pielab/pde_model.hpp"

namespace pielab {

// Finite-difference semi-discretization restricted to the boundary
// constraint manifold.  Test oracle only; never feeds the certificate path.
struct DiscretizedSystem {
  int grid_size = 0;
  // Generator projected onto an orthonormal basis of the null space of the
  // discretized boundary conditions (least-squares-consistent elimination).
  Eigen::MatrixXd matrix;
};

// Uniform grid of m nodes including both endpoints, second-order central
// differences inside, one-sided stencils at the boundary.  Requires m >= 20;
// throws std::invalid_argument when the boundary elimination system is rank
// deficient.
DiscretizedSystem discretize(const PDESystem& sys, int m);

// Largest real part over the eigenvalues of discretize(sys, m).matrix.
double discretization_oracle(const PDESystem& sys, int m);

}  // namespace pielab
