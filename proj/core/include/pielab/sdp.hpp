#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pielab/cone.hpp"

namespace pielab {

// One entry of a symmetric constraint matrix: value is A(row, col) with
// row <= col inside one PSD block; the mirrored lower-triangle entry is
// implied.  The svec view of a block scales off-diagonal entries by sqrt(2)
// so svec inner products equal trace inner products.
struct SDPTerm {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// One equality <A_j, X> = rhs, terms sorted by svec index.
struct SDPRow {
  std::vector<SDPTerm> terms;
  double rhs = 0.0;
};

// min trace(X) over block-diagonal X >= 0 subject to <A_j, X> = b_j.
struct StandardSDP {
  std::vector<int> block_sizes;
  std::vector<SDPRow> rows;

  int svec_dim() const;
  // Variable order: block index, then column-major upper triangle.
  int svec_index(int block, int row, int col) const;
  Eigen::VectorXd rhs_vector() const;
};

// Exact field-by-field comparison.
bool sdp_equal(const StandardSDP& lhs, const StandardSDP& rhs);

// Rewrites the cone problem over svec variables.  An off-diagonal slot
// carries half the coefficient of its shared scalar variable.  Rows with no
// terms and |rhs| <= 1e-12 are dropped; rows equal to a kept row up to
// scaling and sign are dropped; ordering is deterministic.
StandardSDP to_standard(const SDPProblem& prob);

struct SolveOptions {
  double tol = 1e-8;
  int max_iterations = 200;
};

struct EmbeddedSolution {
  SDPSolution::Status status = SDPSolution::Status::kInconclusive;
  std::vector<Eigen::MatrixXd> x_blocks;
  Eigen::VectorXd y;
  double objective = 0.0;        // trace of the final X
  double primal_residual = 0.0;  // |b - A(X)| / (1 + |b|)
  double dual_residual = 0.0;    // |C - At(y) - Z|_F / (1 + |C|_F)
  double gap = 0.0;              // relative duality gap
  int iterations = 0;
  std::string detail;
};

// Deterministic primal-dual interior-point solve.  kInfeasible is returned
// only with a dual improving ray; an iteration cap or stall yields
// kInconclusive unless the final iterate already satisfies the equalities.
EmbeddedSolution solve_embedded(const StandardSDP& sdp,
                                const SolveOptions& options = {});

// SDPA sparse format (.dat-s).  The file encodes
//   min c'z  s.t.  sum_k z_k F_k - F0 >= 0
// whose dual is the standard form above under c = b, F_k = A_k, F0 = -I.
// Entries print with 17 significant digits; export then import reproduces
// the StandardSDP exactly.
void export_sdpa(const StandardSDP& sdp, const std::string& path);
StandardSDP read_sdpa(const std::string& path);

// Bound on the recheck of the original equalities at the recovered blocks.
inline constexpr double kEqualityRecheckTol = 1e-7;

}  // namespace pielab
