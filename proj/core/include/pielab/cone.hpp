#pragma once

#include <map>
#include <string>
#include <vector>

#include "pielab/pi_operator.hpp"

namespace pielab {

// Feasibility problem over symmetric PSD matrix blocks.  Every scalar
// decision variable is one upper-triangle Gram slot (block, row, col) with
// row <= col; the off-diagonal variable stands for both symmetric entries.
class SDPProblem {
 public:
  struct Slot {
    int block, row, col;
  };

  int add_psd_block(int size);
  // Scalar decision variable bound to a Gram slot; allocates on first use.
  int entry_var(int block, int row, int col);

  void add_equalities(std::vector<LinearEq> eqs);

  const std::vector<int>& block_sizes() const { return block_sizes_; }
  const std::vector<LinearEq>& equalities() const { return equalities_; }
  int var_count() const { return int(slots_.size()); }
  const Slot& slot_of(int var) const { return slots_.at(std::size_t(var)); }

  // Variable assignment induced by concrete Gram blocks.
  std::map<int, double> assignment(
      const std::vector<Eigen::MatrixXd>& gram) const;

 private:
  std::vector<int> block_sizes_;
  std::vector<Slot> slots_;
  std::map<std::tuple<int, int, int>, int> slot_index_;
  std::vector<LinearEq> equalities_;
};

struct SDPSolution {
  enum class Status { kFeasible, kInfeasible, kInconclusive };
  Status status = Status::kInconclusive;
  std::vector<Eigen::MatrixXd> gram;  // one matrix per PSD block
  double primal_residual = 0.0;
  int iterations = 0;
  std::string detail;
};

// Positive 3-PI operator variable: two PSD Gram blocks (weights 1 and
// (s-a)(b-s)) against the monomial bases 1..s^d and the {s^i theta^j}
// grid, assembled into a self-adjoint operator affine in the Gram entries.
struct PosPIVar {
  int n = 0;
  int d = 0;
  int block_unit = -1;
  int block_weighted = -1;
  PIOperator op;
};

PosPIVar declare_pos_pivar(SDPProblem& prob, int n, int d, double a, double b);

// Variant whose multiplier part is supported on the listed states only; the
// kernel bases still span every state.  Matching an operator with an
// identically zero multiplier block against a full member would force Gram
// rows to zero and strip the feasible set of its interior.
PosPIVar declare_pos_pivar_support(SDPProblem& prob, int n, int d, double a,
                                   double b,
                                   const std::vector<int>& mult_states);

// Coefficient-matches all three parameters of lhs - rhs to zero.  Throws
// std::invalid_argument on shape or domain mismatch.
void enforce_op_eq(SDPProblem& prob, const PIOperator& lhs,
                   const PIOperator& rhs);

// Delegates to the embedded semidefinite backend.
SDPSolution solve(const SDPProblem& prob);

}  // namespace pielab
