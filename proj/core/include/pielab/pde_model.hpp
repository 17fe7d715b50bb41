#pragma once

#include <Eigen/Dense>
#include <map>
#include <stdexcept>
#include <string>

#include "pielab/poly.hpp"

namespace pielab {

// Coupled linear 1-D PDE in standardized form on [a, b]:
//   d/dt x = A0(s) x + A1(s) [dx1; dx2] + A2(s) d^2 x2,
// with x partitioned into n0 states without spatial derivatives, n1 states
// differentiated once and n2 states differentiated twice.  Boundary
// conditions are B * (x1(a); x1(b); x2(a); x2(b); dx2(a); dx2(b)) = 0.
struct PDESystem {
  int n0 = 0, n1 = 0, n2 = 0;
  double a = 0.0, b = 1.0;
  PolyMat A0;           // n x n
  PolyMat A1;           // n x (n1 + n2)
  PolyMat A2;           // n x n2
  Eigen::MatrixXd B;    // (n1 + 2 n2) x (2 n1 + 4 n2)

  int n() const { return n0 + n1 + n2; }
  int bc_count() const { return n1 + 2 * n2; }
  int bv_count() const { return 2 * n1 + 4 * n2; }
};

// Singular-value cutoff: BT counts as singular when the smallest singular
// value drops below 1e-9 * max(largest, 1).
inline constexpr double kSingularTol = 1e-9;

// Maps the core boundary values (x1(a); x2(a); dx2(a)) to the full boundary
// value vector under zero fundamental state.
Eigen::MatrixXd build_core_lift(int n1, int n2, double a, double b);

struct WellPosednessReport {
  Eigen::MatrixXd bt;            // B * core lift, square bc_count
  bool invertible = false;
  double condition = 0.0;        // sigma_max / sigma_min of bt
  int rank_of_b = 0;
  // BT singular although B has full row rank: the boundary conditions hit
  // the non-invertible patterns rather than being redundant.
  bool prohibited_bc_detected = false;
};

WellPosednessReport check_wellposed(const PDESystem& sys);

struct PdeFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A system file evaluated at concrete parameter values.
struct PDEFile {
  PDESystem system;
  std::map<std::string, double> params;
  std::string description;
};

// Parses the JSON description format.  Matrix entries are numbers or
// arithmetic expressions over the declared parameters; overrides replace
// parameter defaults and must name declared parameters.  Throws
// PdeFormatError with a field path on any violation.
PDEFile load_pde_text(const std::string& text,
                      const std::map<std::string, double>& overrides = {});
PDEFile load_pde(const std::string& path,
                 const std::map<std::string, double>& overrides = {});

// Serializes an evaluated system; load_pde_text(serialize_pde(s)) recovers s
// exactly (coefficients are printed with 17 significant digits).
std::string serialize_pde(const PDESystem& sys);

// channels identical copies of d/dt x = x + x_ss on [0,1] with x(0) = x(1) = 0.
// Scales the stability problem without changing its character.
PDESystem make_diffusion_family(int channels);

bool pde_equal(const PDESystem& x, const PDESystem& y);

}  // namespace pielab
