#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pielab/cone.hpp"
#include "pielab/pde_model.hpp"
#include "pielab/pie_convert.hpp"

namespace pielab {

inline constexpr double kDefaultCoercivity = 1e-4;
inline constexpr double kDefaultDecay = 1e-3;

// Lyapunov feasibility query on a PIE realization.  decay = 0 asks for a
// non-increasing energy (neutral test); decay > 0 additionally demands the
// energy derivative stay below -decay times the squared state norm.
struct StabilityQuery {
  PIERealization pie;
  int d = 1;
  double coercivity = kDefaultCoercivity;  // lower bound enforced on P
  double decay = kDefaultDecay;            // 0 selects the neutral test
};

struct Certificate {
  enum class Status { kCertified, kNotCertified, kInconclusive };
  Status status = Status::kInconclusive;
  std::vector<Eigen::MatrixXd> gram;  // P's unit and weighted Gram blocks
  PIOperator lyapunov;                // numeric P, coercive shift included
  double min_gram_eigenvalue = 0.0;
  double max_equality_residual = 0.0;
  int iterations = 0;
  std::string detail;
};

// Searches for P = cone member + coercivity * identity whose induced energy
// derivative operator is the negative of another cone member (plus the decay
// term).  Feasible => certified; an infeasibility certificate => not
// certified at this degree (no instability claim).
Certificate check_stability(const StabilityQuery& q);

// One-parameter family of standardized systems, e.g. a bundled description
// re-evaluated at each probe value.
struct ParameterFamily {
  std::string name;
  std::function<PDESystem(double)> make;
};

struct BisectionProbe {
  double value = 0.0;
  Certificate::Status status = Certificate::Status::kInconclusive;
};

struct BisectionResult {
  std::string parameter;
  double certified_at = 0.0;      // largest certified probe value
  double not_certified_at = 0.0;  // smallest probe value that failed
  double bracket = 0.0;           // not_certified_at - certified_at
  std::vector<BisectionProbe> probes;
};

// Bisects on the certification outcome.  Requires lo to certify and hi to
// fail; spends at most 40 probes reaching the requested bracket width.
// Probe failures (ill-posed system, solver breakdown) propagate with the
// probe value attached.
BisectionResult bisect_margin(const ParameterFamily& family, double lo,
                              double hi, double tol, int d,
                              double coercivity = kDefaultCoercivity,
                              double decay = kDefaultDecay);

}  // namespace pielab
