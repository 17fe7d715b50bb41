#pragma once

#include "pielab/pde_model.hpp"
#include "pielab/pi_operator.hpp"

namespace pielab {

// PIE realization {T, A} of a well-posed standardized PDE, with H the map
// recovering the once-differentiated states.  xhat = (x0, dx1, d^2 x2) is the
// unconstrained fundamental state; x = T xhat satisfies the boundary rows for
// every xhat, and d/dt (T xhat) = A xhat reproduces the PDE dynamics.
struct PIERealization {
  PIOperator state_map;  // T, n x n
  PIOperator slope_map;  // H, (n1 + n2) x n
  PIOperator generator;  // A, n x n
};

// Closed-form kernel constructions; throw std::invalid_argument unless
// check_wellposed(sys).invertible.
PIOperator build_state_map(const PDESystem& sys);
PIOperator build_slope_map(const PDESystem& sys);
PIERealization build_pie(const PDESystem& sys);

// Generator assembled by composing the coefficient multipliers with the state
// and slope maps instead of transcribing kernels; exists as an independent
// route and agrees with build_pie up to roundoff.
PIOperator build_generator_composed(const PDESystem& sys);

// Maxima over `trials` random degree-3 polynomial fundamental states.
struct ConversionResiduals {
  double boundary = 0.0;        // ||B x_bf(T xhat)||_inf
  double reconstruction = 0.0;  // coeff diff of (x0, dx1, d^2 x2)(T xhat) vs xhat
  double inner_product = 0.0;   // |<T xhat, T yhat>_X - <xhat, yhat>_L2|
  double dynamics = 0.0;        // node-wise A0 x + A1 (H xhat) + A2 x2_ss vs A xhat
};

ConversionResiduals verify_conversion(const PDESystem& sys,
                                      const PIERealization& pie, int trials,
                                      unsigned long long seed);

}  // namespace pielab
