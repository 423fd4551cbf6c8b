#pragma once

#include "fiscids/system.hpp"

namespace fiscids::presets {

// Gaussian example: phi(x1, x2) = exp(-(x1^2 + x1*x2 + x2^2)/2 + x1 + x2/2),
// lifted to a three-state quadratic-class system with y(0) = 1 for every
// input.
extern const char* kGaussianExprText;
FiscidsSystem gaussian();
double gaussian_reference(double x1, double x2);

// Log-polynomial chain: phi(x1) = log(2 + x1 + x1^2/2). The rational lift
// has 2 states, its polynomialization 3, and its quadratization 6.
extern const char* kLogpolyExprText;
FiscidsSystem logpoly_r();
FiscidsSystem logpoly_p();
FiscidsSystem logpoly_q();
double logpoly_reference(double x1);

// Two-state quadratic system whose terminal output is transcendentally
// transcendental in the inputs: dz1 = (z2 - z1) x1, dz2 = z2 (z2 - z1) x2,
// z0 = (0, 1), y = z1. The matching quadrature oracle is verify_harness's
// tt_oracle.
FiscidsSystem tt_system();

}  // namespace fiscids::presets
