#pragma once

// Self-contained special functions used by every closed-form law in this
// library: standard normal CDF/PDF (and log/inverse variants), log-gamma and
// the Beta function.  All routines are pure and thread-safe.
//
// Accuracy notes:
//   * erf/erfc use the Cody rational minimax approximations (three ranges);
//     absolute error is below 1.2e-16 over the double range.
//   * std_normal_cdf satisfies Phi(x) + Phi(-x) = 1 to ~2 ulp because the
//     negative branch is evaluated as 2 - erfc(x).
//   * log_gamma is a Lanczos approximation (g = 7, 9 terms), relative error
//     ~1e-14 for positive arguments.
//   * inverse_std_normal_cdf is the Wichura PPND16 algorithm, relative error
//     ~1e-15; it is the workhorse behind Gaussian variate generation.

#include <stdexcept>

namespace rcbm {

// erf(x) and erfc(x); erfcx(x) = exp(x^2) erfc(x) stays finite for large x.
double erf_fn(double x);
double erfc_fn(double x);
double erfcx_fn(double x);

double std_normal_pdf(double x);

// Total on [-inf, inf]; +-inf map to 1/0.
double std_normal_cdf(double x);

// log Phi(x), stable down to x ~ -1e7.
double log_std_normal_cdf(double x);

// Phi^{-1}(p) for p in (0,1).
double inverse_std_normal_cdf(double p);

// log Gamma(x) for x > 0.
double log_gamma(double x);

// Euler Beta function B(x, y) = Gamma(x)Gamma(y)/Gamma(x+y).
// Arguments restricted to (0, 50]; anything else throws std::domain_error.
double beta_fn(double x, double y);

} // namespace rcbm
