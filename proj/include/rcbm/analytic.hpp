#pragma once

// Closed-form laws of drifted Brownian maxima: the finite-horizon running-max
// CDF, the all-time (stationary) exponential law, the two-point joint CDF and
// joint densities, covariance/correlation of the coupled maxima, and moments.

#include "rcbm/drift.hpp"

namespace rcbm {

// P( sup_{s<=t} (sigma B_s - nu s) <= x ) for x >= 0.  The drift parameter nu
// may be any real number (negative drifts arise in the conditional laws and
// in first-passage duality).  Conventions: t = 0 gives 1 for x >= 0; t = +inf
// gives the exponential law for nu > 0 and 0 otherwise.
double running_max_cdf(double x, double t, double nu, double sigma);

// P( M_*(a) <= x ) = 1 - exp(-2 mu(a) x / sigma^2); degenerate (identically
// zero) when mu(a) = 0.
double stationary_max_cdf(double x, double mu, double sigma);
double stationary_max_cdf(const DriftSpec& spec, double a, double x);

// E[ M_*(a)^gamma ] = Gamma(gamma+1) sigma^{2 gamma} / (2 mu(a))^gamma.
double stationary_max_moment(double mu, double gamma, double sigma);
double stationary_max_moment(const DriftSpec& spec, double a, double gamma);

// Two coupled coordinates a1 < a2 with drifts nu1 > nu2 >= 0 and levels
// x1, x2.  intersection_time() is where the constraint lines
// nu_i s + x_i cross (positive iff x2 > x1).
struct TwoPoint {
  double nu1 = 0.0;
  double nu2 = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
  double sigma = 1.0;

  double intersection_time() const { return (x2 - x1) / (nu1 - nu2); }
};

// P( M_*(a1) <= x1, M_*(a2) <= x2 ).  Reduces to the one-dimensional law when
// x2 <= x1; returns 0 when nu2 = 0 (the larger coordinate has an infinite
// maximum).
double joint_cdf_2d(const TwoPoint& tp);
double joint_cdf_2d(const DriftSpec& spec, double a1, double a2, double x1,
                    double x2);

// Joint density of (M_*^{nu1}, M_*^{nu2} - M_*^{nu1}) at (x, z), written in
// terms of delta1 = nu1 - nu2 (0 < delta1 < nu1).  Zero outside x, z > 0.
double joint_density_g(double x, double z, double nu1, double delta1,
                       double sigma);

// Joint density of (M_*^{nu1}, M_*^{nu2}) at (x1, x2) for 0 <= x1 < x2.
double joint_density_h(double x1, double x2, double nu1, double nu2,
                       double sigma);

// Cov(M_*(a1), M_*(a2)) = sigma^4 / (4 nu1^2) * (2 - nu2/nu1); requires
// nu2 > 0.
double covariance_max(double nu1, double nu2, double sigma);
double covariance_max(const DriftSpec& spec, double a1, double a2);

// Corr(M_*(a1), M_*(a2)) = (nu2/nu1) (2 - nu2/nu1).
double correlation_max(double nu1, double nu2);
double correlation_max(const DriftSpec& spec, double a1, double a2);

// Sub-probability density of the pair (position, running max <= barrier) for
// X_s = sigma B_s - nu s over a window of length t:
//   f(u) du = P( X_t in du, sup_{s<=t} X_s <= barrier ),  u <= barrier.
// This is the transition kernel of the piecewise-drift propagation; it is
// spatially homogeneous in (start, end) -> (end - start, barrier - start).
double max_barrier_density(double u, double barrier, double t, double nu,
                           double sigma);

// Smallest horizon T such that
//   sup_x | running_max_cdf(x, T, mu, sigma) - stationary_max_cdf(x, mu) |
// is below `cdf_gap`, scanned over a quantile grid of the stationary law.
// Requires mu > 0.
double horizon_for_cdf_gap(double mu, double sigma, double cdf_gap);

} // namespace rcbm
