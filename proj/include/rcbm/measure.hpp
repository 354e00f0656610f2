#pragma once

// Measure-valued functionals of a nondecreasing field g:
//   <1_[0,a]> = int_0^a g(x)/x^2 dx + g(a)/a,   total mass = int_0^inf g/x^2,
// plus the closed-form mean/variance of the SRPT stationary queue length and
// their Monte Carlo estimators over simulated maximum fields.

#include <cstdint>
#include <vector>

#include "rcbm/drift.hpp"

namespace rcbm {

struct MeasureSnapshot {
  std::vector<double> a_eval;
  std::vector<double> cdf_values;  // measure of [0, a] per evaluation point
  double total_mass = 0.0;
};

struct FieldToMeasureOptions {
  // Mass attributed to (0, grid front).  Defaults to a power-law fit through
  // the first two grid values; callers with an analytic left tail (e.g. the
  // mean correction of the stationary field) can override it.
  double left_tail_override = -1.0;  // < 0 means "use the power-law fit"
  // Field level past the grid end; the right tail of the total mass is
  // estimated as g_inf / a_back.  Defaults to the last grid value.
  double g_inf_override = -1.0;
};

// g sampled on a strictly increasing positive grid; must be nonnegative and
// nondecreasing.  Integration runs in log space (x = e^y).
MeasureSnapshot field_to_measure(const std::vector<double>& a_grid,
                                 const std::vector<double>& g,
                                 const std::vector<double>& a_eval,
                                 const FieldToMeasureOptions& opt = {});

// E[Z] = (sigma^2 / 2 kappa) (kappa/lambda)^{1/p} (pi/p) / sin(pi/p).
double srpt_queue_mean(double kappa, double lambda, double p, double sigma);

// Var[Z]; the printed product for p != 2 and 5 sigma^4 / (12 kappa lambda)
// at p = 2 (the two branches are continuous across p = 2).
double srpt_queue_variance(double kappa, double lambda, double p, double sigma);

// Same variance through the Beta-function route; agrees with
// srpt_queue_variance to ~1e-10 and serves as an internal cross-check.
double srpt_queue_variance_beta_form(double kappa, double lambda, double p,
                                     double sigma);

// Cov( M(a1), M(a2) - M(a1) ) for the SRPT drift family; a2 may be +inf.
double srpt_cov_increment(double a1, double a2, double kappa, double lambda,
                          double p, double sigma);

struct QueueMomentsEstimate {
  double mean = 0.0;
  double mean_stderr = 0.0;
  double variance = 0.0;
  double variance_stderr = 0.0;
  std::size_t replicates = 0;
  double horizon = 0.0;
  double left_tail_mean = 0.0;   // analytic corrections applied per replicate
  double right_tail_mean = 0.0;
};

struct QueueMcOptions {
  std::size_t replicates = 10000;
  double dt = 1e-2;
  std::uint64_t seed = 0;
  std::size_t grid_points = 200;
  double cdf_gap = 1e-4;  // horizon rule, applied at the slowest gridpoint
  bool bridge = true;
  int threads = 1;        // 0 = hardware concurrency; result independent of it
};

// Monte Carlo moments of the stationary total mass for the SRPT drift: each
// replicate simulates the coupled maximum field on a log-spaced grid spanning
// [1e-3, 1e3] times the natural scale and integrates it; tails beyond the
// grid enter through their analytic means.
QueueMomentsEstimate mc_queue_moments(const DriftSpec& spec,
                                      const QueueMcOptions& opt);

struct TotalMassEstimate {
  double mean = 0.0;
  double mean_stderr = 0.0;
  std::size_t replicates = 0;
  double horizon = 0.0;
};

// Mean total mass of the reflected field at the finite time t = T*(cdf_gap),
// zero initial profile; converges to the stationary mean as the gap shrinks.
TotalMassEstimate mc_total_mass_at_horizon(const DriftSpec& spec,
                                           const QueueMcOptions& opt);

} // namespace rcbm
