#pragma once

// n-dimensional joint law of the coupled maxima.  A constraint (nu_i, x_i)
// confines the driving motion below the line nu_i s + x_i; the joint CDF is
// determined by the lower envelope of those lines.  After reduction to the
// sequentially-intersecting form, the law is assembled from two
// piecewise-constant-drift running-max probabilities, evaluated by density
// propagation across the intersection times, and cross-checked by a
// path Monte Carlo estimator.

#include <cstdint>
#include <vector>

#include "rcbm/drift.hpp"

namespace rcbm {

struct Constraint {
  double nu = 0.0;  // line slope, = mu(a_i); strictly decreasing in i
  double x = 0.0;   // line intercept, >= 0
};

struct ConstraintSet {
  std::vector<Constraint> entries;
  double sigma = 1.0;

  // Intersection times tau_i of consecutive kept lines, i = 1..n-1.
  std::vector<double> intersection_times() const;

  // True when 0 < tau_1 < ... < tau_{n-1}, i.e. every line owns a genuine
  // stretch of the lower envelope.
  bool is_reduced() const;

  // min_i (nu_i s + x_i).
  double envelope(double s) const;
};

struct ReductionResult {
  ConstraintSet reduced;
  std::vector<std::size_t> removed;  // indices into the input list
};

// Drops every constraint whose line never attains the pointwise minimum.
// The envelope of the reduced set equals the envelope of the input set.
ReductionResult reduce_constraints(const ConstraintSet& raw);
ReductionResult reduce_constraints(const DriftSpec& spec,
                                   const std::vector<double>& a,
                                   const std::vector<double>& x);

// Schedule of (duration, nu) segments for a process sigma B_t - nu_k t on
// segment k; `boost` is added to every segment drift (0 for the plain
// process, 2 nu_n for the conditioned one).
struct SegmentedDrift {
  std::vector<double> durations;
  std::vector<double> nus;
  double barrier = 0.0;
  double boost = 0.0;
};

// P( sup over the whole schedule <= barrier ).  A single segment falls back
// to the closed-form running-max CDF; otherwise the sub-probability density
// of (position, max <= barrier) is propagated across segments on a uniform
// grid (trapezoid rule, `grid_n` points, left truncation chosen so that the
// discarded mass is below 1e-8).
double piecewise_max_cdf(const SegmentedDrift& sd, double sigma,
                         std::size_t grid_n = 2048);

// Joint CDF of the reduced set.  n = 1 is the exponential law; nu_n = 0
// short-circuits to 0.
double joint_cdf_nd(const ConstraintSet& reduced, std::size_t grid_n = 2048);

struct McEstimate {
  double estimate = 0.0;
  double stderr_est = 0.0;
  std::size_t n = 0;
};

struct McJointOptions {
  std::size_t n_paths = 100000;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  bool bridge = true;  // sample within-step envelope crossings exactly
  int threads = 1;     // 0 = hardware concurrency; result independent of it
};

// Path estimator of the joint CDF.  The driving path is simulated to the
// last intersection time with per-step crossing checks against the active
// envelope line (exact bridge crossings when enabled); the remaining
// constraint beyond that point is closed analytically with the exponential
// tail law, which eliminates horizon truncation.
McEstimate mc_joint_cdf(const ConstraintSet& raw, const McJointOptions& opt);

} // namespace rcbm
