#pragma once

// Path simulation of coupled Brownian motions, their Skorokhod reflections,
// running maxima and coupling times.  One driving noise is shared across all
// size coordinates; within-step extremes can optionally be resampled from the
// Brownian-bridge law, which removes the O(sqrt(dt)) discretisation bias of
// grid extremes.

#include <cstdint>
#include <optional>
#include <vector>

#include "rcbm/drift.hpp"
#include "rcbm/rng.hpp"

namespace rcbm {

// Nondecreasing continuous initial profile w with w(0) = 0.
class InitialCondition {
 public:
  static InitialCondition zero();
  // w(a) = c (1 - exp(-a/scale)); w(inf) = c.
  static InitialCondition ramp(double c, double scale);
  // Piecewise linear through nondecreasing knots, constant beyond the last.
  static InitialCondition tabulated(std::vector<double> a,
                                    std::vector<double> w);

  double at(double a) const;
  double w_inf() const { return w_inf_; }

 private:
  InitialCondition() = default;
  enum class Kind { Zero, Ramp, Tabulated } kind_ = Kind::Zero;
  double c_ = 0.0;
  double scale_ = 1.0;
  double w_inf_ = 0.0;
  std::vector<double> tab_a_, tab_w_;
};

// Discretised sample of the coupled field: chi[k][j] = w(a_j) + sigma B_{t_k}
// - mu(a_j) t_k and its running reflection w_field.  The grid may contain 0
// (pinned to zero) and +inf (uses mu_inf / w_inf).
struct PathField {
  std::vector<double> a_grid;
  std::vector<double> t_grid;
  std::vector<double> noise;               // sigma * dB per step
  std::vector<std::vector<double>> chi;     // [time][size]
  std::vector<std::vector<double>> w_field; // [time][size]
};

struct FieldOptions {
  double dt = 1e-3;
  double horizon = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  bool zero_noise = false;  // debug hook: forces dB = 0
};

PathField sample_field(const DriftSpec& spec, const InitialCondition& init,
                       const std::vector<double>& a_grid,
                       const FieldOptions& opt);

// Discrete one-sided reflection at zero: out[k] = f[k] - min(0, min_{j<=k} f[j]).
// Requires f[0] >= 0.
std::vector<double> skorokhod_reflect(const std::vector<double>& path);

struct MaxSimOptions {
  double dt = 1e-3;
  bool bridge = true;  // resample within-step maxima from the bridge law
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
};

// One draw of sup_{t<=T*} (sigma B_t - mu(a) t) where T* comes from
// horizon_for_cdf_gap(mu(a), sigma, cdf_gap).  Requires mu(a) > 0.
double sample_stationary_max(const DriftSpec& spec, double a, double cdf_gap,
                             const MaxSimOptions& opt);

// n independent draws; the horizon rule is evaluated once.  Draw i uses
// replicate index opt.replicate + i.
std::vector<double> sample_stationary_max_batch(const DriftSpec& spec, double a,
                                                double cdf_gap, std::size_t n,
                                                const MaxSimOptions& opt);

// Per-column running maxima of chi_j(t) = w0[j] + sigma B_t - nu[j] t over
// [0, horizon], one shared driving path.  With `bridge`, within-step maxima
// are drawn from the bridge law using one uniform per step shared across
// columns (keeps the field monotone in j).
std::vector<double> simulate_coupled_maxima(const std::vector<double>& nu,
                                            const std::vector<double>& w0,
                                            double sigma, double horizon,
                                            const MaxSimOptions& opt);

// Per-column reflected values W_T(a_j) = chi_T - min(0, inf_{s<=T} chi_s),
// same conventions as simulate_coupled_maxima but tracking the running
// minimum (bridge-corrected when enabled).
std::vector<double> simulate_reflected_at(const std::vector<double>& nu,
                                          const std::vector<double>& w0,
                                          double sigma, double horizon,
                                          const MaxSimOptions& opt);

// First grid time with w_inf + sigma B_t - mu(inf) t <= 0, or nullopt past
// t_cap.  With `bridge`, within-step hits of zero are detected by sampling
// the bridge-crossing probability.
std::optional<double> detect_coupling_time(const DriftSpec& spec,
                                           const InitialCondition& init,
                                           double t_cap,
                                           const MaxSimOptions& opt);

// Fraction of paths whose coupling time is <= horizon.  An empty system at
// t = 0 counts (w_inf = 0 gives fraction 1).
double mc_recurrence_check(const DriftSpec& spec, const InitialCondition& init,
                           double horizon, double dt, std::size_t n_paths,
                           std::uint64_t seed, bool bridge = true);

} // namespace rcbm
