#include "rcbm/bm_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rcbm/analytic.hpp"

namespace rcbm {

namespace {
// Stream ids carved out of each replicate's generator space.
enum Stream : std::uint64_t { kNoise = 0 };
} // namespace

InitialCondition InitialCondition::zero() { return InitialCondition(); }

InitialCondition InitialCondition::ramp(double c, double scale) {
  if (!(c >= 0.0)) throw std::invalid_argument("init: c must be >= 0");
  if (!(scale > 0.0)) throw std::invalid_argument("init: scale must be > 0");
  InitialCondition ic;
  ic.kind_ = Kind::Ramp;
  ic.c_ = c;
  ic.scale_ = scale;
  ic.w_inf_ = c;
  return ic;
}

InitialCondition InitialCondition::tabulated(std::vector<double> a,
                                             std::vector<double> w) {
  if (a.size() != w.size() || a.empty())
    throw std::invalid_argument("init: tabulated needs matched knots");
  double prev_a = 0.0, prev_w = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > prev_a)) throw std::invalid_argument("init: knots must increase");
    if (!(w[i] >= prev_w) || !(w[i] >= 0.0))
      throw std::invalid_argument("init: values must be nondecreasing from 0");
    prev_a = a[i];
    prev_w = w[i];
  }
  InitialCondition ic;
  ic.kind_ = Kind::Tabulated;
  ic.w_inf_ = w.back();
  ic.tab_a_ = std::move(a);
  ic.tab_w_ = std::move(w);
  return ic;
}

double InitialCondition::at(double a) const {
  if (!(a >= 0.0)) throw std::domain_error("init: a must be >= 0");
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Ramp:
      if (std::isinf(a)) return c_;
      return c_ * -std::expm1(-a / scale_);
    case Kind::Tabulated: {
      if (std::isinf(a) || a >= tab_a_.back()) return tab_w_.back();
      if (a <= tab_a_.front())
        return tab_w_.front() * (a / tab_a_.front());
      std::size_t lo = 0, hi = tab_a_.size() - 1;
      while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (tab_a_[mid] <= a ? lo : hi) = mid;
      }
      const double t = (a - tab_a_[lo]) / (tab_a_[hi] - tab_a_[lo]);
      return tab_w_[lo] + t * (tab_w_[hi] - tab_w_[lo]);
    }
  }
  throw std::logic_error("init: unreachable");
}

PathField sample_field(const DriftSpec& spec, const InitialCondition& init,
                       const std::vector<double>& a_grid,
                       const FieldOptions& opt) {
  if (a_grid.empty()) throw std::invalid_argument("sample_field: empty a grid");
  if (!(opt.dt > 0.0)) throw std::invalid_argument("sample_field: dt must be > 0");
  if (!(opt.horizon >= opt.dt))
    throw std::invalid_argument("sample_field: dt must not exceed horizon");
  for (std::size_t j = 1; j < a_grid.size(); ++j)
    if (!(a_grid[j] > a_grid[j - 1]))
      throw std::invalid_argument("sample_field: a grid must increase");

  const std::size_t n_steps =
      static_cast<std::size_t>(std::llround(opt.horizon / opt.dt));
  const std::size_t cols = a_grid.size();
  const double sigma = spec.sigma();

  PathField f;
  f.a_grid = a_grid;
  f.t_grid.resize(n_steps + 1);
  f.noise.resize(n_steps);
  f.chi.assign(n_steps + 1, std::vector<double>(cols));
  f.w_field.assign(n_steps + 1, std::vector<double>(cols));

  std::vector<double> mu(cols), w0(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    // a = 0 is pinned to the zero process rather than fed through mu.
    mu[j] = a_grid[j] == 0.0 ? 0.0 : spec.mu_at(a_grid[j]);
    w0[j] = a_grid[j] == 0.0 ? 0.0 : init.at(a_grid[j]);
  }

  Rng rng(opt.seed, opt.replicate, kNoise);
  const double step_sd = sigma * std::sqrt(opt.dt);
  double b = 0.0;
  std::vector<double> run_min(cols, 0.0);
  for (std::size_t k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * opt.dt;
    f.t_grid[k] = t;
    if (k > 0) {
      const double db = opt.zero_noise ? 0.0 : step_sd * rng.normal();
      f.noise[k - 1] = db;
      b += db;
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (a_grid[j] == 0.0) {
        f.chi[k][j] = 0.0;
        f.w_field[k][j] = 0.0;
        continue;
      }
      const double chi = w0[j] + b - mu[j] * t;
      f.chi[k][j] = chi;
      if (k == 0) {
        run_min[j] = std::min(0.0, chi);
        f.w_field[k][j] = chi - run_min[j];
      } else {
        run_min[j] = std::min(run_min[j], std::min(0.0, chi));
        f.w_field[k][j] = chi - run_min[j];
      }
    }
  }
  return f;
}

std::vector<double> skorokhod_reflect(const std::vector<double>& path) {
  if (path.empty()) throw std::invalid_argument("skorokhod_reflect: empty path");
  if (path.front() < 0.0)
    throw std::invalid_argument("skorokhod_reflect: path[0] must be >= 0");
  std::vector<double> out(path.size());
  double run_min = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    run_min = std::min(run_min, path[k]);
    out[k] = path[k] - run_min;
  }
  return out;
}

std::vector<double> simulate_coupled_maxima(const std::vector<double>& nu,
                                            const std::vector<double>& w0,
                                            double sigma, double horizon,
                                            const MaxSimOptions& opt) {
  if (nu.size() != w0.size() || nu.empty())
    throw std::invalid_argument("simulate_coupled_maxima: bad column spec");
  if (!(opt.dt > 0.0) || !(horizon > 0.0))
    throw std::invalid_argument("simulate_coupled_maxima: bad dt/horizon");
  const std::size_t cols = nu.size();
  const std::size_t n_steps = static_cast<std::size_t>(
      std::ceil(horizon / opt.dt - 1e-9));

  Rng rng(opt.seed, opt.replicate, kNoise);
  std::vector<double> value(cols), best(cols);
  for (std::size_t j = 0; j < cols; ++j) value[j] = best[j] = w0[j];

  const double sq_dt = sigma * std::sqrt(opt.dt);
  const double reach_dt = bridge_reach(sigma * sigma * opt.dt);
  double t = 0.0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const bool full = opt.dt <= horizon - t;
    const double step = full ? opt.dt : horizon - t;
    const double db = (full ? sq_dt : sigma * std::sqrt(step)) * rng.normal_fast();
    const double s2d = sigma * sigma * step;
    const double reach = full ? reach_dt : bridge_reach(s2d);
    // One shared bridge uniform per step, drawn only if some column can
    // still improve its record within the step.
    double u = 0.0;
    bool have_u = false;
    t += step;
    for (std::size_t j = 0; j < cols; ++j) {
      const double next = value[j] + db - nu[j] * step;
      if (opt.bridge) {
        const double hi = next > value[j] ? next : value[j];
        if (hi + reach > best[j]) {
          if (!have_u) {
            u = rng.uniform_open();
            have_u = true;
          }
          const double m = bridge_max(value[j], next, s2d, u);
          if (m > best[j]) best[j] = m;
        }
      } else if (next > best[j]) {
        best[j] = next;
      }
      value[j] = next;
    }
  }
  return best;
}

std::vector<double> simulate_reflected_at(const std::vector<double>& nu,
                                          const std::vector<double>& w0,
                                          double sigma, double horizon,
                                          const MaxSimOptions& opt) {
  if (nu.size() != w0.size() || nu.empty())
    throw std::invalid_argument("simulate_reflected_at: bad column spec");
  if (!(opt.dt > 0.0) || !(horizon > 0.0))
    throw std::invalid_argument("simulate_reflected_at: bad dt/horizon");
  const std::size_t cols = nu.size();
  const std::size_t n_steps = static_cast<std::size_t>(
      std::ceil(horizon / opt.dt - 1e-9));

  Rng rng(opt.seed, opt.replicate, kNoise);
  std::vector<double> value(cols), low(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    value[j] = w0[j];
    low[j] = std::min(0.0, w0[j]);
  }

  const double sq_dt = sigma * std::sqrt(opt.dt);
  const double reach_dt = bridge_reach(sigma * sigma * opt.dt);
  double t = 0.0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const bool full = opt.dt <= horizon - t;
    const double step = full ? opt.dt : horizon - t;
    const double db = (full ? sq_dt : sigma * std::sqrt(step)) * rng.normal_fast();
    const double s2d = sigma * sigma * step;
    const double reach = full ? reach_dt : bridge_reach(s2d);
    double u = 0.0;
    bool have_u = false;
    t += step;
    for (std::size_t j = 0; j < cols; ++j) {
      const double next = value[j] + db - nu[j] * step;
      if (opt.bridge) {
        const double lo = next < value[j] ? next : value[j];
        if (lo - reach < low[j]) {
          if (!have_u) {
            u = rng.uniform_open();
            have_u = true;
          }
          const double m = bridge_min(value[j], next, s2d, u);
          if (m < low[j]) low[j] = m;
        }
      } else if (next < low[j]) {
        low[j] = next;
      }
      value[j] = next;
    }
  }
  std::vector<double> out(cols);
  for (std::size_t j = 0; j < cols; ++j) out[j] = value[j] - std::min(0.0, low[j]);
  return out;
}

double sample_stationary_max(const DriftSpec& spec, double a, double cdf_gap,
                             const MaxSimOptions& opt) {
  return sample_stationary_max_batch(spec, a, cdf_gap, 1, opt)[0];
}

std::vector<double> sample_stationary_max_batch(const DriftSpec& spec, double a,
                                                double cdf_gap, std::size_t n,
                                                const MaxSimOptions& opt) {
  const double mu = spec.mu_at(a);
  if (!(mu > 0.0))
    throw std::domain_error(
        "sample_stationary_max: mu(a) = 0, the all-time maximum is infinite");
  const double horizon = horizon_for_cdf_gap(mu, spec.sigma(), cdf_gap);
  std::vector<double> out(n);
  MaxSimOptions o = opt;
  for (std::size_t i = 0; i < n; ++i) {
    o.replicate = opt.replicate + i;
    out[i] = simulate_coupled_maxima({mu}, {0.0}, spec.sigma(), horizon, o)[0];
  }
  return out;
}

std::optional<double> detect_coupling_time(const DriftSpec& spec,
                                           const InitialCondition& init,
                                           double t_cap,
                                           const MaxSimOptions& opt) {
  if (!(t_cap > 0.0)) throw std::invalid_argument("detect_coupling_time: bad cap");
  const double w_inf = init.w_inf();
  if (w_inf <= 0.0) return 0.0;  // already at the zero profile
  const double mu = spec.mu_inf();
  const double sigma = spec.sigma();

  Rng rng(opt.seed, opt.replicate, kNoise);
  double value = w_inf;
  double t = 0.0;
  while (t < t_cap) {
    const double step = std::min(opt.dt, t_cap - t);
    const double next =
        value + sigma * std::sqrt(step) * rng.normal_fast() - mu * step;
    t += step;
    if (next <= 0.0) return t;
    if (opt.bridge) {
      // Hitting zero inside the step == the bridge of -chi exceeding 0;
      // sub-e^-60 probabilities are skipped without consuming a uniform.
      const double s2d = sigma * sigma * step;
      if (value * next < 30.0 * s2d) {
        const double p = bridge_cross_prob(-value, -next, 0.0, s2d);
        if (rng.uniform_open() < p) return t;
      }
    }
    value = next;
  }
  return std::nullopt;
}

double mc_recurrence_check(const DriftSpec& spec, const InitialCondition& init,
                           double horizon, double dt, std::size_t n_paths,
                           std::uint64_t seed, bool bridge) {
  if (n_paths == 0) throw std::invalid_argument("mc_recurrence_check: n_paths=0");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n_paths; ++i) {
    MaxSimOptions opt;
    opt.dt = dt;
    opt.bridge = bridge;
    opt.seed = seed;
    opt.replicate = i;
    if (detect_coupling_time(spec, init, horizon, opt).has_value()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n_paths);
}

} // namespace rcbm
