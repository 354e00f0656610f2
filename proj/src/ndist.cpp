#include "rcbm/ndist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rcbm/analytic.hpp"
#include "rcbm/parallel.hpp"
#include "rcbm/rng.hpp"
#include "rcbm/stats.hpp"

namespace rcbm {

namespace {

double intersect(const Constraint& a, const Constraint& b) {
  return (b.x - a.x) / (a.nu - b.nu);
}

void validate_input(const ConstraintSet& cs) {
  if (cs.entries.empty())
    throw std::invalid_argument("constraints: empty input");
  if (!(cs.sigma > 0.0))
    throw std::invalid_argument("constraints: sigma must be positive");
  for (std::size_t i = 0; i < cs.entries.size(); ++i) {
    if (!(cs.entries[i].x >= 0.0))
      throw std::invalid_argument("constraints: levels must be >= 0");
    if (!(cs.entries[i].nu >= 0.0))
      throw std::invalid_argument("constraints: drifts must be >= 0");
    if (i > 0 && !(cs.entries[i].nu < cs.entries[i - 1].nu))
      throw std::invalid_argument("constraints: drifts must strictly decrease");
  }
}

} // namespace

std::vector<double> ConstraintSet::intersection_times() const {
  std::vector<double> taus;
  for (std::size_t i = 0; i + 1 < entries.size(); ++i)
    taus.push_back(intersect(entries[i], entries[i + 1]));
  return taus;
}

bool ConstraintSet::is_reduced() const {
  const auto taus = intersection_times();
  double prev = 0.0;
  for (double t : taus) {
    if (!(t > prev)) return false;
    prev = t;
  }
  return true;
}

double ConstraintSet::envelope(double s) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : entries) m = std::min(m, c.nu * s + c.x);
  return m;
}

ReductionResult reduce_constraints(const ConstraintSet& raw) {
  validate_input(raw);
  const auto& in = raw.entries;
  std::vector<std::size_t> kept;  // stack of input indices, slopes decreasing
  for (std::size_t j = 0; j < in.size(); ++j) {
    while (!kept.empty()) {
      const Constraint& top = in[kept.back()];
      if (in[j].x <= top.x) {
        // Lower intercept with a shallower slope: top is never minimal.
        kept.pop_back();
        continue;
      }
      if (kept.size() >= 2) {
        const Constraint& under = in[kept[kept.size() - 2]];
        // top's stretch of the envelope is empty (ties count as empty).
        if (intersect(under, in[j]) <= intersect(under, top)) {
          kept.pop_back();
          continue;
        }
      }
      break;
    }
    kept.push_back(j);
  }
  ReductionResult out;
  out.reduced.sigma = raw.sigma;
  std::size_t next = 0;
  for (std::size_t j = 0; j < in.size(); ++j) {
    if (next < kept.size() && kept[next] == j) {
      out.reduced.entries.push_back(in[j]);
      ++next;
    } else {
      out.removed.push_back(j);
    }
  }
  return out;
}

ReductionResult reduce_constraints(const DriftSpec& spec,
                                   const std::vector<double>& a,
                                   const std::vector<double>& x) {
  if (a.size() != x.size())
    throw std::invalid_argument("constraints: mismatched a/x lists");
  ConstraintSet cs;
  cs.sigma = spec.sigma();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i > 0 && !(a[i] > a[i - 1]))
      throw std::invalid_argument("constraints: sizes must strictly increase");
    cs.entries.push_back({spec.mu_at(a[i]), x[i]});
  }
  return reduce_constraints(cs);
}

double piecewise_max_cdf(const SegmentedDrift& sd, double sigma,
                         std::size_t grid_n) {
  const std::size_t m = sd.durations.size();
  if (m == 0 || sd.nus.size() != m)
    throw std::invalid_argument("piecewise_max_cdf: bad schedule");
  if (!(sd.barrier >= 0.0))
    throw std::invalid_argument("piecewise_max_cdf: barrier must be >= 0");
  if (grid_n < 64)
    throw std::invalid_argument("piecewise_max_cdf: grid_n must be >= 64");
  for (double d : sd.durations)
    if (!(d > 0.0))
      throw std::invalid_argument("piecewise_max_cdf: durations must be > 0");

  std::vector<double> nu(m);
  for (std::size_t k = 0; k < m; ++k) nu[k] = sd.nus[k] - sd.boost;

  if (m == 1)
    return running_max_cdf(sd.barrier, sd.durations[0], nu[0], sigma);

  double total = 0.0, drift_span = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    total += sd.durations[k];
    drift_span += std::fabs(nu[k]) * sd.durations[k];
  }
  const double u_min = sd.barrier - 12.0 * sigma * std::sqrt(total) - drift_span;

  const std::size_t n = grid_n;
  const double h = (sd.barrier - u_min) / static_cast<double>(n - 1);
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i)
    grid[i] = u_min + h * static_cast<double>(i);
  grid[n - 1] = sd.barrier;  // exact right endpoint

  // Density of (position, running max <= barrier) after the first segment.
  std::vector<double> dens(n);
  for (std::size_t i = 0; i < n; ++i)
    dens[i] = max_barrier_density(grid[i], sd.barrier, sd.durations[0], nu[0],
                                  sigma);

  // Truncation check: the discarded left tail must be negligible.
  if (dens.front() * h > 1e-8)
    throw std::runtime_error("piecewise_max_cdf: truncation target not met");

  // Middle segments: convolve with the shifted kernel.  The kernel is
  // spatially homogeneous, so the transition from u' to u uses the density
  // at (u - u') with barrier lowered to (barrier - u').
  std::vector<double> next(n);
  for (std::size_t k = 1; k + 1 < m; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
        acc += w * dens[j] *
               max_barrier_density(grid[i] - grid[j], sd.barrier - grid[j],
                                   sd.durations[k], nu[k], sigma);
      }
      next[i] = acc * h;
    }
    dens.swap(next);
  }

  // Last segment integrates against the closed-form survival probability.
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    acc += w * dens[j] *
           running_max_cdf(sd.barrier - grid[j], sd.durations[m - 1],
                           nu[m - 1], sigma);
  }
  return std::clamp(acc * h, 0.0, 1.0);
}

double joint_cdf_nd(const ConstraintSet& reduced, std::size_t grid_n) {
  validate_input(reduced);
  if (!reduced.is_reduced())
    throw std::invalid_argument(
        "joint_cdf_nd: constraints are not in reduced form");
  const auto& e = reduced.entries;
  const std::size_t n = e.size();
  const double sigma = reduced.sigma;
  const double nu_n = e.back().nu;
  if (nu_n == 0.0) return 0.0;  // the slowest coordinate has an infinite max
  if (n == 1) return stationary_max_cdf(e[0].x, nu_n, sigma);

  const auto taus = reduced.intersection_times();
  SegmentedDrift u_proc, v_proc;
  double prev = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    u_proc.durations.push_back(taus[i] - prev);
    u_proc.nus.push_back(e[i].nu);
    prev = taus[i];
  }
  u_proc.barrier = e[0].x;
  v_proc = u_proc;
  v_proc.boost = 2.0 * nu_n;

  const double pu = piecewise_max_cdf(u_proc, sigma, grid_n);
  const double pv = piecewise_max_cdf(v_proc, sigma, grid_n);
  const double weight = std::exp(-2.0 * nu_n * e.back().x / (sigma * sigma));
  return std::clamp(pu - weight * pv, 0.0, 1.0);
}

McEstimate mc_joint_cdf(const ConstraintSet& raw, const McJointOptions& opt) {
  const ReductionResult red = reduce_constraints(raw);
  const auto& e = red.reduced.entries;
  const double sigma = red.reduced.sigma;
  const double s2 = sigma * sigma;
  const double nu_n = e.back().nu;
  if (!(nu_n > 0.0))
    throw std::invalid_argument(
        "mc_joint_cdf: the slowest drift must be positive");
  if (opt.n_paths == 0) throw std::invalid_argument("mc_joint_cdf: n_paths=0");

  const auto taus = red.reduced.intersection_times();
  const double t_end = taus.empty() ? 0.0 : taus.back();

  auto accs = parallel_replicates<MeanVar>(
      opt.n_paths, resolve_threads(opt.threads),
      [&](MeanVar& acc, std::size_t path) {
    Rng rng(opt.seed, path, 0);
    double t = 0.0;
    double sb = 0.0;  // sigma B_t
    std::size_t seg = 0;
    bool alive = true;
    while (alive && t < t_end - 1e-12) {
      // Steps never straddle a breakpoint, so the active envelope line is a
      // single linear boundary across each step.
      const double seg_end = taus[seg];
      const double step = std::min(opt.dt, seg_end - t);
      const double sb_next = sb + sigma * std::sqrt(step) * rng.normal_fast();
      const double b0 = e[seg].nu * t + e[seg].x;
      const double b1 = e[seg].nu * (t + step) + e[seg].x;
      if (sb_next >= b1) {
        alive = false;
      } else if (opt.bridge) {
        // The gap to a linear boundary, given the endpoints, is a Brownian
        // bridge; its within-step crossing probability is exact.  Probabilities
        // below e^-60 are skipped without consuming a uniform.
        const double prod = (b0 - sb) * (b1 - sb_next);
        if (prod < 30.0 * s2 * step) {
          const double p = std::exp(-2.0 * prod / (s2 * step));
          if (rng.uniform_open() < p) alive = false;
        }
      }
      sb = sb_next;
      t += step;
      if (t >= seg_end - 1e-12 && seg + 1 < taus.size()) ++seg;
    }
    double w = 0.0;
    if (alive) {
      // Beyond t_end only the slowest line binds; survival against it given
      // the current gap follows the exponential tail law, which closes the
      // horizon exactly.
      const double gap = nu_n * t_end + e.back().x - sb;
      w = gap <= 0.0 ? 0.0 : -std::expm1(-2.0 * nu_n * gap / s2);
    }
    acc.add(w);
  });
  MeanVar acc;
  for (const auto& a : accs) acc.merge(a);
  return {acc.mean(), acc.stderr_mean(), acc.count()};
}

} // namespace rcbm
