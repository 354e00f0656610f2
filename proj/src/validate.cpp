#include "rcbm/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "rcbm/analytic.hpp"
#include "rcbm/measure.hpp"
#include "rcbm/quadrature.hpp"
#include "rcbm/rng.hpp"
#include "rcbm/special.hpp"
#include "rcbm/stats.hpp"

namespace rcbm {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

const char* kind_name(CheckKind k) {
  switch (k) {
    case CheckKind::ZScore: return "z";
    case CheckKind::KsStatistic: return "ks";
    case CheckKind::AbsoluteError: return "abs";
    case CheckKind::Trend: return "trend";
    case CheckKind::Skipped: return "skip";
  }
  return "?";
}

// W_t(a) samples at the requested times for one coordinate, one path per
// replicate, bridge-corrected running minimum.
std::vector<std::vector<double>> reflected_snapshots(
    const DriftSpec& spec, const InitialCondition& init, double a,
    const std::vector<double>& ts, std::size_t n_paths, double dt,
    std::uint64_t seed, std::uint64_t stream, bool bridge) {
  const double mu = a == 0.0 ? 0.0 : spec.mu_at(a);
  const double w0 = init.at(a);
  const double sigma = spec.sigma();
  std::vector<std::vector<double>> out(ts.size(),
                                       std::vector<double>(n_paths));
  for (std::size_t path = 0; path < n_paths; ++path) {
    Rng rng(seed, path, stream);
    double value = w0;
    double low = std::min(0.0, w0);
    double t = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      while (t < ts[k] - 1e-12) {
        const double step = std::min(dt, ts[k] - t);
        const double s2d = sigma * sigma * step;
        const double next =
            value + sigma * std::sqrt(step) * rng.normal_fast() - mu * step;
        if (bridge) {
          const double lo = next < value ? next : value;
          if (lo - bridge_reach(s2d) < low) {
            const double m = bridge_min(value, next, s2d, rng.uniform_open());
            if (m < low) low = m;
          }
        } else if (next < low) {
          low = next;
        }
        value = next;
        t += step;
      }
      out[k][path] = value - std::min(0.0, low);
    }
  }
  return out;
}

} // namespace

std::string report_line(const ExperimentReport& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : (r.kind == CheckKind::Skipped ? "SKIP" : "FAIL"))
     << "  " << r.name << " [" << kind_name(r.kind) << "=" << fmt(r.z_score)
     << " thr=" << fmt(r.threshold) << "] analytic=" << fmt(r.analytic_value)
     << " mc=" << fmt(r.mc_estimate) << " se=" << fmt(r.stderr_est);
  if (!r.note.empty()) os << " note: " << r.note;
  return os.str();
}

bool all_pass(const std::vector<ExperimentReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass && r.kind != CheckKind::Skipped) return false;
  return true;
}

std::vector<ExperimentReport> stationarity_sweep(
    const DriftSpec& spec, const InitialCondition& init,
    const StationaritySweepConfig& cfg) {
  std::vector<ExperimentReport> out;
  std::uint64_t stream = 0;
  for (double a : cfg.a_values) {
    const double mu = spec.mu_at(a);
    const double sigma = spec.sigma();
    std::vector<double> ts = cfg.t_values;
    if (ts.empty()) {
      const double tstar = horizon_for_cdf_gap(mu, sigma, cfg.cdf_gap);
      ts = {0.25 * tstar, 0.5 * tstar, tstar};
    }
    const auto t0 = clock_type::now();
    auto samples = reflected_snapshots(spec, init, a, ts, cfg.n_paths, cfg.dt,
                                       cfg.seed, stream++, cfg.bridge);
    const double elapsed = seconds_since(t0);
    double prev_ks = 2.0;
    bool monotone = true;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const double ks = ks_statistic(samples[k], [&](double x) {
        return x < 0.0 ? 0.0 : stationary_max_cdf(x, mu, sigma);
      });
      monotone = monotone && ks <= prev_ks + 2.0 * ks_critical_95(cfg.n_paths);
      prev_ks = ks;
      ExperimentReport r;
      r.parameters = "a=" + fmt(a) + " t=" + fmt(ts[k]) + " n=" +
                     fmt(static_cast<double>(cfg.n_paths)) + " dt=" + fmt(cfg.dt);
      r.mc_estimate = ks;
      r.z_score = ks;
      r.stderr_est = ks_critical_95(cfg.n_paths);
      r.runtime_seconds = elapsed / static_cast<double>(ts.size());
      if (k + 1 == ts.size()) {
        r.name = "stationarity ks a=" + fmt(a);
        r.kind = CheckKind::KsStatistic;
        r.threshold = cfg.ks_threshold;
        r.pass = ks < cfg.ks_threshold;
        r.note = monotone ? "ks trend nonincreasing" : "ks trend violated";
      } else {
        r.name = "stationarity trend a=" + fmt(a) + " t=" + fmt(ts[k]);
        r.kind = CheckKind::Trend;
        r.threshold = 1.0;
        r.pass = monotone;
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<ExperimentReport> moment_sweep(const DriftSpec& spec,
                                           const InitialCondition& init,
                                           const MomentSweepConfig& cfg) {
  std::vector<ExperimentReport> out;
  const double mu = spec.mu_at(cfg.a);
  const double sigma = spec.sigma();
  const double tstar = horizon_for_cdf_gap(mu, sigma, cfg.cdf_gap);

  std::vector<double> active;
  for (double g : cfg.gammas) {
    if (spec.higher_moment_integrable(g)) {
      active.push_back(g);
      continue;
    }
    ExperimentReport r;
    r.name = "moment gamma=" + fmt(g);
    r.parameters = spec.describe() + " a=" + fmt(cfg.a);
    r.kind = CheckKind::Skipped;
    r.pass = true;
    r.note = "higher-moment integrability fails for gamma=" + fmt(g) +
             "; limit not guaranteed";
    out.push_back(std::move(r));
  }
  if (active.empty()) return out;

  const auto t0 = clock_type::now();
  auto samples = reflected_snapshots(spec, init, cfg.a, {tstar}, cfg.n_paths,
                                     cfg.dt, cfg.seed, 0, true);
  const double elapsed = seconds_since(t0);
  for (double g : active) {
    MeanVar acc;
    for (double w : samples[0]) acc.add(std::pow(w, g));
    const double target = stationary_max_moment(mu, g, sigma);
    ExperimentReport r;
    r.name = "moment gamma=" + fmt(g);
    r.parameters = spec.describe() + " a=" + fmt(cfg.a) + " t=" + fmt(tstar) +
                   " n=" + fmt(static_cast<double>(cfg.n_paths));
    r.analytic_value = target;
    r.mc_estimate = acc.mean();
    r.stderr_est = acc.stderr_mean();
    r.z_score = (acc.mean() - target) / acc.stderr_mean();
    r.threshold = cfg.z_threshold;
    r.pass = std::fabs(r.z_score) <= cfg.z_threshold;
    r.runtime_seconds = elapsed / static_cast<double>(active.size());
    out.push_back(std::move(r));
  }

  // Mean of the total mass at the same horizon, against its closed form.
  if (cfg.total_mass_replicates > 0 && spec.kind() == DriftKind::Srpt) {
    if (spec.higher_moment_integrable(1.0)) {
      const auto t1 = clock_type::now();
      QueueMcOptions q;
      q.replicates = cfg.total_mass_replicates;
      q.dt = cfg.dt;
      q.seed = cfg.seed + 101;
      q.cdf_gap = cfg.cdf_gap;
      const auto est = mc_total_mass_at_horizon(spec, q);
      const double target = srpt_queue_mean(spec.kappa(), spec.lambda(),
                                            spec.p(), spec.sigma());
      ExperimentReport r;
      r.name = "total mass mean at horizon";
      r.parameters = spec.describe() + " t=" + fmt(est.horizon) + " reps=" +
                     fmt(static_cast<double>(est.replicates));
      r.analytic_value = target;
      r.mc_estimate = est.mean;
      r.stderr_est = est.mean_stderr;
      r.z_score = (est.mean - target) / est.mean_stderr;
      r.threshold = cfg.z_threshold;
      r.pass = std::fabs(r.z_score) <= cfg.z_threshold;
      r.runtime_seconds = seconds_since(t1);
      out.push_back(std::move(r));
    } else {
      ExperimentReport r;
      r.name = "total mass mean at horizon";
      r.parameters = spec.describe();
      r.kind = CheckKind::Skipped;
      r.pass = true;
      r.note = "mass integrability fails; stationary total mass undefined";
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<ExperimentReport> law_2d_grid(const Law2dConfig& cfg) {
  const double sigma = cfg.sigma;
  const double s2 = sigma * sigma;
  const double dnu = cfg.nu1 - cfg.nu2;
  if (!(dnu > 0.0) || !(cfg.nu2 > 0.0))
    throw std::invalid_argument("law_2d_grid: need nu1 > nu2 > 0");

  struct Cell {
    double x1, x2, tau;
    std::size_t cp = 0;
    MeanVar joint;
    MeanVar cond_num;
  };
  std::vector<Cell> cells;
  std::vector<double> cps;
  for (double x1 : cfg.x1_values)
    for (double off : cfg.x2_offsets) {
      Cell c;
      c.x1 = x1;
      c.x2 = x1 + off;
      c.tau = off / dnu;
      cells.push_back(c);
      cps.push_back(c.tau);
    }
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  for (auto& c : cells)
    c.cp = static_cast<std::size_t>(
        std::lower_bound(cps.begin(), cps.end(), c.tau) - cps.begin());

  const auto t0 = clock_type::now();
  std::vector<double> max_at(cps.size()), pos_at(cps.size());
  for (std::size_t path = 0; path < cfg.n_paths; ++path) {
    Rng rng(cfg.seed, path, 0);
    // Running max of Y_s = sigma B_s - nu1 s; within-step maxima via bridge
    // resampling keep the draws exact at any step size.
    double value = 0.0, best = 0.0, t = 0.0;
    for (std::size_t k = 0; k < cps.size(); ++k) {
      while (t < cps[k] - 1e-12) {
        const double step = std::min(cfg.dt, cps[k] - t);
        const double s2d = s2 * step;
        const double next = value +
                            sigma * std::sqrt(step) * rng.normal_fast() -
                            cfg.nu1 * step;
        const double hi = next > value ? next : value;
        if (hi + bridge_reach(s2d) > best) {
          const double m = bridge_max(value, next, s2d, rng.uniform_open());
          if (m > best) best = m;
        }
        value = next;
        t += step;
      }
      max_at[k] = best;
      pos_at[k] = value;
    }
    for (auto& c : cells) {
      const bool alive = max_at[c.cp] <= c.x1;
      // Both constraint lines meet at tau, so the gap below the second line
      // there is x1 - Y_tau; the exponential tail law closes the rest.
      const double cross =
          alive ? std::exp(-2.0 * cfg.nu2 * (c.x1 - pos_at[c.cp]) / s2) : 0.0;
      c.joint.add(alive ? 1.0 - cross : 0.0);
      c.cond_num.add(cross);
    }
  }
  const double elapsed = seconds_since(t0);

  std::vector<ExperimentReport> out;
  for (auto& c : cells) {
    TwoPoint tp{cfg.nu1, cfg.nu2, c.x1, c.x2, sigma};
    const double analytic = joint_cdf_2d(tp);
    ExperimentReport r;
    r.name = "law2d joint x1=" + fmt(c.x1) + " x2=" + fmt(c.x2);
    r.parameters = "nu1=" + fmt(cfg.nu1) + " nu2=" + fmt(cfg.nu2) +
                   " sigma=" + fmt(sigma) + " n=" +
                   fmt(static_cast<double>(cfg.n_paths)) + " dt=" + fmt(cfg.dt);
    r.analytic_value = analytic;
    r.mc_estimate = c.joint.mean();
    r.stderr_est = c.joint.stderr_mean();
    r.z_score = (c.joint.mean() - analytic) / c.joint.stderr_mean();
    r.threshold = cfg.z_threshold;
    r.pass = std::fabs(r.z_score) <= cfg.z_threshold;
    r.runtime_seconds = elapsed / static_cast<double>(cells.size());
    if (cells.size() > 20) {
      r.note = "bonferroni: " + fmt(static_cast<double>(cells.size())) +
               " cells share the familywise level at this z threshold";
    }
    out.push_back(std::move(r));

    if (cfg.conditional_identity) {
      // Conditional law in product form: both sides multiplied by the exact
      // tail probability of the second coordinate.
      const double weight = std::exp(-2.0 * cfg.nu2 * c.x2 / s2);
      const double target =
          weight * running_max_cdf(c.x1, c.tau, cfg.nu1 - 2.0 * cfg.nu2, sigma);
      ExperimentReport q;
      q.name = "law2d conditional x1=" + fmt(c.x1) + " x2=" + fmt(c.x2);
      q.parameters = r.parameters;
      q.analytic_value = target / weight;
      q.mc_estimate = c.cond_num.mean() / weight;
      q.stderr_est = c.cond_num.stderr_mean() / weight;
      q.z_score = (c.cond_num.mean() - target) / c.cond_num.stderr_mean();
      q.threshold = cfg.z_threshold;
      q.pass = std::fabs(q.z_score) <= cfg.z_threshold;
      out.push_back(std::move(q));
    }
  }
  return out;
}

std::vector<ExperimentReport> covariance_check(const CovarianceCheckConfig& cfg) {
  const double horizon = horizon_for_cdf_gap(cfg.nu2, cfg.sigma, cfg.cdf_gap);
  const auto t0 = clock_type::now();
  const std::size_t per = cfg.n_paths / cfg.batches;
  MeanVar cov_batches, corr_batches;
  MaxSimOptions opt;
  opt.dt = cfg.dt;
  opt.bridge = true;
  opt.seed = cfg.seed;
  std::vector<double> nu{cfg.nu1, cfg.nu2}, w0{0.0, 0.0};
  std::size_t rep = 0;
  for (std::size_t b = 0; b < cfg.batches; ++b) {
    std::vector<double> m1(per), m2(per);
    MeanVar a1, a2;
    for (std::size_t i = 0; i < per; ++i) {
      opt.replicate = rep++;
      const auto mx = simulate_coupled_maxima(nu, w0, cfg.sigma, horizon, opt);
      m1[i] = mx[0];
      m2[i] = mx[1];
      a1.add(mx[0]);
      a2.add(mx[1]);
    }
    double c = 0.0;
    for (std::size_t i = 0; i < per; ++i)
      c += (m1[i] - a1.mean()) * (m2[i] - a2.mean());
    c /= static_cast<double>(per - 1);
    cov_batches.add(c);
    corr_batches.add(c / std::sqrt(a1.variance() * a2.variance()));
  }
  const double elapsed = seconds_since(t0);

  std::vector<ExperimentReport> out;
  const double targets[2] = {covariance_max(cfg.nu1, cfg.nu2, cfg.sigma),
                             correlation_max(cfg.nu1, cfg.nu2)};
  const char* names[2] = {"covariance paired-path", "correlation paired-path"};
  const MeanVar* accs[2] = {&cov_batches, &corr_batches};
  for (int i = 0; i < 2; ++i) {
    ExperimentReport r;
    r.name = names[i];
    r.parameters = "nu1=" + fmt(cfg.nu1) + " nu2=" + fmt(cfg.nu2) + " n=" +
                   fmt(static_cast<double>(cfg.n_paths)) + " horizon=" +
                   fmt(horizon);
    r.analytic_value = targets[i];
    r.mc_estimate = accs[i]->mean();
    r.stderr_est = accs[i]->stderr_mean();
    r.z_score = (accs[i]->mean() - targets[i]) / accs[i]->stderr_mean();
    r.threshold = cfg.z_threshold;
    r.pass = std::fabs(r.z_score) <= cfg.z_threshold;
    r.runtime_seconds = elapsed / 2.0;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExperimentReport> ndist_check(const NdistCheckConfig& cfg) {
  std::vector<ExperimentReport> out;

  {
    ConstraintSet raw;
    raw.sigma = cfg.sigma;
    raw.entries = {{3.0, 1.0}, {2.0, 3.0}, {1.0, 4.0}};
    const auto rr = reduce_constraints(raw);
    ExperimentReport r;
    r.name = "reducer drops dominated middle line";
    r.parameters = "nu=(3,2,1) x=(1,3,4)";
    r.kind = CheckKind::AbsoluteError;
    r.threshold = 0.0;
    r.pass = rr.reduced.entries.size() == 2 && rr.removed.size() == 1 &&
             rr.removed[0] == 1;
    r.note = r.pass ? "removed index 1" : "unexpected reduction";
    out.push_back(std::move(r));
  }
  {
    ConstraintSet raw;
    raw.sigma = cfg.sigma;
    raw.entries = {{3.0, 1.0}, {2.0, 3.0}, {1.0, 6.0}};
    const auto rr = reduce_constraints(raw);
    const auto taus = rr.reduced.intersection_times();
    ExperimentReport r;
    r.name = "reducer keeps sequential triple";
    r.parameters = "nu=(3,2,1) x=(1,3,6)";
    r.kind = CheckKind::AbsoluteError;
    r.threshold = 0.0;
    r.pass = rr.reduced.entries.size() == 3 && taus.size() == 2 &&
             std::fabs(taus[0] - 2.0) < 1e-12 &&
             std::fabs(taus[1] - 3.0) < 1e-12;
    out.push_back(std::move(r));
  }

  {
    ConstraintSet cs;
    cs.sigma = cfg.sigma;
    for (std::size_t i = 0; i < cfg.nus.size(); ++i)
      cs.entries.push_back({cfg.nus[i], cfg.xs[i]});
    const auto t0 = clock_type::now();
    const double quad = joint_cdf_nd(cs, cfg.grid_n);
    McJointOptions mo;
    mo.n_paths = cfg.n_paths;
    mo.dt = cfg.dt;
    mo.seed = cfg.seed;
    mo.threads = cfg.threads;
    const auto mc = mc_joint_cdf(cs, mo);
    ExperimentReport r;
    r.name = "nd law quadrature vs mc";
    r.parameters = "n=" + fmt(static_cast<double>(cfg.nus.size())) +
                   " paths=" + fmt(static_cast<double>(cfg.n_paths)) +
                   " dt=" + fmt(cfg.dt);
    r.analytic_value = quad;
    r.mc_estimate = mc.estimate;
    r.stderr_est = mc.stderr_est;
    r.z_score = (mc.estimate - quad) / mc.stderr_est;
    r.threshold = cfg.z_threshold;
    r.pass = std::fabs(r.z_score) <= cfg.z_threshold;
    r.runtime_seconds = seconds_since(t0);
    out.push_back(std::move(r));
  }

  {
    Rng rng(cfg.seed, 1, 99);
    double worst = 0.0;
    for (std::size_t i = 0; i < cfg.fuzz_2d; ++i) {
      const double nu2 = 0.2 + 2.0 * rng.uniform();
      const double nu1 = nu2 + 0.2 + 2.0 * rng.uniform();
      const double x1 = 0.05 + rng.uniform();
      const double x2 = x1 + 0.05 + rng.uniform();
      ConstraintSet cs;
      cs.sigma = cfg.sigma;
      cs.entries = {{nu1, x1}, {nu2, x2}};
      const double a = joint_cdf_nd(cs, cfg.grid_n);
      const double b = joint_cdf_2d(TwoPoint{nu1, nu2, x1, x2, cfg.sigma});
      worst = std::max(worst, std::fabs(a - b));
    }
    ExperimentReport r;
    r.name = "nd law n=2 matches two-point law";
    r.parameters = "fuzz=" + fmt(static_cast<double>(cfg.fuzz_2d));
    r.kind = CheckKind::AbsoluteError;
    r.z_score = worst;
    r.threshold = 1e-6;
    r.pass = worst < 1e-6;
    out.push_back(std::move(r));
  }

  // Kernel propagation machinery: splitting one segment in two must
  // reproduce the closed-form running-max CDF.
  {
    double worst = 0.0;
    Rng rng(cfg.seed, 2, 99);
    for (int i = 0; i < 20; ++i) {
      const double nu = 0.3 + 2.5 * rng.uniform();
      const double barrier = 0.2 + 1.5 * rng.uniform();
      const double t1 = 0.3 + rng.uniform(), t2 = 0.3 + rng.uniform();
      SegmentedDrift sd;
      sd.durations = {t1, t2};
      sd.nus = {nu, nu};
      sd.barrier = barrier;
      const double split = piecewise_max_cdf(sd, cfg.sigma, cfg.grid_n);
      const double direct = running_max_cdf(barrier, t1 + t2, nu, cfg.sigma);
      worst = std::max(worst, std::fabs(split - direct));
    }
    ExperimentReport r;
    r.name = "kernel propagation split-segment consistency";
    r.parameters = "grid_n=" + fmt(static_cast<double>(cfg.grid_n));
    r.kind = CheckKind::AbsoluteError;
    r.z_score = worst;
    r.threshold = 1e-5;
    r.pass = worst < 1e-5;
    out.push_back(std::move(r));
  }

  // Dropping the last constraint reproduces the lower-dimensional value.
  {
    ConstraintSet cs;
    cs.sigma = cfg.sigma;
    for (std::size_t i = 0; i < cfg.nus.size(); ++i)
      cs.entries.push_back({cfg.nus[i], cfg.xs[i]});
    const auto taus = cs.intersection_times();
    SegmentedDrift u_proc;
    double prev = 0.0;
    for (std::size_t i = 0; i + 1 < cs.entries.size(); ++i) {
      u_proc.durations.push_back(taus[i] - prev);
      u_proc.nus.push_back(cs.entries[i].nu);
      prev = taus[i];
    }
    u_proc.barrier = cs.entries[0].x;
    const double via_kernel = piecewise_max_cdf(u_proc, cfg.sigma, cfg.grid_n);
    ConstraintSet head;
    head.sigma = cfg.sigma;
    head.entries.assign(cs.entries.begin(), cs.entries.end() - 1);
    const double via_nd = joint_cdf_nd(head, cfg.grid_n);
    ExperimentReport r;
    r.name = "nd law dimension consistency";
    r.parameters = "drop last of n=" + fmt(static_cast<double>(cfg.nus.size()));
    r.kind = CheckKind::AbsoluteError;
    r.analytic_value = via_nd;
    r.mc_estimate = via_kernel;
    r.z_score = std::fabs(via_kernel - via_nd);
    r.threshold = 1e-5;
    r.pass = r.z_score < 1e-5;
    out.push_back(std::move(r));
  }
  return out;
}

ExperimentReport kernel_identity_check(std::size_t samples, std::uint64_t seed,
                                       double tolerance) {
  Rng rng(seed, 0, 0);
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double nu = -1.5 + 3.0 * rng.uniform();
    const double alpha = -1.5 + 3.0 * rng.uniform();
    const double t = 0.1 + 2.9 * rng.uniform();
    const double x = 0.05 + 2.95 * rng.uniform();
    const double u = x - 4.0 * rng.uniform();
    const double sigma = 0.8 + 0.7 * rng.uniform();
    const double zeta = nu - 2.0 * alpha;
    const double lhs = max_barrier_density(u, x, t, zeta, sigma);
    const double rhs =
        std::exp(2.0 * alpha * ((nu - alpha) * t + u) / (sigma * sigma)) *
        max_barrier_density(u, x, t, nu, sigma);
    const double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
    worst = std::max(worst, std::fabs(lhs - rhs) / scale);
  }
  ExperimentReport r;
  r.name = "drift-tilt kernel identity";
  r.parameters = "samples=" + fmt(static_cast<double>(samples));
  r.kind = CheckKind::AbsoluteError;
  r.z_score = worst;
  r.threshold = tolerance;
  r.pass = worst < tolerance;
  return r;
}

std::vector<ExperimentReport> measure_check(const MeasureCheckConfig& cfg) {
  std::vector<ExperimentReport> out;
  const auto spec = DriftSpec::srpt(cfg.sigma, cfg.kappa, cfg.lambda, cfg.p);
  const double mean_target =
      srpt_queue_mean(cfg.kappa, cfg.lambda, cfg.p, cfg.sigma);
  const double var_target =
      srpt_queue_variance(cfg.kappa, cfg.lambda, cfg.p, cfg.sigma);
  // The pinned variance coefficient is inconsistent with the covariance
  // route: integrating the two-point covariance over the quadrant yields
  // 2(p^2-4)/(p^2(p+1)) * pi/sin(2 pi/p) in place of the pinned
  // 2(p^2+2p+2)(p-2)/(p^3(p+1)) * pi/sin(2 pi/p).  Both values are reported.
  const double s4 = cfg.sigma * cfg.sigma * cfg.sigma * cfg.sigma;
  const double var_corrected =
      cfg.p == 2.0
          ? s4 / (3.0 * cfg.kappa * cfg.lambda)
          : s4 / (4.0 * cfg.kappa * cfg.kappa) *
                std::pow(cfg.kappa / cfg.lambda, 2.0 / cfg.p) * 2.0 *
                (cfg.p * cfg.p - 4.0) / (cfg.p * cfg.p * (cfg.p + 1.0)) *
                M_PI / std::sin(2.0 * M_PI / cfg.p);

  const auto t0 = clock_type::now();
  QueueMcOptions q;
  q.replicates = cfg.replicates;
  q.dt = cfg.dt;
  q.seed = cfg.seed;
  q.threads = cfg.threads;
  const auto est = mc_queue_moments(spec, q);
  const double elapsed = seconds_since(t0);

  {
    ExperimentReport r;
    r.name = "queue mean mc vs closed form";
    r.parameters = spec.describe() + " reps=" +
                   fmt(static_cast<double>(cfg.replicates));
    r.kind = CheckKind::AbsoluteError;
    r.analytic_value = mean_target;
    r.mc_estimate = est.mean;
    r.stderr_est = est.mean_stderr;
    r.z_score = std::fabs(est.mean - mean_target) / mean_target;
    r.threshold = cfg.mean_rel_tol;
    r.pass = r.z_score < cfg.mean_rel_tol;
    r.runtime_seconds = elapsed;
    out.push_back(std::move(r));
  }
  {
    ExperimentReport r;
    r.name = "queue variance mc vs closed form";
    r.parameters = spec.describe() + " reps=" +
                   fmt(static_cast<double>(cfg.replicates));
    r.kind = CheckKind::AbsoluteError;
    r.analytic_value = var_target;
    r.mc_estimate = est.variance;
    r.stderr_est = est.variance_stderr;
    r.z_score = std::fabs(est.variance - var_target) / var_target;
    r.threshold = cfg.var_rel_tol;
    r.pass = r.z_score < cfg.var_rel_tol;
    std::ostringstream note;
    note << "pinned coefficient inconsistent with the covariance double "
            "integral; corrected value "
         << fmt(var_corrected) << ", mc off corrected by "
         << fmt(std::fabs(est.variance - var_corrected) / var_corrected * 100.0)
         << "%";
    r.note = note.str();
    out.push_back(std::move(r));
  }
  {
    const double probe =
        (1.01 - 1.0) * srpt_queue_mean(cfg.kappa, cfg.lambda, 1.01, cfg.sigma);
    const double target = cfg.sigma * cfg.sigma / (2.0 * cfg.lambda);
    ExperimentReport r;
    r.name = "queue mean divergence rate p->1";
    r.parameters = "p=1.01";
    r.kind = CheckKind::AbsoluteError;
    r.analytic_value = target;
    r.mc_estimate = probe;
    r.z_score = std::fabs(probe - target) / target;
    r.threshold = 0.03;
    r.pass = r.z_score < 0.03;
    out.push_back(std::move(r));
  }
  {
    const double probe = srpt_queue_mean(cfg.kappa, cfg.lambda, 1e6, cfg.sigma);
    const double target = cfg.sigma * cfg.sigma / (2.0 * cfg.kappa);
    ExperimentReport r;
    r.name = "queue mean light-tail limit p->inf";
    r.parameters = "p=1e6";
    r.kind = CheckKind::AbsoluteError;
    r.analytic_value = target;
    r.mc_estimate = probe;
    r.z_score = std::fabs(probe - target);
    r.threshold = 1e-4;
    r.pass = r.z_score < 1e-4;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExperimentReport> density_quadrature_check(double nu1,
                                                       double delta1,
                                                       double sigma,
                                                       double mass_tol,
                                                       double moment_tol) {
  const auto t0 = clock_type::now();
  auto inner = [&](double z, bool weighted) {
    auto f = [&](double x) {
      const double g = joint_density_g(x, z, nu1, delta1, sigma);
      return weighted ? x * z * g : g;
    };
    return integrate_to_infinity(f, 0.0, 1e-12, 1e-11).value;
  };
  // z = w^2 regularizes the inverse-sqrt edge of the z-marginal at zero.
  auto mass_outer = [&](double w) { return inner(w * w, false) * 2.0 * w; };
  auto mom_outer = [&](double w) { return inner(w * w, true) * 2.0 * w; };
  const double mass =
      integrate_to_infinity(mass_outer, 0.0, 1e-10, 1e-10).value;
  const double mom = integrate_to_infinity(mom_outer, 0.0, 1e-10, 1e-10).value;
  const double nu2 = nu1 - delta1;
  const double s4 = sigma * sigma * sigma * sigma;
  const double mom_target =
      s4 * (nu1 * nu1 - nu2 * nu2) / (4.0 * nu1 * nu1 * nu1 * nu2);
  const double elapsed = seconds_since(t0);

  std::vector<ExperimentReport> out;
  {
    ExperimentReport r;
    r.name = "two-point density normalization";
    r.parameters = "nu1=" + fmt(nu1) + " delta1=" + fmt(delta1);
    r.kind = CheckKind::AbsoluteError;
    r.analytic_value = 1.0;
    r.mc_estimate = mass;
    r.z_score = std::fabs(mass - 1.0);
    r.threshold = mass_tol;
    r.pass = r.z_score < mass_tol;
    r.runtime_seconds = elapsed / 2.0;
    out.push_back(std::move(r));
  }
  {
    ExperimentReport r;
    r.name = "two-point density cross moment";
    r.parameters = "nu1=" + fmt(nu1) + " delta1=" + fmt(delta1);
    r.kind = CheckKind::AbsoluteError;
    r.analytic_value = mom_target;
    r.mc_estimate = mom;
    r.z_score = std::fabs(mom - mom_target);
    r.threshold = moment_tol;
    r.pass = r.z_score < moment_tol;
    r.runtime_seconds = elapsed / 2.0;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExperimentReport> srpt_suite(const SrptSuiteConfig& cfg) {
  std::vector<ExperimentReport> out;
  std::vector<double> ks_by_r, ratio_by_r;

  for (double r_val : cfg.r_values) {
    ScalingParams sp;
    sp.r = r_val;
    sp.p = cfg.p;
    sp.x_m = cfg.x_m;
    sp.kappa = cfg.kappa;

    const auto t0 = clock_type::now();
    SrptRunConfig rc;
    rc.horizon_scaled = cfg.horizon_scaled;
    rc.seed = cfg.seed;
    const double warm = cfg.warmup_fraction * cfg.horizon_scaled;
    for (double t = warm; t <= cfg.horizon_scaled; t += cfg.snapshot_spacing)
      rc.snapshot_times.push_back(t);
    const auto res = run_srpt(sp, rc);

    {
      const bool flow = res.arrivals + res.initial_jobs ==
                        res.departures + res.in_system_at_end;
      // <iota, measure> = sum of location*weight = workload / r.
      double worst = 0.0;
      for (const auto& s : res.snapshots) {
        double from_atoms = 0.0;
        for (const auto& a : s.atoms) from_atoms += a.location * a.weight;
        worst = std::max(worst, std::fabs(from_atoms - s.scaled_workload));
      }
      ExperimentReport r;
      r.name = "srpt conservation r=" + fmt(r_val);
      r.parameters = "horizon=" + fmt(cfg.horizon_scaled) + " events=" +
                     fmt(static_cast<double>(res.arrivals + res.departures));
      r.kind = CheckKind::AbsoluteError;
      r.z_score = worst;
      r.threshold = 1e-9;
      r.pass = flow && worst <= 1e-9;
      r.note = flow ? "flow balance exact" : "flow balance violated";
      r.runtime_seconds = seconds_since(t0);
      out.push_back(std::move(r));
    }

    {
      std::vector<double> w;
      for (const auto& s : res.snapshots) w.push_back(s.scaled_workload);
      const double rate =
          2.0 * cfg.kappa / (sp.sigma_tilde() * sp.sigma_tilde());
      const double ks = ks_statistic(w, [&](double x) {
        return x < 0.0 ? 0.0 : -std::expm1(-rate * x);
      });
      ks_by_r.push_back(ks);
      ExperimentReport r;
      r.name = "srpt workload ks r=" + fmt(r_val);
      r.parameters = "samples=" + fmt(static_cast<double>(w.size())) +
                     " rate=" + fmt(rate);
      r.kind = CheckKind::KsStatistic;
      r.mc_estimate = ks;
      r.z_score = ks;
      r.threshold = 1.0;  // judged by the cross-r trend below
      r.pass = true;
      out.push_back(std::move(r));
    }

    {
      LittlesConfig lc;
      lc.horizon_scaled = cfg.horizon_scaled;
      lc.warmup_fraction = cfg.warmup_fraction;
      lc.batches = cfg.batches;
      lc.seed = cfg.seed + 1;
      const auto row = littles_law_stats(sp, lc);
      ratio_by_r.push_back(row.ratio_to_analytic);
      ExperimentReport r;
      r.name = "littles law r=" + fmt(r_val);
      r.parameters =
          "completed=" + fmt(static_cast<double>(row.completed_jobs));
      r.kind = CheckKind::Trend;
      r.analytic_value = row.rhs_analytic;
      r.mc_estimate = row.lhs;
      r.stderr_est = row.mean_response_stderr * sp.c_r() / sp.r;
      r.z_score = row.ratio_to_analytic;
      r.threshold = 1.0;
      r.pass = true;  // judged by the cross-r trend below
      r.note = std::string("ratio=") + fmt(row.ratio_to_analytic) +
               (row.warmup_sufficient ? ""
                                      : "; warning: warm-up < 10 busy cycles");
      out.push_back(std::move(r));
    }
  }

  {
    bool mono = true;
    for (std::size_t i = 0; i + 1 < ks_by_r.size(); ++i)
      mono = mono && ks_by_r[i + 1] <= ks_by_r[i];
    ExperimentReport r;
    r.name = "srpt workload ks nonincreasing in r";
    std::ostringstream ps;
    for (double k : ks_by_r) ps << fmt(k) << " ";
    r.parameters = ps.str();
    r.kind = CheckKind::Trend;
    r.pass = mono;
    out.push_back(std::move(r));
  }
  {
    const double first = std::fabs(ratio_by_r.front() - 1.0);
    const double last = std::fabs(ratio_by_r.back() - 1.0);
    ExperimentReport r;
    r.name = "littles ratio approaches 1";
    std::ostringstream ps;
    for (double v : ratio_by_r) ps << fmt(v) << " ";
    r.parameters = ps.str();
    r.kind = CheckKind::Trend;
    r.mc_estimate = last;
    r.analytic_value = first;
    r.pass = last < first;
    out.push_back(std::move(r));
  }

  {
    const auto t0 = clock_type::now();
    Rng rng(cfg.seed, 77, 0);
    ParetoService service{cfg.p + 1.0, cfg.x_m};
    std::size_t ok = 0;
    for (std::size_t trace = 0; trace < cfg.dominance_traces; ++trace) {
      std::vector<double> at, sz;
      double t = 0.0;
      for (std::size_t j = 0; j < cfg.dominance_jobs; ++j) {
        t += rng.exponential(0.9 / service.mean());
        at.push_back(t);
        sz.push_back(service.sample(rng.uniform_open()));
      }
      if (srpt_dominates_fifo(at, sz)) ++ok;
    }
    ExperimentReport r;
    r.name = "srpt dominates fifo";
    r.parameters = "traces=" + fmt(static_cast<double>(cfg.dominance_traces));
    r.kind = CheckKind::AbsoluteError;
    r.mc_estimate = static_cast<double>(ok);
    r.analytic_value = static_cast<double>(cfg.dominance_traces);
    r.z_score = static_cast<double>(cfg.dominance_traces - ok);
    r.threshold = 0.0;
    r.pass = ok == cfg.dominance_traces;
    r.runtime_seconds = seconds_since(t0);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExperimentReport> recurrence_check(const DriftSpec& spec,
                                               const RecurrenceCheckConfig& cfg) {
  std::vector<ExperimentReport> out;
  const auto init = InitialCondition::ramp(cfg.ramp_height, cfg.ramp_scale);
  const auto t0 = clock_type::now();

  std::vector<double> times;
  MaxSimOptions opt;
  opt.dt = cfg.dt;
  opt.bridge = true;
  opt.seed = cfg.seed;
  for (std::size_t i = 0; i < cfg.n_paths_median; ++i) {
    opt.replicate = i;
    const auto t = detect_coupling_time(spec, init, cfg.t_cap, opt);
    if (t.has_value()) times.push_back(*t);
  }
  std::sort(times.begin(), times.end());
  const double median = times.empty() ? cfg.t_cap : times[times.size() / 2];

  const double horizon = 10.0 * median;
  const double frac = mc_recurrence_check(spec, init, horizon, cfg.dt,
                                          cfg.n_paths_fraction, cfg.seed + 1);
  ExperimentReport r;
  r.name = "recurrence fraction at 10x median coupling time";
  r.parameters = spec.describe() + " ramp(c=" + fmt(cfg.ramp_height) +
                 ", scale=" + fmt(cfg.ramp_scale) + ") horizon=" + fmt(horizon);
  r.kind = CheckKind::AbsoluteError;
  r.analytic_value = 1.0;
  r.mc_estimate = frac;
  r.z_score = frac;
  r.threshold = cfg.fraction_threshold;
  r.pass = frac > cfg.fraction_threshold;
  r.note = "median coupling time " + fmt(median);
  r.runtime_seconds = seconds_since(t0);
  out.push_back(std::move(r));
  return out;
}

std::vector<ExperimentReport> special_function_check() {
  std::vector<ExperimentReport> out;
  auto push = [&](const std::string& name, double worst, double tol) {
    ExperimentReport r;
    r.name = name;
    r.kind = CheckKind::AbsoluteError;
    r.z_score = worst;
    r.threshold = tol;
    r.pass = worst < tol;
    out.push_back(std::move(r));
  };

  {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double x = -8.0 + 16.0 * i / 999.0;
      worst = std::max(
          worst, std::fabs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0));
    }
    push("normal cdf symmetry", worst, 1e-14);
  }
  {
    double worst = 0.0;
    const double h = 1e-5;
    for (int i = 0; i <= 200; ++i) {
      const double x = -5.0 + 10.0 * i / 200.0;
      const double deriv =
          (std_normal_cdf(x + h) - std_normal_cdf(x - h)) / (2.0 * h);
      worst = std::max(worst, std::fabs(deriv - std_normal_pdf(x)));
    }
    push("normal cdf derivative matches density", worst, 1e-8);
  }
  {
    Rng rng(123, 0, 0);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const double x = 0.01 + 5.0 * rng.uniform();
      const double y = 0.01 + 5.0 * rng.uniform();
      worst = std::max(
          worst, std::fabs(beta_fn(x, y + 1.0) - beta_fn(x, y) * y / (x + y)));
    }
    push("beta recurrence", worst, 1e-12);
  }
  {
    double worst = 0.0;
    for (int i = 1; i < 20; ++i) {
      const double x = i / 20.0;
      const double target = M_PI / std::sin(M_PI * x);
      worst =
          std::max(worst, std::fabs(beta_fn(x, 1.0 - x) - target) / target);
    }
    push("beta reflection identity", worst, 1e-10);
  }
  push("normal cdf reference value",
       std::fabs(std_normal_cdf(1.0) - 0.8413447460685429), 1e-15);
  push("normal pdf reference value",
       std::fabs(std_normal_pdf(3.0) - 0.0044318484119380075), 1e-17);
  return out;
}

} // namespace rcbm
