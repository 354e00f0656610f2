#include "rcbm/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rcbm/analytic.hpp"
#include "rcbm/bm_sim.hpp"
#include "rcbm/parallel.hpp"
#include "rcbm/quadrature.hpp"
#include "rcbm/special.hpp"
#include "rcbm/stats.hpp"

namespace rcbm {

namespace {

// Integral of g/x^2 over one grid panel, trapezoid in log coordinates:
// int g(x)/x^2 dx = int g(e^y) e^{-y} dy.
double panel_mass(const std::vector<double>& a, const std::vector<double>& g,
                  std::size_t i) {
  const double dy = std::log(a[i + 1] / a[i]);
  return 0.5 * dy * (g[i] / a[i] + g[i + 1] / a[i + 1]);
}

// Power-law fit g ~ C x^s through the first two grid values gives the mass
// of (0, a_front] in closed form when s > 1.
double left_tail_mass(const std::vector<double>& a,
                      const std::vector<double>& g) {
  if (!(g[0] > 0.0) || !(g[1] > g[0])) return 0.0;
  const double s = std::log(g[1] / g[0]) / std::log(a[1] / a[0]);
  if (!(s > 1.0 + 1e-9))
    throw std::domain_error(
        "field_to_measure: field grows too slowly near 0 for a finite measure");
  return g[0] / (a[0] * (s - 1.0));
}

} // namespace

MeasureSnapshot field_to_measure(const std::vector<double>& a_grid,
                                 const std::vector<double>& g_in,
                                 const std::vector<double>& a_eval,
                                 const FieldToMeasureOptions& opt) {
  if (a_grid.size() != g_in.size() || a_grid.size() < 2)
    throw std::invalid_argument("field_to_measure: bad grid");
  // Reject genuine decreases; rounding-level dips (fields assembled from
  // differences of large terms) are repaired by the running maximum.
  std::vector<double> g = g_in;
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    if (!(a_grid[i] > 0.0) || (i > 0 && !(a_grid[i] > a_grid[i - 1])))
      throw std::invalid_argument("field_to_measure: grid must be positive increasing");
    if (!(g[i] >= 0.0) ||
        (i > 0 && g[i] < g[i - 1] - 1e-9 * std::max(1.0, g[i - 1])))
      throw std::invalid_argument("field_to_measure: field must be nonnegative nondecreasing");
    if (i > 0 && g[i] < g[i - 1]) g[i] = g[i - 1];
  }

  const double left =
      opt.left_tail_override >= 0.0 ? opt.left_tail_override : left_tail_mass(a_grid, g);
  const double g_inf = opt.g_inf_override >= 0.0 ? opt.g_inf_override : g.back();

  // Cumulative mass of (0, a_grid[i]] at every grid point.
  std::vector<double> cum(a_grid.size(), left);
  for (std::size_t i = 1; i < a_grid.size(); ++i)
    cum[i] = cum[i - 1] + panel_mass(a_grid, g, i - 1);

  MeasureSnapshot snap;
  snap.a_eval = a_eval;
  snap.cdf_values.resize(a_eval.size());
  for (std::size_t k = 0; k < a_eval.size(); ++k) {
    const double a = a_eval[k];
    if (!(a > 0.0)) {
      snap.cdf_values[k] = 0.0;  // the measure has no atom at zero
      continue;
    }
    const double aa = std::min(std::max(a, a_grid.front()), a_grid.back());
    // Interpolate the cumulative integral and the boundary value.
    std::size_t lo = 0, hi = a_grid.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (a_grid[mid] <= aa ? lo : hi) = mid;
    }
    const double t = (std::log(aa) - std::log(a_grid[lo])) /
                     (std::log(a_grid[hi]) - std::log(a_grid[lo]));
    const double integral = cum[lo] + t * (cum[hi] - cum[lo]);
    const double g_at = g[lo] + t * (g[hi] - g[lo]);
    snap.cdf_values[k] = integral + g_at / aa;
  }
  snap.total_mass = cum.back() + g_inf / a_grid.back();
  return snap;
}

double srpt_queue_mean(double kappa, double lambda, double p, double sigma) {
  if (!(p > 1.0)) throw std::domain_error("srpt_queue_mean: p must exceed 1");
  if (!(kappa > 0.0) || !(lambda > 0.0) || !(sigma > 0.0))
    throw std::domain_error("srpt_queue_mean: parameters must be positive");
  const double s2 = sigma * sigma;
  return s2 / (2.0 * kappa) * std::pow(kappa / lambda, 1.0 / p) * (M_PI / p) /
         std::sin(M_PI / p);
}

double srpt_queue_variance(double kappa, double lambda, double p,
                           double sigma) {
  if (!(p > 1.0)) throw std::domain_error("srpt_queue_variance: p must exceed 1");
  if (!(kappa > 0.0) || !(lambda > 0.0) || !(sigma > 0.0))
    throw std::domain_error("srpt_queue_variance: parameters must be positive");
  const double s4 = sigma * sigma * sigma * sigma;
  if (p == 2.0) return 5.0 * s4 / (12.0 * kappa * lambda);
  return s4 / (4.0 * kappa * kappa) * std::pow(kappa / lambda, 2.0 / p) *
         ((p * p + 2.0 * p + 2.0) / (p * p * (p + 1.0))) *
         ((M_PI / p) / std::sin(M_PI / p)) * ((p - 2.0) / std::cos(M_PI / p));
}

double srpt_queue_variance_beta_form(double kappa, double lambda, double p,
                                     double sigma) {
  if (!(p > 1.0) || p == 2.0)
    throw std::domain_error("variance_beta_form: p must exceed 1, p != 2");
  const double s4 = sigma * sigma * sigma * sigma;
  return s4 / (4.0 * kappa * kappa) * std::pow(kappa / lambda, 2.0 / p) *
         (2.0 * (p * p + 2.0 * p + 2.0) * (p - 2.0) / (p * p * p * (p + 1.0))) *
         M_PI / std::sin(2.0 * M_PI / p);
}

double srpt_cov_increment(double a1, double a2, double kappa, double lambda,
                          double p, double sigma) {
  if (!(a1 > 0.0) || !(a2 > a1))
    throw std::domain_error("srpt_cov_increment: need 0 < a1 < a2");
  const double s4 = sigma * sigma * sigma * sigma;
  const double a1p = std::pow(a1, p);
  const double denom = kappa * a1p + lambda;
  const double ratio = std::isinf(a2) ? 0.0 : a1p / std::pow(a2, p);
  return s4 * lambda * a1p * a1p / (4.0 * denom * denom * denom) *
         (1.0 - ratio);
}

namespace {

// Shared setup of the log-spaced size grid, the horizon rule at the slowest
// column, and the analytic tail means outside the grid.
struct StationaryGrid {
  std::vector<double> a, nu, zeros;
  double horizon = 0.0;
  double left_tail = 0.0;
  double right_tail = 0.0;
  FieldToMeasureOptions fopt;
};

StationaryGrid make_stationary_grid(const DriftSpec& spec,
                                    const QueueMcOptions& opt) {
  if (spec.kind() != DriftKind::Srpt)
    throw std::invalid_argument("queue moments: SRPT drift required");
  StationaryGrid g;
  const double scale = spec.natural_scale();
  const double a_min = 1e-3 * scale;
  const double a_max = 1e3 * scale;
  const std::size_t m = opt.grid_points;
  g.a.resize(m);
  g.nu.resize(m);
  g.zeros.assign(m, 0.0);
  const double ly0 = std::log(a_min), ly1 = std::log(a_max);
  for (std::size_t j = 0; j < m; ++j) {
    g.a[j] = std::exp(ly0 + (ly1 - ly0) * static_cast<double>(j) /
                                static_cast<double>(m - 1));
    g.nu[j] = spec.mu_at(g.a[j]);
  }
  g.horizon = horizon_for_cdf_gap(g.nu.back(), spec.sigma(), opt.cdf_gap);
  const double s2 = spec.sigma() * spec.sigma();
  const auto mean_density = [&](double x) {
    return 0.5 * s2 / (spec.mu_at(x) * x * x);
  };
  g.left_tail =
      integrate_adaptive(mean_density, a_min * 1e-6, a_min, 1e-12, 1e-10).value;
  g.right_tail = 0.5 * s2 / (spec.mu_inf() * a_max);
  g.fopt.left_tail_override = g.left_tail;
  g.fopt.g_inf_override = 0.0;  // right tail handled by the analytic term
  return g;
}

} // namespace

QueueMomentsEstimate mc_queue_moments(const DriftSpec& spec,
                                      const QueueMcOptions& opt) {
  if (opt.replicates < 2)
    throw std::invalid_argument("mc_queue_moments: need >= 2 replicates");
  const StationaryGrid grid = make_stationary_grid(spec, opt);
  const auto& a = grid.a;
  const auto& nu = grid.nu;
  const auto& zeros = grid.zeros;
  const double horizon = grid.horizon;
  const double left_tail = grid.left_tail;
  const double right_tail = grid.right_tail;
  const FieldToMeasureOptions& fopt = grid.fopt;

  std::vector<double> totals(opt.replicates);
  parallel_replicates<int>(
      opt.replicates, resolve_threads(opt.threads),
      [&](int&, std::size_t rep) {
        MaxSimOptions sim;
        sim.dt = opt.dt;
        sim.bridge = opt.bridge;
        sim.seed = opt.seed;
        sim.replicate = rep;
        std::vector<double> field =
            simulate_coupled_maxima(nu, zeros, spec.sigma(), horizon, sim);
        // Monotone by construction; smooth out ulp noise from the huge
        // drift terms in the steep columns.
        for (std::size_t j = 1; j < field.size(); ++j)
          field[j] = std::max(field[j], field[j - 1]);
        const MeasureSnapshot snap = field_to_measure(a, field, {}, fopt);
        totals[rep] = snap.total_mass + right_tail;
      });

  MeanVar acc;
  for (double z : totals) acc.add(z);
  const double mean = acc.mean();
  const double var = acc.variance();
  double m4 = 0.0;
  for (double z : totals) {
    const double d = z - mean;
    m4 += d * d * d * d;
  }
  m4 /= static_cast<double>(totals.size());

  QueueMomentsEstimate out;
  out.mean = mean;
  out.mean_stderr = acc.stderr_mean();
  out.variance = var;
  // Asymptotic stderr of the sample variance: sqrt((m4 - s^4) / n).
  out.variance_stderr =
      std::sqrt(std::max(0.0, m4 - var * var) / static_cast<double>(totals.size()));
  out.replicates = acc.count();
  out.horizon = horizon;
  out.left_tail_mean = left_tail;
  out.right_tail_mean = right_tail;
  return out;
}

TotalMassEstimate mc_total_mass_at_horizon(const DriftSpec& spec,
                                           const QueueMcOptions& opt) {
  if (opt.replicates < 2)
    throw std::invalid_argument("mc_total_mass: need >= 2 replicates");
  const StationaryGrid grid = make_stationary_grid(spec, opt);
  std::vector<double> totals(opt.replicates);
  parallel_replicates<int>(
      opt.replicates, resolve_threads(opt.threads), [&](int&, std::size_t rep) {
        MaxSimOptions sim;
        sim.dt = opt.dt;
        sim.bridge = opt.bridge;
        sim.seed = opt.seed;
        sim.replicate = rep;
        std::vector<double> field = simulate_reflected_at(
            grid.nu, grid.zeros, spec.sigma(), grid.horizon, sim);
        for (std::size_t j = 1; j < field.size(); ++j)
          field[j] = std::max(field[j], field[j - 1]);
        const MeasureSnapshot snap =
            field_to_measure(grid.a, field, {}, grid.fopt);
        totals[rep] = snap.total_mass + grid.right_tail;
      });
  MeanVar acc;
  for (double z : totals) acc.add(z);
  return {acc.mean(), acc.stderr_mean(), acc.count(), grid.horizon};
}

} // namespace rcbm
