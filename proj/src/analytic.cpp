#include "rcbm/analytic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rcbm/special.hpp"

namespace rcbm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

double running_max_cdf(double x, double t, double nu, double sigma) {
  if (!(x >= 0.0)) throw std::domain_error("running_max_cdf: x must be >= 0");
  if (!(t >= 0.0)) throw std::domain_error("running_max_cdf: t must be >= 0");
  if (!(sigma > 0.0)) throw std::domain_error("running_max_cdf: sigma must be > 0");
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return nu > 0.0 ? stationary_max_cdf(x, nu, sigma) : 0.0;
  if (x == 0.0) return 0.0;
  const double sq = sigma * std::sqrt(t);
  const double first = std_normal_cdf((x + nu * t) / sq);
  // exp(-2 nu x / sigma^2) * Phi((-x + nu t)/ (sigma sqrt t)) recombined in
  // log space; the factors overflow/underflow separately for large nu x.
  const double log_second = -2.0 * nu * x / (sigma * sigma) +
                            log_std_normal_cdf((-x + nu * t) / sq);
  const double second = log_second < -745.0 ? 0.0 : std::exp(log_second);
  double v = first - second;
  if (v < 0.0) v = 0.0;
  if (v > 1.0) v = 1.0;
  return v;
}

double stationary_max_cdf(double x, double mu, double sigma) {
  if (!(x >= 0.0)) throw std::domain_error("stationary_max_cdf: x must be >= 0");
  if (!(mu >= 0.0)) throw std::domain_error("stationary_max_cdf: mu must be >= 0");
  if (mu == 0.0) return 0.0;  // the maximum is almost surely infinite
  return -std::expm1(-2.0 * mu * x / (sigma * sigma));
}

double stationary_max_cdf(const DriftSpec& spec, double a, double x) {
  return stationary_max_cdf(x, spec.mu_at(a), spec.sigma());
}

double stationary_max_moment(double mu, double gamma, double sigma) {
  if (!(mu > 0.0))
    throw std::domain_error("stationary_max_moment: mu must be > 0");
  if (!(gamma >= 0.0))
    throw std::domain_error("stationary_max_moment: gamma must be >= 0");
  return std::exp(log_gamma(gamma + 1.0) + 2.0 * gamma * std::log(sigma) -
                  gamma * std::log(2.0 * mu));
}

double stationary_max_moment(const DriftSpec& spec, double a, double gamma) {
  return stationary_max_moment(spec.mu_at(a), gamma, spec.sigma());
}

double joint_cdf_2d(const TwoPoint& tp) {
  if (!(tp.nu1 > tp.nu2) || !(tp.nu2 >= 0.0))
    throw std::domain_error("joint_cdf_2d: need nu1 > nu2 >= 0");
  if (!(tp.x1 >= 0.0) || !(tp.x2 >= 0.0))
    throw std::domain_error("joint_cdf_2d: levels must be >= 0");
  if (tp.x2 <= tp.x1)
    return stationary_max_cdf(tp.x2, tp.nu2, tp.sigma);  // redundant x1
  const double tau1 = tp.intersection_time();
  const double zeta1 = tp.nu1 - 2.0 * tp.nu2;
  const double first = running_max_cdf(tp.x1, tau1, tp.nu1, tp.sigma);
  const double weight =
      std::exp(-2.0 * tp.nu2 * tp.x2 / (tp.sigma * tp.sigma));
  const double second = running_max_cdf(tp.x1, tau1, zeta1, tp.sigma);
  double v = first - weight * second;
  return v < 0.0 ? 0.0 : v;
}

double joint_cdf_2d(const DriftSpec& spec, double a1, double a2, double x1,
                    double x2) {
  if (!(a1 < a2)) throw std::domain_error("joint_cdf_2d: need a1 < a2");
  TwoPoint tp;
  tp.nu1 = spec.mu_at(a1);
  tp.nu2 = spec.mu_at(a2);
  tp.x1 = x1;
  tp.x2 = x2;
  tp.sigma = spec.sigma();
  return joint_cdf_2d(tp);
}

double joint_density_g(double x, double z, double nu1, double delta1,
                       double sigma) {
  if (!(delta1 > 0.0) || !(delta1 < nu1))
    throw std::domain_error("joint_density_g: need 0 < delta1 < nu1");
  if (!(x > 0.0) || !(z > 0.0)) return 0.0;
  const double s2 = sigma * sigma;
  const double sdz = sigma * std::sqrt(delta1 * z);
  const double nu2 = nu1 - delta1;
  const double phi_term = std_normal_pdf((x * delta1 + nu1 * z) / sdz) * 2.0 *
                          nu2 * std::sqrt(delta1) * (x + 2.0 * z) /
                          (sigma * s2 * std::sqrt(z * z * z));
  const double expo = (-2.0 * delta1 * x - 2.0 * nu2 * z) / s2;
  const double arg = (-x * delta1 - (nu1 - 2.0 * delta1) * z) / sdz;
  // exp * Phi recombined in log space (both factors can be extreme).
  const double log_mag = expo + log_std_normal_cdf(arg);
  const double cdf_term =
      log_mag < -745.0
          ? 0.0
          : 4.0 * nu2 * (2.0 * delta1 - nu1) / (s2 * s2) * std::exp(log_mag);
  return phi_term + cdf_term;
}

double joint_density_h(double x1, double x2, double nu1, double nu2,
                       double sigma) {
  if (!(x2 > x1) || !(x1 >= 0.0)) return 0.0;
  return joint_density_g(x1, x2 - x1, nu1, nu1 - nu2, sigma);
}

double covariance_max(double nu1, double nu2, double sigma) {
  if (!(nu1 > nu2)) throw std::domain_error("covariance_max: need nu1 > nu2");
  if (!(nu2 > 0.0)) throw std::domain_error("covariance_max: need nu2 > 0");
  const double s2 = sigma * sigma;
  return s2 * s2 / (4.0 * nu1 * nu1) * (2.0 - nu2 / nu1);
}

double covariance_max(const DriftSpec& spec, double a1, double a2) {
  if (!(a1 < a2)) throw std::domain_error("covariance_max: need a1 < a2");
  return covariance_max(spec.mu_at(a1), spec.mu_at(a2), spec.sigma());
}

double correlation_max(double nu1, double nu2) {
  if (!(nu1 > nu2)) throw std::domain_error("correlation_max: need nu1 > nu2");
  if (!(nu2 > 0.0)) throw std::domain_error("correlation_max: need nu2 > 0");
  const double r = nu2 / nu1;
  return r * (2.0 - r);
}

double correlation_max(const DriftSpec& spec, double a1, double a2) {
  if (!(a1 < a2)) throw std::domain_error("correlation_max: need a1 < a2");
  return correlation_max(spec.mu_at(a1), spec.mu_at(a2));
}

double max_barrier_density(double u, double barrier, double t, double nu,
                           double sigma) {
  if (!(t > 0.0)) throw std::domain_error("max_barrier_density: t must be > 0");
  if (!(barrier >= 0.0))
    throw std::domain_error("max_barrier_density: barrier must be >= 0");
  if (u > barrier) return 0.0;
  const double s2t = sigma * sigma * t;
  // Completed-square form of the reflection decomposition: stable for any
  // sign of nu and deeply negative u.
  const double e1 = -(u + nu * t) * (u + nu * t) / (2.0 * s2t);
  const double e2 = -(u - 2.0 * barrier + nu * t) * (u - 2.0 * barrier + nu * t) /
                        (2.0 * s2t) -
                    2.0 * nu * barrier / (sigma * sigma);
  const double v = (std::exp(e1) - std::exp(e2)) /
                   (sigma * std::sqrt(2.0 * M_PI * t));
  return v < 0.0 ? 0.0 : v;
}

double horizon_for_cdf_gap(double mu, double sigma, double cdf_gap) {
  if (!(mu > 0.0)) throw std::domain_error("horizon_for_cdf_gap: mu must be > 0");
  if (!(cdf_gap > 0.0 && cdf_gap < 1.0))
    throw std::domain_error("horizon_for_cdf_gap: gap must be in (0,1)");
  // Quantiles of the stationary exponential law; the gap function
  // running_max_cdf(x,t) - stationary(x) is nonnegative and decreasing in t,
  // so doubling + bisection brackets the smallest admissible horizon.
  const double rate = 2.0 * mu / (sigma * sigma);
  std::vector<double> xs;
  for (double q = 0.004; q < 0.9995; q += 0.004)
    xs.push_back(-std::log1p(-q) / rate);
  xs.push_back(-std::log(cdf_gap * 0.1) / rate);  // deep tail probe
  // Bisect against a slightly tighter target so the scan-grid resolution
  // cannot push the true supremum past the requested gap.
  const double target = 0.97 * cdf_gap;
  auto gap = [&](double t) {
    double worst = 0.0;
    for (double x : xs) {
      const double d =
          running_max_cdf(x, t, mu, sigma) - stationary_max_cdf(x, mu, sigma);
      if (d > worst) worst = d;
    }
    return worst;
  };
  double hi = sigma * sigma / (mu * mu);  // diffusive time scale seed
  int guard = 0;
  while (gap(hi) >= target && guard++ < 64) hi *= 2.0;
  double lo = hi * 0.5;
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < target ? hi : lo) = mid;
  }
  return hi;
}

} // namespace rcbm
