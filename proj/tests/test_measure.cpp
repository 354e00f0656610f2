#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rcbm/analytic.hpp"
#include "rcbm/measure.hpp"
#include "rcbm/quadrature.hpp"
#include "rcbm/rng.hpp"
#include "rcbm/stats.hpp"

using namespace rcbm;

namespace {

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = std::exp(std::log(lo) +
                    (std::log(hi) - std::log(lo)) * static_cast<double>(i) /
                        static_cast<double>(n - 1));
  return g;
}

} // namespace

TEST_CASE("field_to_measure on synthetic fields") {
  {
    const auto grid = log_grid(1e-4, 10.0, 400);
    std::vector<double> zeros(grid.size(), 0.0);
    const auto snap = field_to_measure(grid, zeros, {0.5, 1.0, 5.0});
    for (double v : snap.cdf_values) CHECK(v == 0.0);
    CHECK(snap.total_mass == 0.0);
  }
  {
    // g(x) = x^2: measure of [0, a] is a + a = 2a for a <= 1.
    const auto grid = log_grid(1e-6, 1.0, 4000);
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = grid[i] * grid[i];
    const auto snap = field_to_measure(grid, vals, {0.25, 0.5, 1.0});
    CHECK(snap.cdf_values[0] == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(snap.cdf_values[1] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(snap.cdf_values[2] == doctest::Approx(2.0).epsilon(1e-5));
  }
  {
    // g(x) = min(x^2, 1): total mass 2, exactly computable.
    const auto grid = log_grid(1e-3, 1e3, 12001);
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      vals[i] = std::min(grid[i] * grid[i], 1.0);
    const auto snap = field_to_measure(grid, vals, {});
    CHECK(std::fabs(snap.total_mass - 2.0) < 1e-6);
  }
}

TEST_CASE("field_to_measure output is a valid cdf-like object") {
  const auto grid = log_grid(1e-3, 1e2, 500);
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    vals[i] = grid[i] * (1.0 - std::exp(-grid[i]));  // ~x^2 near 0
  std::vector<double> evals = log_grid(1e-2, 50.0, 40);
  const auto snap = field_to_measure(grid, vals, evals);
  double prev = 0.0;
  for (double v : snap.cdf_values) {
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("field_to_measure rejects bad fields") {
  const auto grid = log_grid(1e-2, 1.0, 50);
  std::vector<double> down(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    down[i] = 1.0 / (1.0 + grid[i]);
  CHECK_THROWS_AS((void)field_to_measure(grid, down, {}), std::invalid_argument);
  std::vector<double> neg(grid.size(), -1.0);
  CHECK_THROWS_AS((void)field_to_measure(grid, neg, {}), std::invalid_argument);
}

TEST_CASE("queue mean pins and scaling") {
  CHECK(srpt_queue_mean(1, 1, 2, 1) == doctest::Approx(M_PI / 4.0).epsilon(1e-14));
  // E scales as kappa^{1/p - 1}: quadrupling kappa at p = 2 halves the mean.
  CHECK(srpt_queue_mean(4, 1, 2, 1) ==
        doctest::Approx(0.5 * srpt_queue_mean(1, 1, 2, 1)).epsilon(1e-12));
  CHECK((1.01 - 1.0) * srpt_queue_mean(1, 1, 1.01, 1) ==
        doctest::Approx(0.5).epsilon(0.03));
  CHECK(srpt_queue_mean(1, 1, 1e6, 1) == doctest::Approx(0.5).epsilon(1e-4));
  CHECK_THROWS_AS((void)srpt_queue_mean(1, 1, 1.0, 1), std::domain_error);
}

TEST_CASE("queue mean equals the quadrature of the drift mass integral") {
  // (sigma^2/2) int 1/(x^2 mu(x)) dx, evaluated through two regularized
  // unit-interval integrals (substitutions s = u^{1/(p-1)} and s = 1/v).
  for (double p : {1.5, 2.0, 3.0}) {
    for (double kappa : {0.7, 1.0}) {
      const double lambda = 1.3, sigma = 0.9;
      const double factor = std::pow(lambda / kappa, (p - 1.0) / p) / lambda;
      auto left = integrate_adaptive(
          [&](double u) {
            return 1.0 / ((p - 1.0) * (std::pow(u, p / (p - 1.0)) + 1.0));
          },
          0.0, 1.0, 1e-12, 1e-12);
      auto right = integrate_adaptive(
          [&](double v) { return 1.0 / (1.0 + std::pow(v, p)); }, 0.0, 1.0,
          1e-12, 1e-12);
      // int_0^inf a^{p-2}/(kappa a^p + lambda) da after a = (lambda/kappa)^{1/p} s
      const double integral = (left.value + right.value) * factor;
      const double expect = sigma * sigma / 2.0 * integral;
      CHECK(srpt_queue_mean(kappa, lambda, p, sigma) ==
            doctest::Approx(expect).epsilon(1e-8));
    }
  }
}

TEST_CASE("queue variance pins, branches and limits") {
  CHECK(srpt_queue_variance(1, 1, 2, 1) ==
        doctest::Approx(5.0 / 12.0).epsilon(1e-14));
  // Continuity probe across the p = 2 branch.
  CHECK(srpt_queue_variance(1, 1, 1.9, 1) ==
        doctest::Approx(5.0 / 12.0).epsilon(0.10));
  CHECK(srpt_queue_variance(1, 1, 2.1, 1) ==
        doctest::Approx(5.0 / 12.0).epsilon(0.10));
  // The two printed product forms agree.
  for (double p : {1.3, 1.9, 2.1, 3.0, 7.0}) {
    CHECK(srpt_queue_variance(1, 1, p, 1) ==
          doctest::Approx(srpt_queue_variance_beta_form(1, 1, p, 1))
              .epsilon(1e-10));
  }
  CHECK((1.001 - 1.0) * srpt_queue_variance(1, 1, 1.001, 1) ==
        doctest::Approx(5.0 / 8.0).epsilon(0.01));
  // Mean and standard deviation differ: the total mass is not exponential.
  CHECK(std::fabs(srpt_queue_mean(1, 1, 2, 1) -
                  std::sqrt(srpt_queue_variance(1, 1, 2, 1))) > 0.1);
}

TEST_CASE("covariance increment of the srpt maxima") {
  const double kappa = 1.0, lambda = 1.0, p = 2.0, sigma = 1.0;
  // Consistency with the two-point covariance minus the marginal variance.
  for (double a1 : {0.5, 1.0, 2.0}) {
    const double a2 = a1 * 2.5;
    const auto spec = DriftSpec::srpt(sigma, kappa, lambda, p);
    const double nu1 = spec.mu_at(a1), nu2 = spec.mu_at(a2);
    const double expected = covariance_max(nu1, nu2, sigma) -
                            sigma * sigma * sigma * sigma / (4.0 * nu1 * nu1);
    CHECK(srpt_cov_increment(a1, a2, kappa, lambda, p, sigma) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  // a2 -> a1 kills the increment; a2 = inf drops the ratio term.
  CHECK(srpt_cov_increment(1.0, 1.0 + 1e-12, kappa, lambda, p, sigma) ==
        doctest::Approx(0.0).epsilon(1e-9));
  const double at_inf = srpt_cov_increment(
      1.0, std::numeric_limits<double>::infinity(), kappa, lambda, p, sigma);
  CHECK(at_inf == doctest::Approx(1.0 / 32.0).epsilon(1e-12));
  // Finite-difference check of the derivative limit at a2 -> a1.
  const double a1 = 1.3, h = 1e-6;
  const double fd =
      srpt_cov_increment(a1, a1 + h, kappa, lambda, p, sigma) / h;
  const double a1p = std::pow(a1, p);
  const double denom = kappa * a1p + lambda;
  const double deriv = lambda * std::pow(a1, 2.0 * p - 1.0) * p /
                       (4.0 * denom * denom * denom);
  CHECK(fd == doctest::Approx(deriv).epsilon(1e-4));
}

TEST_CASE("mc queue moments on a small budget") {
  const auto spec = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0);
  QueueMcOptions opt;
  opt.replicates = 800;
  opt.seed = 14;
  const auto est = mc_queue_moments(spec, opt);
  CHECK(std::fabs(est.mean - M_PI / 4.0) < 4.0 * est.mean_stderr + 1e-3);
  CHECK(est.variance > 0.2);
  CHECK(est.variance < 0.55);
  CHECK(est.horizon > 1.0);
}

TEST_CASE("mean/variance accumulators merge associatively") {
  Rng rng(77, 0, 0);
  std::vector<double> xs(5000);
  for (auto& x : xs) x = std::exp(rng.normal_fast());
  MeanVar whole;
  for (double x : xs) whole.add(x);
  // Arbitrary chunking, merged in order and in reverse chunk order.
  for (std::size_t chunks : {2, 7, 50}) {
    std::vector<MeanVar> parts(chunks);
    for (std::size_t i = 0; i < xs.size(); ++i)
      parts[i % chunks].add(xs[i]);
    MeanVar fwd, rev;
    for (std::size_t c = 0; c < chunks; ++c) fwd.merge(parts[c]);
    for (std::size_t c = chunks; c-- > 0;) rev.merge(parts[c]);
    CHECK(fwd.count() == whole.count());
    CHECK(fwd.mean() == doctest::Approx(whole.mean()).epsilon(1e-13));
    CHECK(fwd.variance() == doctest::Approx(whole.variance()).epsilon(1e-12));
    CHECK(rev.mean() == doctest::Approx(fwd.mean()).epsilon(1e-14));
    CHECK(rev.variance() == doctest::Approx(fwd.variance()).epsilon(1e-13));
  }
}

TEST_CASE("mc queue moments do not depend on the worker count") {
  const auto spec = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0);
  QueueMcOptions a;
  a.replicates = 400;
  a.seed = 61;
  a.threads = 1;
  QueueMcOptions b = a;
  b.threads = 3;
  const auto ra = mc_queue_moments(spec, a);
  const auto rb = mc_queue_moments(spec, b);
  CHECK(ra.mean == doctest::Approx(rb.mean).epsilon(1e-13));
  CHECK(ra.variance == doctest::Approx(rb.variance).epsilon(1e-12));
}
