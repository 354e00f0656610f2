#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "rcbm/analytic.hpp"
#include "rcbm/quadrature.hpp"
#include "rcbm/rng.hpp"
#include "rcbm/validate.hpp"

using namespace rcbm;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("running max cdf pins and conventions") {
  CHECK(running_max_cdf(1.0, 1.0, 0.0, 1.0) ==
        doctest::Approx(0.6826894921370859).epsilon(1e-12));
  CHECK(running_max_cdf(0.0, 1.0, 1.0, 1.0) == 0.0);
  CHECK(running_max_cdf(0.5, 0.0, 1.0, 1.0) == 1.0);
  CHECK(running_max_cdf(1.0, kInf, 1.0, 1.0) ==
        doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
  CHECK(running_max_cdf(1.0, kInf, -0.5, 1.0) == 0.0);
  CHECK_THROWS_AS((void)running_max_cdf(-0.1, 1.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("running max cdf monotone in t and x") {
  double prev = 1.0;
  for (double t : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
    const double v = running_max_cdf(0.7, t, 1.3, 0.9);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  prev = 0.0;
  for (double x : {0.0, 0.2, 0.5, 1.0, 2.0, 5.0}) {
    const double v = running_max_cdf(x, 2.0, 1.3, 0.9);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("running max cdf survives extreme drift-level products") {
  // The naive product exp(-2 nu x) * Phi(...) overflows/underflows; the
  // log-space guard must keep the value in [0, 1] and monotone.
  const double v = running_max_cdf(50.0, 1.0, 30.0, 1.0);
  CHECK(v >= 0.0);
  CHECK(v <= 1.0);
  CHECK(running_max_cdf(400.0, 2.0, 500.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("stationary law pins") {
  CHECK(stationary_max_cdf(0.5, 1.0, 1.0) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(stationary_max_cdf(0.0, 1.0, 1.0) == 0.0);
  CHECK(stationary_max_cdf(7.0, 0.0, 1.0) == 0.0);  // degenerate at mu = 0
}

TEST_CASE("stationary moments") {
  CHECK(stationary_max_moment(1.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(stationary_max_moment(1.0, 2.0, 1.0) == doctest::Approx(0.5).epsilon(1e-13));
  const double g45 = 3.5 * 2.5 * 1.5 * 0.5 * std::sqrt(M_PI);
  CHECK(stationary_max_moment(2.0, 3.5, 1.0) ==
        doctest::Approx(g45 / 128.0).epsilon(1e-12));
  CHECK_THROWS_AS((void)stationary_max_moment(0.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("two-point law reductions") {
  // Redundant smaller constraint collapses to the one-dimensional law.
  TwoPoint eq{2.0, 1.0, 1.0, 1.0, 1.0};
  CHECK(joint_cdf_2d(eq) == doctest::Approx(stationary_max_cdf(1.0, 1.0, 1.0)));
  // Degenerate slower coordinate: the joint probability vanishes.
  TwoPoint d{2.0, 0.0, 0.5, 1.0, 1.0};
  CHECK(joint_cdf_2d(d) == doctest::Approx(0.0));
}

TEST_CASE("two-point law Frechet bound and marginalization") {
  Rng rng(3, 0, 0);
  for (int i = 0; i < 500; ++i) {
    const double nu2 = 0.2 + 2.0 * rng.uniform();
    const double nu1 = nu2 + 0.1 + 2.0 * rng.uniform();
    const double x1 = 0.05 + 1.5 * rng.uniform();
    const double x2 = x1 + 0.05 + 1.5 * rng.uniform();
    const double sigma = 0.7 + rng.uniform();
    TwoPoint tp{nu1, nu2, x1, x2, sigma};
    const double j = joint_cdf_2d(tp);
    const double m1 = stationary_max_cdf(x1, nu1, sigma);
    const double m2 = stationary_max_cdf(x2, nu2, sigma);
    CHECK(j <= std::min(m1, m2) + 1e-12);
    CHECK(j >= 0.0);
  }
  // x2 -> infinity recovers the first marginal.
  TwoPoint tp{2.0, 1.0, 0.5, 0.0, 1.0};
  tp.x2 = 50.0 * tp.sigma * tp.sigma / (2.0 * tp.nu2);
  CHECK(joint_cdf_2d(tp) ==
        doctest::Approx(stationary_max_cdf(0.5, 2.0, 1.0)).epsilon(1e-10));
}

TEST_CASE("joint density g is nonnegative and vanishes off the quadrant") {
  CHECK(joint_density_g(0.5, -0.1, 2.0, 1.0, 1.0) == 0.0);
  CHECK(joint_density_g(-0.5, 0.1, 2.0, 1.0, 1.0) == 0.0);
  Rng rng(13, 0, 0);
  for (int i = 0; i < 5000; ++i) {
    const double delta = 0.2 + 1.5 * rng.uniform();
    const double nu1 = delta + 0.1 + 2.0 * rng.uniform();
    const double x = 0.01 + 4.0 * rng.uniform();
    const double z = 0.01 + 4.0 * rng.uniform();
    CHECK(joint_density_g(x, z, nu1, delta, 0.8 + rng.uniform()) >= 0.0);
  }
}

TEST_CASE("joint density h equals the mixed derivative of the cdf") {
  const double nu1 = 2.0, nu2 = 1.0, sigma = 1.0, h = 1e-4;
  for (double x1 : {0.3, 0.6, 1.0})
    for (double dz : {0.4, 0.8}) {
      const double x2 = x1 + dz;
      auto F = [&](double a, double b) {
        return joint_cdf_2d(TwoPoint{nu1, nu2, a, b, sigma});
      };
      const double mixed = (F(x1 + h, x2 + h) - F(x1 + h, x2 - h) -
                            F(x1 - h, x2 + h) + F(x1 - h, x2 - h)) /
                           (4.0 * h * h);
      const double dens = joint_density_h(x1, x2, nu1, nu2, sigma);
      CHECK(mixed == doctest::Approx(dens).epsilon(1e-4));
    }
}

TEST_CASE("covariance and correlation pins") {
  CHECK(covariance_max(2.0, 1.0, 1.0) == doctest::Approx(0.09375).epsilon(1e-15));
  CHECK(correlation_max(2.0, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  // Continuity toward the marginal variance as the drifts merge.
  CHECK(covariance_max(1.0 + 1e-9, 1.0, 1.0) ==
        doctest::Approx(0.25).epsilon(1e-6));
  CHECK(correlation_max(1.0 + 1e-9, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
  // Drift ratio to zero kills the correlation.
  CHECK(correlation_max(1e6, 1.0) < 3e-6);
  CHECK_THROWS_AS((void)covariance_max(2.0, 0.0, 1.0), std::domain_error);
}

TEST_CASE("drift-tilt identity of the barrier density") {
  const auto rep = kernel_identity_check(10000, 99);
  CHECK(rep.pass);
  CHECK(rep.z_score < 1e-12);
}

TEST_CASE("barrier density integrates to the running-max cdf") {
  for (double nu : {-0.5, 0.8, 2.0}) {
    const double x = 0.9, t = 1.7, sigma = 1.1;
    const auto got = integrate_adaptive(
        [&](double u) { return max_barrier_density(u, x, t, nu, sigma); },
        x - 14.0 * sigma * std::sqrt(t) - std::fabs(nu) * t, x, 1e-12, 1e-12);
    CHECK(got.value ==
          doctest::Approx(running_max_cdf(x, t, nu, sigma)).epsilon(1e-9));
  }
}

TEST_CASE("horizon rule brackets the cdf gap") {
  const double mu = 2.0, sigma = 1.0, gap = 1e-3;
  const double tstar = horizon_for_cdf_gap(mu, sigma, gap);
  auto sup_gap = [&](double t) {
    double worst = 0.0;
    for (int i = 1; i < 400; ++i) {
      const double x = i * 0.01;
      worst = std::max(worst, running_max_cdf(x, t, mu, sigma) -
                                  stationary_max_cdf(x, mu, sigma));
    }
    return worst;
  };
  CHECK(sup_gap(tstar) < gap);
  CHECK(sup_gap(0.5 * tstar) > gap);
}

TEST_CASE("conditional law identity validated by Monte Carlo") {
  // Small-n spot check of the conditional identity; the acceptance suite
  // repeats it on a full grid at a million paths.
  Law2dConfig cfg;
  cfg.x1_values = {0.5};
  cfg.x2_offsets = {0.5};
  cfg.n_paths = 50000;
  cfg.dt = 1e-3;
  cfg.seed = 21;
  const auto reports = law_2d_grid(cfg);
  REQUIRE(reports.size() == 2);
  for (const auto& r : reports) {
    INFO(report_line(r));
    CHECK(std::fabs(r.z_score) <= 3.0);
  }
}
