#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "rcbm/drift.hpp"
#include "rcbm/quadrature.hpp"
#include "rcbm/rng.hpp"

using namespace rcbm;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("srpt drift evaluation") {
  const auto d = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0);
  CHECK(d.mu_at(1.0) == doctest::Approx(2.0));
  CHECK(d.mu_at(kInf) == 1.0);
  const auto d2 = DriftSpec::srpt(1.0, 2.0, 3.0, 1.5);
  CHECK(d2.mu_at(4.0) == doctest::Approx(2.375).epsilon(1e-15));
  CHECK_THROWS_AS((void)d.mu_at(0.0), std::domain_error);
  CHECK_THROWS_AS((void)DriftSpec::srpt(1.0, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)DriftSpec::srpt(1.0, 0.0, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("strict monotonicity fuzz") {
  const auto d = DriftSpec::srpt(1.0, 0.7, 2.0, 1.7);
  Rng rng(5, 0, 0);
  for (int i = 0; i < 10000; ++i) {
    const double a = std::exp(-6.0 + 12.0 * rng.uniform());
    const double b = a * (1.0 + rng.uniform_open());
    CHECK(d.mu_at(a) > d.mu_at(b));
  }
}

TEST_CASE("srpt power-law tail slope") {
  const auto d = DriftSpec::srpt(1.0, 1.3, 0.9, 1.8);
  // log-log slope of mu(a) - kappa must be -p.
  for (double a = 1e-3; a < 1e3; a *= 10.0) {
    const double s = std::log((d.mu_at(a) - 1.3) / (d.mu_at(2.0 * a) - 1.3)) /
                     std::log(0.5);
    CHECK(s == doctest::Approx(-1.8).epsilon(1e-6));
  }
}

TEST_CASE("mass integrability for the srpt family") {
  const auto d = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0);
  const auto rep = d.mass_integrability();
  CHECK(rep.holds);
  // Quadrature oracle: 1/(a^2 mu(a)) = 1/(a^2 + 1) integrates to pi/2.
  const auto oracle = integrate_to_infinity(
      [&](double a) { return 1.0 / (a * a * d.mu_at(a)); }, 1e-12, 1e-12,
      1e-12);
  CHECK(rep.value == doctest::Approx(M_PI / 2.0).epsilon(1e-12));
  CHECK(rep.value == doctest::Approx(oracle.value).epsilon(1e-9));
}

TEST_CASE("mass integrability power counting near zero") {
  // mu(a) = a^{-1/2}: the integrand is a^{-3/2} near zero, divergent.
  const auto d = DriftSpec::power_law(1.0, 0.0, 1.0, 0.5);
  CHECK_FALSE(d.mass_integrability().holds);
  // q > 1 with a positive floor converges.
  const auto d2 = DriftSpec::power_law(1.0, 0.5, 1.0, 1.5);
  CHECK(d2.mass_integrability().holds);
}

TEST_CASE("higher moment integrability matches the closed condition") {
  const auto p15 = DriftSpec::srpt(1.0, 1.0, 1.0, 1.5);
  CHECK(p15.higher_moment_integrable(1.9));
  CHECK_FALSE(p15.higher_moment_integrable(2.5));
  const auto p3 = DriftSpec::srpt(1.0, 1.0, 1.0, 3.0);
  CHECK(p3.higher_moment_integrable(10.0));
  CHECK(p15.higher_moment_integrable(1.0));  // falls back to the mass condition
}

TEST_CASE("tabulated drift interpolates and extrapolates monotonically") {
  const auto d = DriftSpec::tabulated(1.0, {0.5, 1.0, 2.0, 4.0},
                                      {4.0, 2.0, 1.2, 0.8}, 0.5);
  CHECK(d.mu_at(1.0) == doctest::Approx(2.0));
  CHECK(d.mu_at(1.5) == doctest::Approx(1.6));
  CHECK(d.mu_at(kInf) == 0.5);
  // diverges toward zero, decays toward mu_inf
  CHECK(d.mu_at(1e-6) > 1e3);
  CHECK(d.mu_at(1e6) == doctest::Approx(0.5).epsilon(1e-2));
  Rng rng(2, 0, 0);
  for (int i = 0; i < 3000; ++i) {
    const double a = std::exp(-8.0 + 16.0 * rng.uniform());
    const double b = a * (1.0 + rng.uniform_open());
    CHECK(d.mu_at(a) > d.mu_at(b));
  }
  CHECK_THROWS_AS((void)DriftSpec::tabulated(1.0, {1.0, 2.0}, {1.0, 2.0}, 0.0),
                  std::invalid_argument);
}

TEST_CASE("natural scale of the srpt family") {
  const auto d = DriftSpec::srpt(1.0, 4.0, 1.0, 2.0);
  CHECK(d.natural_scale() == doctest::Approx(0.5));
}
