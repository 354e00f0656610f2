#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rcbm/rng.hpp"
#include "rcbm/special.hpp"

using namespace rcbm;

namespace {

// Independent reference: Maclaurin series of erf in long double, good to
// ~1e-18 for |x| <= 2.
long double erf_series(long double x) {
  long double term = x, sum = x;
  for (int n = 1; n < 60; ++n) {
    term *= -x * x / n;
    sum += term / (2 * n + 1);
  }
  return sum * 2.0L / sqrtl(acosl(-1.0L));
}

} // namespace

TEST_CASE("normal cdf matches the series reference") {
  const long double phi1 = 0.5L * (1.0L + erf_series(1.0L / sqrtl(2.0L)));
  CHECK(std::fabs(std_normal_cdf(1.0) - static_cast<double>(phi1)) < 1e-15);
  // frozen from the same series
  CHECK(std_normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-15));
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std_normal_cdf(std::numeric_limits<double>::infinity()) == 1.0);
  CHECK(std_normal_cdf(-std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("normal cdf symmetry and monotonicity") {
  double worst = 0.0;
  double prev = -1.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = -8.0 + 16.0 * i / 999.0;
    worst = std::max(worst, std::fabs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0));
    const double v = std_normal_cdf(x);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("normal pdf values and symmetry") {
  CHECK(std_normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
  CHECK(std_normal_pdf(1.0) == std_normal_pdf(-1.0));
  const long double ref = expl(-4.5L) / sqrtl(2.0L * acosl(-1.0L));
  CHECK(std_normal_pdf(3.0) ==
        doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
}

TEST_CASE("cdf derivative matches the density") {
  const double h = 1e-5;
  for (int i = 0; i <= 100; ++i) {
    const double x = -5.0 + 10.0 * i / 100.0;
    const double d = (std_normal_cdf(x + h) - std_normal_cdf(x - h)) / (2.0 * h);
    CHECK(std::fabs(d - std_normal_pdf(x)) < 1e-8);
  }
}

TEST_CASE("log cdf agrees with the cdf and stays finite deep in the tail") {
  for (double x : {-0.3, 0.4, 1.5, -2.0, -5.0}) {
    CHECK(log_std_normal_cdf(x) ==
          doctest::Approx(std::log(std_normal_cdf(x))).epsilon(1e-12));
  }
  const double lp = log_std_normal_cdf(-40.0);
  CHECK(lp < -700.0);
  CHECK(std::isfinite(lp));
}

TEST_CASE("inverse cdf round trip") {
  CHECK(inverse_std_normal_cdf(0.5) == 0.0);
  CHECK(inverse_std_normal_cdf(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-13));
  Rng rng(7, 0, 0);
  for (int i = 0; i < 1000; ++i) {
    const double p = rng.uniform_open();
    CHECK(std_normal_cdf(inverse_std_normal_cdf(p)) ==
          doctest::Approx(p).epsilon(1e-13));
  }
  CHECK_THROWS_AS((void)inverse_std_normal_cdf(0.0), std::domain_error);
  CHECK_THROWS_AS((void)inverse_std_normal_cdf(1.0), std::domain_error);
}

TEST_CASE("log gamma against std and the factorial ladder") {
  for (double x : {0.1, 0.5, 1.0, 2.5, 7.0, 20.0, 49.5}) {
    CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(5e-14));
  }
  // Gamma(4.5) from the half-integer recurrence.
  const double g45 = 3.5 * 2.5 * 1.5 * 0.5 * std::sqrt(M_PI);
  CHECK(std::exp(log_gamma(4.5)) == doctest::Approx(g45).epsilon(1e-13));
  CHECK_THROWS_AS((void)log_gamma(0.0), std::domain_error);
  CHECK_THROWS_AS((void)log_gamma(-1.0), std::domain_error);
}

TEST_CASE("beta function pins") {
  CHECK(beta_fn(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(beta_fn(0.5, 0.5) == doctest::Approx(M_PI).epsilon(1e-13));
  // B(1/2, 5/2) via the recurrence B(x, y+1) = B(x, y) y/(x+y) from B(1/2,1/2).
  const double b = M_PI * (0.5 / 1.0) * (1.5 / 2.0);
  CHECK(b == doctest::Approx(3.0 * M_PI / 8.0).epsilon(1e-15));
  CHECK(beta_fn(0.5, 2.5) == doctest::Approx(b).epsilon(1e-12));
  CHECK(beta_fn(2.0, 3.0) == doctest::Approx(beta_fn(3.0, 2.0)).epsilon(1e-14));
}

TEST_CASE("beta reflection and recurrence tolerances") {
  for (int i = 1; i < 20; ++i) {
    const double x = i / 20.0;
    CHECK(beta_fn(x, 1.0 - x) ==
          doctest::Approx(M_PI / std::sin(M_PI * x)).epsilon(1e-10));
  }
  Rng rng(11, 0, 0);
  for (int i = 0; i < 2000; ++i) {
    const double x = 0.01 + 5.0 * rng.uniform();
    const double y = 0.01 + 5.0 * rng.uniform();
    CHECK(std::fabs(beta_fn(x, y + 1.0) - beta_fn(x, y) * y / (x + y)) < 1e-12);
  }
}

TEST_CASE("beta domain guard") {
  CHECK_THROWS_AS((void)beta_fn(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS((void)beta_fn(1.0, -0.5), std::domain_error);
  CHECK_THROWS_AS((void)beta_fn(51.0, 1.0), std::domain_error);
}

TEST_CASE("erfc cross-checked against the standard library") {
  for (double x = -6.0; x <= 6.0; x += 0.37) {
    CHECK(erfc_fn(x) == doctest::Approx(std::erfc(x)).epsilon(2e-14));
  }
  CHECK(erfcx_fn(5.0) ==
        doctest::Approx(std::exp(25.0) * std::erfc(5.0)).epsilon(1e-12));
  // Asymptotic series 1/(x sqrt(pi)) (1 - 1/(2x^2) + 3/(4x^4) - ...) far out.
  const double x = 30.0;
  const double asym = (1.0 - 0.5 / (x * x) + 0.75 / (x * x * x * x) -
                       1.875 / std::pow(x, 6.0)) /
                      (x * std::sqrt(M_PI));
  CHECK(erfcx_fn(x) == doctest::Approx(asym).epsilon(1e-12));
}
