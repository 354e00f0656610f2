#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rcbm/analytic.hpp"
#include "rcbm/bm_sim.hpp"
#include "rcbm/rng.hpp"
#include "rcbm/stats.hpp"

using namespace rcbm;

TEST_CASE("skorokhod reflection pins") {
  CHECK(skorokhod_reflect({0.0, -1.0, -2.0}) ==
        std::vector<double>{0.0, 0.0, 0.0});
  CHECK(skorokhod_reflect({1.0, 0.5, -1.0, 0.0}) ==
        std::vector<double>{1.0, 0.5, 0.0, 1.0});
  CHECK_THROWS_AS((void)skorokhod_reflect({-0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)skorokhod_reflect({}), std::invalid_argument);
}

TEST_CASE("skorokhod reflection is 2-Lipschitz and idempotent") {
  Rng rng(31, 0, 0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> f(60), g(60);
    double a = rng.uniform(), b = rng.uniform();
    double sup = std::fabs(a - b);
    f[0] = a;
    g[0] = b;
    for (int i = 1; i < 60; ++i) {
      f[i] = f[i - 1] + rng.normal_fast() * 0.3;
      g[i] = g[i - 1] + rng.normal_fast() * 0.3;
      sup = std::max(sup, std::fabs(f[i] - g[i]));
    }
    const auto rf = skorokhod_reflect(f);
    const auto rg = skorokhod_reflect(g);
    double rsup = 0.0;
    for (int i = 0; i < 60; ++i) rsup = std::max(rsup, std::fabs(rf[i] - rg[i]));
    CHECK(rsup <= 2.0 * sup + 1e-12);
    // Reflected outputs whose running minimum starts at zero are fixed points.
    CHECK(skorokhod_reflect(rf) == rf);
  }
}

TEST_CASE("sample_field basics and the zero-noise hook") {
  const auto spec = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0);
  FieldOptions opt;
  opt.dt = 0.25;
  opt.horizon = 2.0;
  opt.zero_noise = true;

  // Zero initial condition, zero noise: everything stays at zero.
  auto f = sample_field(spec, InitialCondition::zero(), {0.5, 1.0, 2.0}, opt);
  for (const auto& row : f.w_field)
    for (double v : row) CHECK(v == 0.0);
  CHECK(f.chi[0] == std::vector<double>{0.0, 0.0, 0.0});

  // Unit profile with drift ~1 decays linearly and sticks at zero.
  const auto tab = InitialCondition::tabulated({1e-9, 1e3}, {1.0, 1.0});
  const auto one = DriftSpec::power_law(1.0, 1.0, 1e-12, 1.0);
  auto g = sample_field(one, tab, {500.0}, opt);
  for (std::size_t k = 0; k < g.t_grid.size(); ++k) {
    const double expect = std::max(1.0 - g.t_grid[k] * one.mu_at(500.0), 0.0);
    CHECK(g.w_field[k][0] == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("field invariants: monotone coupling, domination, initial row") {
  const auto spec = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0);
  const auto init = InitialCondition::ramp(1.5, 1.0);
  FieldOptions opt;
  opt.dt = 1e-2;
  opt.horizon = 3.0;
  std::vector<double> grid{0.0, 0.2, 0.5, 1.0, 2.0, 5.0,
                           std::numeric_limits<double>::infinity()};
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    opt.seed = seed;
    const auto f = sample_field(spec, init, grid, opt);
    for (std::size_t k = 0; k < f.t_grid.size(); ++k) {
      for (std::size_t j = 0; j < grid.size(); ++j) {
        CHECK(f.w_field[k][j] >= 0.0);
        CHECK(f.w_field[k][j] >= f.chi[k][j] - 1e-12);
        if (j > 0) CHECK(f.w_field[k][j] + 1e-12 >= f.w_field[k][j - 1]);
      }
    }
    for (std::size_t j = 0; j < grid.size(); ++j)
      CHECK(f.w_field[0][j] == doctest::Approx(init.at(grid[j])));
  }
}

TEST_CASE("stationary max sampler matches the exponential law") {
  const auto spec = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0);
  MaxSimOptions opt;
  opt.dt = 1e-2;
  opt.bridge = true;
  opt.seed = 17;
  const std::size_t n = 20000;
  auto samples = sample_stationary_max_batch(spec, 1.0, 1e-3, n, opt);
  const double mu = spec.mu_at(1.0);
  const double ks = ks_statistic(samples, [&](double x) {
    return x < 0.0 ? 0.0 : stationary_max_cdf(x, mu, spec.sigma());
  });
  CHECK(ks < 1.5 * ks_critical_95(n) + 1e-3);
  MeanVar mv;
  for (double s : samples) mv.add(s);
  CHECK(std::fabs(mv.mean() - 0.25) < 3.0 * mv.stderr_mean() + 1e-3);
  CHECK_THROWS_AS(
      (void)sample_stationary_max(DriftSpec::power_law(1.0, 0.0, 1.0, 2.0),
                                  std::numeric_limits<double>::infinity(),
                                  1e-3, opt),
      std::domain_error);
}

TEST_CASE("reflected state at fixed t has the running-max law") {
  // Paired seeds: the reflected value and the running max are different
  // functionals of the same driving path but share one law at fixed t.
  const double t = 1.0, mu = 1.5, sigma = 1.0;
  const std::size_t n = 100000;
  std::vector<double> reflected(n), maxima(n);
  MaxSimOptions opt;
  opt.dt = 1e-2;
  opt.bridge = true;
  for (std::size_t i = 0; i < n; ++i) {
    opt.seed = 4242;
    opt.replicate = i;
    reflected[i] = simulate_reflected_at({mu}, {0.0}, sigma, t, opt)[0];
    maxima[i] = simulate_coupled_maxima({mu}, {0.0}, sigma, t, opt)[0];
  }
  const double ks = ks_statistic_two_sample(reflected, maxima);
  CHECK(ks < ks_critical_two_sample_95(n, n));
}

TEST_CASE("grid maxima without the bridge are biased low, shrinking with dt") {
  const auto spec = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0);
  const double target = 0.25;  // stationary mean at mu = 2
  std::vector<double> dts{1e-2, 1e-3, 1e-4};
  std::vector<double> means;
  for (double dt : dts) {
    MaxSimOptions opt;
    opt.dt = dt;
    opt.bridge = false;
    opt.seed = 24;
    MeanVar mv;
    auto s = sample_stationary_max_batch(spec, 1.0, 1e-3, 20000, opt);
    for (double v : s) mv.add(v);
    means.push_back(mv.mean());
    CHECK(mv.mean() < target);  // Euler grid maxima underestimate
  }
  CHECK(means[0] < means[1]);
  CHECK(means[1] < means[2]);
}

TEST_CASE("coupling time: zero start couples immediately") {
  const auto spec = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0);
  MaxSimOptions opt;
  opt.dt = 1e-2;
  const auto t = detect_coupling_time(spec, InitialCondition::zero(), 10.0, opt);
  REQUIRE(t.has_value());
  CHECK(*t == 0.0);
}

TEST_CASE("coupling times follow the first-passage law") {
  const auto spec = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0);  // mu(inf) = 1
  const auto init = InitialCondition::ramp(2.0, 1.0);     // w(inf) = 2
  MaxSimOptions opt;
  opt.dt = 1e-3;
  opt.bridge = true;
  opt.seed = 77;
  const std::size_t n = 30000;
  std::vector<double> times;
  times.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    opt.replicate = i;
    const auto t = detect_coupling_time(spec, init, 200.0, opt);
    REQUIRE(t.has_value());
    times.push_back(*t);
  }
  // Duality: P(T <= t) = P(sup_{s<=t} (sigma B_s + mu inf s) >= w_inf).
  const double ks = ks_statistic(times, [&](double t) {
    return t <= 0.0 ? 0.0
                    : 1.0 - running_max_cdf(2.0, t, -spec.mu_inf(), spec.sigma());
  });
  CHECK(ks < 0.01);
}

TEST_CASE("driftless tail still couples, slowly") {
  const auto spec = DriftSpec::power_law(1.0, 0.0, 1.0, 1.0);  // mu(inf) = 0
  const auto init = InitialCondition::ramp(1.0, 1.0);
  MaxSimOptions opt;
  opt.dt = 1e-2;
  opt.seed = 3;
  std::vector<double> times;
  std::size_t exceeded = 0;
  for (std::size_t i = 0; i < 400; ++i) {
    opt.replicate = i;
    const auto t = detect_coupling_time(spec, init, 100.0, opt);
    if (t.has_value())
      times.push_back(*t);
    else
      ++exceeded;
  }
  // Median first passage of |B| to 1 is about (1/Phi^-1(0.75))^2 ~ 2.2.
  REQUIRE(times.size() > 200);
  std::sort(times.begin(), times.end());
  const double median = times[times.size() / 2];
  CHECK(median > 0.5);
  CHECK(median < 10.0);
  CHECK(exceeded < 100);  // heavy tail: some paths do exceed the cap
}

TEST_CASE("recurrence fraction: immediate at zero init, monotone in horizon") {
  const auto spec = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0);
  CHECK(mc_recurrence_check(spec, InitialCondition::zero(), 1.0, 1e-2, 200, 9) ==
        1.0);
  const auto init = InitialCondition::ramp(2.0, 1.0);
  double prev = 0.0;
  for (double horizon : {1.0, 3.0, 9.0, 27.0}) {
    const double frac =
        mc_recurrence_check(spec, init, horizon, 1e-2, 2000, 10);
    CHECK(frac >= prev);  // same seeds, nested horizons
    prev = frac;
  }
  CHECK(prev > 0.95);
}

TEST_CASE("rng streams are deterministic and decorrelated") {
  Rng a(42, 7, 0), b(42, 7, 0), c(42, 8, 0);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  // normal_fast and the inverse-cdf sampler agree in distribution.
  Rng d(5, 0, 0);
  MeanVar fast_acc, inv_acc;
  std::vector<double> fast(20000), inv(20000);
  for (int i = 0; i < 20000; ++i) {
    fast[i] = d.normal_fast();
    inv[i] = d.normal();
  }
  CHECK(ks_statistic_two_sample(fast, inv) <
        ks_critical_two_sample_95(20000, 20000));
}

TEST_CASE("ramp start reaches the stationary law past the coupling tail") {
  const auto spec = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0);
  const auto init = InitialCondition::ramp(2.0, 1.0);
  // 99th percentile of the coupling time, estimated from the detector.
  MaxSimOptions opt;
  opt.dt = 1e-2;
  opt.seed = 51;
  std::vector<double> times;
  for (std::size_t i = 0; i < 4000; ++i) {
    opt.replicate = i;
    const auto t = detect_coupling_time(spec, init, 100.0, opt);
    REQUIRE(t.has_value());
    times.push_back(*t);
  }
  std::sort(times.begin(), times.end());
  const double p99 = times[static_cast<std::size_t>(0.99 * times.size())];

  const double a = 1.0, mu = spec.mu_at(a);
  const std::size_t n = 20000;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    MaxSimOptions o;
    o.dt = 1e-2;
    o.seed = 52;
    o.replicate = i;
    w[i] = simulate_reflected_at({mu}, {init.at(a)}, spec.sigma(), p99, o)[0];
  }
  const double ks = ks_statistic(w, [&](double x) {
    return x < 0.0 ? 0.0 : stationary_max_cdf(x, mu, spec.sigma());
  });
  CHECK(ks < 1.5 * ks_critical_95(n) + 2e-3);
}
