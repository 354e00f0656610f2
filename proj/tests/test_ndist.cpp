#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rcbm/analytic.hpp"
#include "rcbm/ndist.hpp"
#include "rcbm/rng.hpp"

using namespace rcbm;

namespace {

ConstraintSet make(std::vector<double> nu, std::vector<double> x,
                   double sigma = 1.0) {
  ConstraintSet cs;
  cs.sigma = sigma;
  for (std::size_t i = 0; i < nu.size(); ++i) cs.entries.push_back({nu[i], x[i]});
  return cs;
}

} // namespace

TEST_CASE("reducer pins") {
  {
    const auto rr = reduce_constraints(make({3, 2, 1}, {1, 3, 4}));
    CHECK(rr.reduced.entries.size() == 2);
    REQUIRE(rr.removed.size() == 1);
    CHECK(rr.removed[0] == 1);
    CHECK(rr.reduced.entries[0].x == 1.0);
    CHECK(rr.reduced.entries[1].x == 4.0);
  }
  {
    const auto rr = reduce_constraints(make({3, 2, 1}, {1, 3, 6}));
    CHECK(rr.removed.empty());
    const auto taus = rr.reduced.intersection_times();
    REQUIRE(taus.size() == 2);
    CHECK(taus[0] == doctest::Approx(2.0));
    CHECK(taus[1] == doctest::Approx(3.0));
    CHECK(rr.reduced.is_reduced());
  }
  {
    // A nonincreasing level makes the earlier constraint redundant.
    const auto rr = reduce_constraints(make({2, 1}, {2, 1}));
    CHECK(rr.reduced.entries.size() == 1);
    REQUIRE(rr.removed.size() == 1);
    CHECK(rr.removed[0] == 0);
    CHECK(rr.reduced.entries[0].nu == 1.0);
  }
  CHECK_THROWS_AS((void)reduce_constraints(make({}, {})), std::invalid_argument);
  CHECK_THROWS_AS((void)reduce_constraints(make({1, 2}, {0, 1})),
                  std::invalid_argument);
}

TEST_CASE("tie in intersection times drops the grazing middle line") {
  // Lines (3s, 2s+1, s+2): consecutive intersections both at s = 1; the
  // middle line touches the envelope at a single point only.
  const auto rr = reduce_constraints(make({3, 2, 1}, {0, 1, 2}));
  CHECK(rr.reduced.entries.size() == 2);
  REQUIRE(rr.removed.size() == 1);
  CHECK(rr.removed[0] == 1);
}

TEST_CASE("envelope equality under reduction, fuzzed") {
  Rng rng(6, 0, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.next_u64() % 5;
    std::vector<double> nu(n), x(n);
    double cur = 0.2 + 3.0 * rng.uniform();
    for (std::size_t i = 0; i < n; ++i) {
      nu[n - 1 - i] = cur;
      cur += 0.1 + rng.uniform();
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = 3.0 * rng.uniform();
    const auto raw = make(nu, x);
    const auto rr = reduce_constraints(raw);
    for (int k = 0; k <= 60; ++k) {
      const double s = k * 0.12;
      CHECK(raw.envelope(s) == doctest::Approx(rr.reduced.envelope(s)));
    }
    CHECK(rr.reduced.is_reduced());
  }
}

TEST_CASE("single-segment schedule reduces to the closed form") {
  SegmentedDrift sd;
  sd.durations = {1.3};
  sd.nus = {2.0};
  sd.barrier = 0.8;
  CHECK(piecewise_max_cdf(sd, 1.0) ==
        doctest::Approx(running_max_cdf(0.8, 1.3, 2.0, 1.0)).epsilon(1e-14));
  sd.boost = 2.0;  // boosted drift may flip the sign
  CHECK(piecewise_max_cdf(sd, 1.0) ==
        doctest::Approx(running_max_cdf(0.8, 1.3, 0.0, 1.0)).epsilon(1e-14));
}

TEST_CASE("split-segment propagation reproduces the closed form") {
  Rng rng(8, 0, 0);
  for (int i = 0; i < 12; ++i) {
    const double nu = 0.2 + 2.5 * rng.uniform();
    const double barrier = 0.2 + 1.5 * rng.uniform();
    const double t1 = 0.3 + rng.uniform(), t2 = 0.3 + rng.uniform();
    SegmentedDrift sd;
    sd.durations = {t1, t2};
    sd.nus = {nu, nu};
    sd.barrier = barrier;
    CHECK(piecewise_max_cdf(sd, 1.0) ==
          doctest::Approx(running_max_cdf(barrier, t1 + t2, nu, 1.0))
              .epsilon(2e-6));
  }
}

TEST_CASE("joint law: n = 1 and the degenerate slowest coordinate") {
  CHECK(joint_cdf_nd(make({2.0}, {0.7})) ==
        doctest::Approx(stationary_max_cdf(0.7, 2.0, 1.0)).epsilon(1e-14));
  CHECK(joint_cdf_nd(make({2.0, 0.0}, {0.5, 1.5})) == 0.0);
}

TEST_CASE("joint law at n = 2 equals the closed two-point law, fuzzed") {
  Rng rng(12, 0, 0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double nu2 = 0.2 + 2.0 * rng.uniform();
    const double nu1 = nu2 + 0.2 + 2.0 * rng.uniform();
    const double x1 = 0.05 + rng.uniform();
    const double x2 = x1 + 0.05 + rng.uniform();
    const double a = joint_cdf_nd(make({nu1, nu2}, {x1, x2}));
    const double b = joint_cdf_2d(TwoPoint{nu1, nu2, x1, x2, 1.0});
    worst = std::max(worst, std::fabs(a - b));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("joint law is monotone in every level") {
  const auto base = make({3, 2, 1}, {1, 3, 6});
  const double v0 = joint_cdf_nd(base);
  for (std::size_t i = 0; i < 3; ++i) {
    auto up = base;
    up.entries[i].x += 0.2;
    const auto rr = reduce_constraints(up);
    CHECK(joint_cdf_nd(rr.reduced) >= v0 - 1e-9);
  }
}

TEST_CASE("dimension consistency when the last level escapes to infinity") {
  const auto full = reduce_constraints(make({3, 2, 1}, {1, 3, 600.0}));
  const auto head = make({3, 2}, {1, 3});
  CHECK(joint_cdf_nd(full.reduced) ==
        doctest::Approx(joint_cdf_nd(head)).epsilon(1e-5));
}

TEST_CASE("mc estimator: exact cases") {
  // Single constraint: the tail closure makes the estimate deterministic.
  McJointOptions opt;
  opt.n_paths = 100;
  opt.seed = 4;
  const auto one = mc_joint_cdf(make({2.0}, {0.7}), opt);
  CHECK(one.estimate ==
        doctest::Approx(stationary_max_cdf(0.7, 2.0, 1.0)).epsilon(1e-14));
  CHECK(one.stderr_est == 0.0);

  // A zero level on the steepest line kills every path within one step.
  opt.n_paths = 5000;
  opt.dt = 1e-4;
  const auto zero = mc_joint_cdf(make({3.0, 1.0}, {0.0, 1.0}), opt);
  CHECK(zero.estimate < 0.02);
}

TEST_CASE("mc estimator agrees with the quadrature on a three-line instance") {
  const auto cs = make({3, 2, 1}, {1, 3, 6});
  const double quad = joint_cdf_nd(cs);
  McJointOptions opt;
  opt.n_paths = 200000;
  opt.dt = 5e-3;
  opt.seed = 11;
  const auto mc = mc_joint_cdf(cs, opt);
  const double z = (mc.estimate - quad) / mc.stderr_est;
  INFO("quad=", quad, " mc=", mc.estimate, " z=", z);
  CHECK(std::fabs(z) <= 3.5);
}

TEST_CASE("mc estimator is reduction-invariant on paired seeds") {
  McJointOptions opt;
  opt.n_paths = 20000;
  opt.dt = 1e-2;
  opt.seed = 31;
  const auto raw = mc_joint_cdf(make({3, 2, 1}, {1, 3, 4}), opt);
  const auto red = mc_joint_cdf(make({3, 1}, {1, 4}), opt);
  // The reducer runs inside the estimator, so the driving paths see the
  // same envelope and the estimates coincide exactly.
  CHECK(raw.estimate == doctest::Approx(red.estimate).epsilon(1e-14));
}

TEST_CASE("quadrature rejects malformed schedules") {
  SegmentedDrift sd;
  sd.durations = {1.0, -0.5};
  sd.nus = {2.0, 1.0};
  sd.barrier = 1.0;
  CHECK_THROWS_AS((void)piecewise_max_cdf(sd, 1.0), std::invalid_argument);
  sd.durations = {1.0};
  CHECK_THROWS_AS((void)piecewise_max_cdf(sd, 1.0), std::invalid_argument);
  sd.nus = {2.0};
  CHECK_THROWS_AS((void)piecewise_max_cdf(sd, 1.0, 16), std::invalid_argument);
}

TEST_CASE("mc joint cdf does not depend on the worker count") {
  ConstraintSet cs;
  cs.sigma = 1.0;
  cs.entries = {{3.0, 1.0}, {2.0, 3.0}, {1.0, 6.0}};
  McJointOptions a;
  a.n_paths = 20000;
  a.dt = 1e-2;
  a.seed = 13;
  a.threads = 1;
  McJointOptions b = a;
  b.threads = 4;
  const auto ra = mc_joint_cdf(cs, a);
  const auto rb = mc_joint_cdf(cs, b);
  CHECK(ra.estimate == doctest::Approx(rb.estimate).epsilon(1e-13));
  CHECK(ra.stderr_est == doctest::Approx(rb.stderr_est).epsilon(1e-10));
}
