// Acceptance suite: one integration check per pinned criterion, each printing
// a PASS/FAIL line with the measured statistic and its threshold.  Run all
// criteria or a single one with --criterion N.  The process exits nonzero if
// any executed criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "rcbm/analytic.hpp"
#include "rcbm/bm_sim.hpp"
#include "rcbm/measure.hpp"
#include "rcbm/stats.hpp"
#include "rcbm/validate.hpp"

using namespace rcbm;

namespace {

int g_failures = 0;

void line(int criterion, bool pass, const std::string& what) {
  std::printf("%s criterion-%d: %s\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void sub(const ExperimentReport& r, int criterion) {
  line(criterion, r.pass || r.kind == CheckKind::Skipped, report_line(r));
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// 1. Stationary exponential law of the all-time maximum: N = 1e5 samples at
// dt = 1e-3 with the bridge correction, KS against Exp(4) below 0.01.
void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto spec = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0);
  MaxSimOptions opt;
  opt.dt = 1e-3;
  opt.bridge = true;
  opt.seed = 1001;
  const std::size_t n = 100000;
  auto samples = sample_stationary_max_batch(spec, 1.0, 1e-3, n, opt);
  const double mu = spec.mu_at(1.0);
  const double ks = ks_statistic(samples, [&](double x) {
    return x < 0.0 ? 0.0 : stationary_max_cdf(x, mu, spec.sigma());
  });
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "stationary max law: ks=%.5f thr=0.01 (n=%zu, dt=1e-3, "
                "bridge on, %.1fs)",
                ks, n, elapsed_since(t0));
  line(1, ks < 0.01, buf);
}

// 2. Two-point joint CDF and the conditional identity on a 4x4 grid,
// N = 1e6 paths at dt = 1e-4, every |z| <= 3.
void criterion_2() {
  Law2dConfig cfg;
  cfg.n_paths = 1000000;
  cfg.dt = 1e-4;
  cfg.seed = 1002;
  const auto reports = law_2d_grid(cfg);
  for (const auto& r : reports) sub(r, 2);
}

// 3. Paired-path covariance and correlation against the closed forms.
void criterion_3() {
  CovarianceCheckConfig cfg;
  cfg.n_paths = 200000;
  cfg.seed = 1003;
  for (const auto& r : covariance_check(cfg)) sub(r, 3);
}

// 4. Quadrature of the two-point density: normalization within 1e-3 and the
// cross moment within 1e-4 of sigma^4 (nu1^2 - nu2^2) / (4 nu1^3 nu2).
void criterion_4() {
  for (const auto& r : density_quadrature_check(2.0, 1.0, 1.0)) sub(r, 4);
}

// 5. n-point law: quadrature vs Monte Carlo on nu=(3,2,1), x=(1,3,6); the
// reducer drops the dominated middle line of x=(1,3,4); the n=2 assembly
// matches the closed two-point law on 100 fuzzed instances.
void criterion_5() {
  NdistCheckConfig cfg;
  cfg.n_paths = 1000000;
  cfg.dt = 5e-3;
  cfg.seed = 1005;
  for (const auto& r : ndist_check(cfg)) sub(r, 5);
}

// 6. Pointwise drift-tilt identity of the barrier density over 1e4 tuples.
void criterion_6() { sub(kernel_identity_check(10000, 1006), 6); }

// 7. Stationary queue-length moments at p=2, kappa=lambda=sigma=1 over 1e4
// replicates: mean within 2% of pi/4; variance within 5% of the pinned
// closed form (which is inconsistent with the covariance double integral
// and therefore expected to fail; the corrected-value comparison is printed
// in the note); limit probes of the mean formula.
void criterion_7() {
  MeasureCheckConfig cfg;
  cfg.replicates = 10000;
  cfg.seed = 1007;
  for (const auto& r : measure_check(cfg)) sub(r, 7);
}

// 8. Moment convergence at t = T*(1e-3) for gamma in {1, 2} at mu(a) = 1;
// gamma = 2.5 at p = 1.5 must be skipped by the integrability gate.
void criterion_8() {
  MomentSweepConfig cfg;
  cfg.a = 1.0;
  cfg.gammas = {1.0, 2.0};
  cfg.n_paths = 100000;
  cfg.seed = 1008;
  const auto spec = DriftSpec::srpt(1.0, 0.5, 0.5, 2.0);  // mu(1) = 1
  for (const auto& r : moment_sweep(spec, InitialCondition::zero(), cfg))
    sub(r, 8);

  MomentSweepConfig skip_cfg;
  skip_cfg.a = 1.0;
  skip_cfg.gammas = {2.5};
  skip_cfg.n_paths = 1000;
  const auto p15 = DriftSpec::srpt(1.0, 1.0, 1.0, 1.5);
  const auto skipped = moment_sweep(p15, InitialCondition::zero(), skip_cfg);
  bool ok = skipped.size() == 1 && skipped[0].kind == CheckKind::Skipped;
  line(8, ok, "gamma=2.5 at p=1.5 skipped by the integrability gate");
}

// 9. SRPT simulator trends over r in {10, 20, 40}: workload KS nonincreasing,
// Little's-law ratio moving toward 1, exact conservation, FIFO dominance.
void criterion_9() {
  SrptSuiteConfig cfg;
  cfg.horizon_scaled = 4000.0;
  cfg.seed = 1009;
  for (const auto& r : srpt_suite(cfg)) sub(r, 9);
}

// 10. Recurrence: the coupled field empties by 10x the median coupling time
// in more than 99% of paths from the ramp initial profile.
void criterion_10() {
  RecurrenceCheckConfig cfg;
  cfg.seed = 1010;
  const auto spec = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0);
  for (const auto& r : recurrence_check(spec, cfg)) sub(r, 10);
}

// 11. Special-function reference checks at the documented tolerances.
void criterion_11() {
  for (const auto& r : special_function_check()) sub(r, 11);
}

} // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      only = std::atoi(argv[i + 1]);
  }
  void (*checks[])() = {criterion_1, criterion_2, criterion_3, criterion_4,
                        criterion_5, criterion_6, criterion_7, criterion_8,
                        criterion_9, criterion_10, criterion_11};
  if (only >= 1 && only <= 11) {
    checks[only - 1]();
  } else {
    for (auto* fn : checks) fn();
  }
  if (g_failures > 0)
    std::printf("acceptance: %d check(s) failed\n", g_failures);
  else
    std::printf("acceptance: all checks passed\n");
  return g_failures == 0 ? 0 : 1;
}
