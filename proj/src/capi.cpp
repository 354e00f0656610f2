#include "rcbm.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

#include "rcbm/analytic.hpp"
#include "rcbm/bm_sim.hpp"
#include "rcbm/config.hpp"
#include "rcbm/measure.hpp"
#include "rcbm/ndist.hpp"
#include "rcbm/runner.hpp"

struct rcbm_drift {
  rcbm::DriftSpec spec;
};

namespace {

thread_local std::string g_last_error;

rcbm_status set_error(rcbm_status code, const char* what) {
  g_last_error = what ? what : "unknown error";
  return code;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
rcbm_status guarded(Fn&& fn) {
  try {
    fn();
    return RCBM_OK;
  } catch (const std::domain_error& e) {
    return set_error(RCBM_ERR_DOMAIN, e.what());
  } catch (const std::invalid_argument& e) {
    return set_error(RCBM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc& e) {
    return set_error(RCBM_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return set_error(RCBM_ERR_RUNTIME, e.what());
  }
}

rcbm_status require(bool ok, const char* what) {
  return ok ? RCBM_OK : set_error(RCBM_ERR_INVALID_ARGUMENT, what);
}

} // namespace

extern "C" {

const char* rcbm_version(void) { return rcbm::kVersion; }

const char* rcbm_last_error(void) { return g_last_error.c_str(); }

rcbm_status rcbm_drift_create_srpt(double sigma, double kappa, double lambda,
                                   double p, rcbm_drift** out) {
  if (rcbm_status s = require(out != nullptr, "out must not be NULL")) return s;
  return guarded([&] {
    *out = new rcbm_drift{rcbm::DriftSpec::srpt(sigma, kappa, lambda, p)};
  });
}

rcbm_status rcbm_drift_create_power_law(double sigma, double c0, double c1,
                                        double q, rcbm_drift** out) {
  if (rcbm_status s = require(out != nullptr, "out must not be NULL")) return s;
  return guarded([&] {
    *out = new rcbm_drift{rcbm::DriftSpec::power_law(sigma, c0, c1, q)};
  });
}

rcbm_status rcbm_drift_create_tabulated(double sigma, const double* a,
                                        const double* mu, size_t n,
                                        double mu_inf, rcbm_drift** out) {
  if (rcbm_status s = require(out && a && mu, "NULL argument")) return s;
  return guarded([&] {
    *out = new rcbm_drift{rcbm::DriftSpec::tabulated(
        sigma, std::vector<double>(a, a + n), std::vector<double>(mu, mu + n),
        mu_inf)};
  });
}

void rcbm_drift_free(rcbm_drift* d) { delete d; }

rcbm_status rcbm_drift_mu_at(const rcbm_drift* d, double a, double* out) {
  if (rcbm_status s = require(d && out, "NULL argument")) return s;
  return guarded([&] { *out = d->spec.mu_at(a); });
}

rcbm_status rcbm_drift_mass_integrability(const rcbm_drift* d, int* holds,
                                          double* value) {
  if (rcbm_status s = require(d && holds && value, "NULL argument")) return s;
  return guarded([&] {
    const auto rep = d->spec.mass_integrability();
    *holds = rep.holds ? 1 : 0;
    *value = rep.value;
  });
}

rcbm_status rcbm_drift_higher_moment_integrable(const rcbm_drift* d,
                                                double gamma, int* holds) {
  if (rcbm_status s = require(d && holds, "NULL argument")) return s;
  return guarded(
      [&] { *holds = d->spec.higher_moment_integrable(gamma) ? 1 : 0; });
}

rcbm_status rcbm_running_max_cdf(double x, double t, double nu, double sigma,
                                 double* out) {
  if (rcbm_status s = require(out != nullptr, "out must not be NULL")) return s;
  return guarded([&] { *out = rcbm::running_max_cdf(x, t, nu, sigma); });
}

rcbm_status rcbm_stationary_max_cdf(const rcbm_drift* d, double a, double x,
                                    double* out) {
  if (rcbm_status s = require(d && out, "NULL argument")) return s;
  return guarded([&] { *out = rcbm::stationary_max_cdf(d->spec, a, x); });
}

rcbm_status rcbm_stationary_max_moment(const rcbm_drift* d, double a,
                                       double gamma, double* out) {
  if (rcbm_status s = require(d && out, "NULL argument")) return s;
  return guarded([&] { *out = rcbm::stationary_max_moment(d->spec, a, gamma); });
}

rcbm_status rcbm_joint_cdf_2d(const rcbm_drift* d, double a1, double a2,
                              double x1, double x2, double* out) {
  if (rcbm_status s = require(d && out, "NULL argument")) return s;
  return guarded([&] { *out = rcbm::joint_cdf_2d(d->spec, a1, a2, x1, x2); });
}

rcbm_status rcbm_covariance(const rcbm_drift* d, double a1, double a2,
                            double* out) {
  if (rcbm_status s = require(d && out, "NULL argument")) return s;
  return guarded([&] { *out = rcbm::covariance_max(d->spec, a1, a2); });
}

rcbm_status rcbm_correlation(const rcbm_drift* d, double a1, double a2,
                             double* out) {
  if (rcbm_status s = require(d && out, "NULL argument")) return s;
  return guarded([&] { *out = rcbm::correlation_max(d->spec, a1, a2); });
}

rcbm_status rcbm_joint_density_g(double x, double z, double nu1, double delta1,
                                 double sigma, double* out) {
  if (rcbm_status s = require(out != nullptr, "out must not be NULL")) return s;
  return guarded([&] { *out = rcbm::joint_density_g(x, z, nu1, delta1, sigma); });
}

rcbm_status rcbm_srpt_queue_mean(double kappa, double lambda, double p,
                                 double sigma, double* out) {
  if (rcbm_status s = require(out != nullptr, "out must not be NULL")) return s;
  return guarded([&] { *out = rcbm::srpt_queue_mean(kappa, lambda, p, sigma); });
}

rcbm_status rcbm_srpt_queue_variance(double kappa, double lambda, double p,
                                     double sigma, double* out) {
  if (rcbm_status s = require(out != nullptr, "out must not be NULL")) return s;
  return guarded(
      [&] { *out = rcbm::srpt_queue_variance(kappa, lambda, p, sigma); });
}

rcbm_status rcbm_srpt_cov_increment(double a1, double a2, double kappa,
                                    double lambda, double p, double sigma,
                                    double* out) {
  if (rcbm_status s = require(out != nullptr, "out must not be NULL")) return s;
  return guarded([&] {
    *out = rcbm::srpt_cov_increment(a1, a2, kappa, lambda, p, sigma);
  });
}

static rcbm::ConstraintSet make_set(const double* nu, const double* x,
                                    size_t n, double sigma) {
  rcbm::ConstraintSet cs;
  cs.sigma = sigma;
  for (size_t i = 0; i < n; ++i) cs.entries.push_back({nu[i], x[i]});
  return cs;
}

rcbm_status rcbm_reduce_constraints(const double* nu, const double* x,
                                    size_t n, double sigma, size_t* kept_idx,
                                    size_t* kept_count) {
  if (rcbm_status s = require(nu && x && kept_idx && kept_count, "NULL argument"))
    return s;
  return guarded([&] {
    const auto rr = rcbm::reduce_constraints(make_set(nu, x, n, sigma));
    size_t w = 0;
    size_t next_removed = 0;
    for (size_t i = 0; i < n; ++i) {
      if (next_removed < rr.removed.size() && rr.removed[next_removed] == i) {
        ++next_removed;
        continue;
      }
      kept_idx[w++] = i;
    }
    *kept_count = w;
  });
}

rcbm_status rcbm_joint_cdf_nd(const double* nu, const double* x, size_t n,
                              double sigma, size_t grid_n, double* out) {
  if (rcbm_status s = require(nu && x && out, "NULL argument")) return s;
  return guarded([&] {
    const auto rr = rcbm::reduce_constraints(make_set(nu, x, n, sigma));
    *out = rcbm::joint_cdf_nd(rr.reduced, grid_n == 0 ? 2048 : grid_n);
  });
}

rcbm_status rcbm_mc_joint_cdf(const double* nu, const double* x, size_t n,
                              double sigma, size_t n_paths, double dt,
                              uint64_t seed, double* estimate,
                              double* stderr_out) {
  if (rcbm_status s = require(nu && x && estimate && stderr_out, "NULL argument"))
    return s;
  return guarded([&] {
    rcbm::McJointOptions opt;
    opt.n_paths = n_paths;
    opt.dt = dt;
    opt.seed = seed;
    const auto est = rcbm::mc_joint_cdf(make_set(nu, x, n, sigma), opt);
    *estimate = est.estimate;
    *stderr_out = est.stderr_est;
  });
}

rcbm_status rcbm_skorokhod_reflect(const double* path, size_t n, double* out) {
  if (rcbm_status s = require(path && out, "NULL argument")) return s;
  return guarded([&] {
    const auto r = rcbm::skorokhod_reflect(std::vector<double>(path, path + n));
    std::memcpy(out, r.data(), n * sizeof(double));
  });
}

rcbm_status rcbm_sample_stationary_max(const rcbm_drift* d, double a,
                                       double cdf_gap, double dt, int bridge,
                                       uint64_t seed, uint64_t replicate,
                                       double* out) {
  if (rcbm_status s = require(d && out, "NULL argument")) return s;
  return guarded([&] {
    rcbm::MaxSimOptions opt;
    opt.dt = dt;
    opt.bridge = bridge != 0;
    opt.seed = seed;
    opt.replicate = replicate;
    *out = rcbm::sample_stationary_max(d->spec, a, cdf_gap, opt);
  });
}

rcbm_status rcbm_run(const char* config_json, const char* out_dir,
                     char** summary_json) {
  if (rcbm_status s = require(config_json && summary_json, "NULL argument"))
    return s;
  try {
    const rcbm::RunConfig cfg = rcbm::parse_config(config_json);
    const rcbm::RunOutput out = rcbm::execute_subcommand(cfg);
    if (out_dir != nullptr) rcbm::write_run_outputs(cfg, out, out_dir);
    char* buf = static_cast<char*>(std::malloc(out.summary_json.size() + 1));
    if (!buf) return set_error(RCBM_ERR_RUNTIME, "out of memory");
    std::memcpy(buf, out.summary_json.c_str(), out.summary_json.size() + 1);
    *summary_json = buf;
    return RCBM_OK;
  } catch (const std::domain_error& e) {
    return set_error(RCBM_ERR_DOMAIN, e.what());
  } catch (const std::invalid_argument& e) {
    return set_error(RCBM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    const std::string what = e.what();
    if (what.rfind("cannot write", 0) == 0 || what.rfind("failed writing", 0) == 0)
      return set_error(RCBM_ERR_IO, e.what());
    return set_error(RCBM_ERR_RUNTIME, e.what());
  }
}

void rcbm_string_free(char* s) { std::free(s); }

} // extern "C"
