/* rcbm: stationary laws of reflecting coupled Brownian motions and SRPT
 * heavy-traffic limits, exposed as a C API over the C++ core.
 *
 * Conventions: every fallible call returns an rcbm_status; outputs are
 * written through pointers only on RCBM_OK.  rcbm_last_error() returns a
 * thread-local description of the most recent failure on this thread.
 * Objects are opaque handles freed by their matching _free function. */

#ifndef RCBM_H
#define RCBM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rcbm_status {
  RCBM_OK = 0,
  RCBM_ERR_INVALID_ARGUMENT = 1,
  RCBM_ERR_DOMAIN = 2,
  RCBM_ERR_RUNTIME = 3,
  RCBM_ERR_IO = 4
} rcbm_status;

const char* rcbm_version(void);
const char* rcbm_last_error(void);

/* ---- drift handles -------------------------------------------------- */

typedef struct rcbm_drift rcbm_drift;

/* mu(a) = kappa + lambda a^-p (p > 1); mu(inf) = kappa. */
rcbm_status rcbm_drift_create_srpt(double sigma, double kappa, double lambda,
                                   double p, rcbm_drift** out);
/* mu(a) = c0 + c1 a^-q (q > 0); mu(inf) = c0. */
rcbm_status rcbm_drift_create_power_law(double sigma, double c0, double c1,
                                        double q, rcbm_drift** out);
/* Strictly decreasing knots; power-law extrapolation outside. */
rcbm_status rcbm_drift_create_tabulated(double sigma, const double* a,
                                        const double* mu, size_t n,
                                        double mu_inf, rcbm_drift** out);
void rcbm_drift_free(rcbm_drift* d);

/* a > 0 or +infinity; a = 0 is a domain error. */
rcbm_status rcbm_drift_mu_at(const rcbm_drift* d, double a, double* out);
/* Whether the size-weighted mass integral of 1/(a^2 mu(a)) is finite. */
rcbm_status rcbm_drift_mass_integrability(const rcbm_drift* d, int* holds,
                                          double* value);
rcbm_status rcbm_drift_higher_moment_integrable(const rcbm_drift* d,
                                                double gamma, int* holds);

/* ---- closed-form laws ------------------------------------------------ */

/* P(sup_{s<=t}(sigma B_s - nu s) <= x); nu may be negative. */
rcbm_status rcbm_running_max_cdf(double x, double t, double nu, double sigma,
                                 double* out);
rcbm_status rcbm_stationary_max_cdf(const rcbm_drift* d, double a, double x,
                                    double* out);
rcbm_status rcbm_stationary_max_moment(const rcbm_drift* d, double a,
                                       double gamma, double* out);
rcbm_status rcbm_joint_cdf_2d(const rcbm_drift* d, double a1, double a2,
                              double x1, double x2, double* out);
rcbm_status rcbm_covariance(const rcbm_drift* d, double a1, double a2,
                            double* out);
rcbm_status rcbm_correlation(const rcbm_drift* d, double a1, double a2,
                             double* out);
/* Density of (max at the faster drift, increment to the slower one). */
rcbm_status rcbm_joint_density_g(double x, double z, double nu1, double delta1,
                                 double sigma, double* out);

/* Stationary queue-length moments of the SRPT heavy-traffic limit. */
rcbm_status rcbm_srpt_queue_mean(double kappa, double lambda, double p,
                                 double sigma, double* out);
rcbm_status rcbm_srpt_queue_variance(double kappa, double lambda, double p,
                                     double sigma, double* out);
rcbm_status rcbm_srpt_cov_increment(double a1, double a2, double kappa,
                                    double lambda, double p, double sigma,
                                    double* out);

/* ---- n-point law ------------------------------------------------------ */

/* Drops constraints whose line never attains the lower envelope.  kept_idx
 * must hold n entries; *kept_count receives how many were written. */
rcbm_status rcbm_reduce_constraints(const double* nu, const double* x,
                                    size_t n, double sigma, size_t* kept_idx,
                                    size_t* kept_count);
rcbm_status rcbm_joint_cdf_nd(const double* nu, const double* x, size_t n,
                              double sigma, size_t grid_n, double* out);
rcbm_status rcbm_mc_joint_cdf(const double* nu, const double* x, size_t n,
                              double sigma, size_t n_paths, double dt,
                              uint64_t seed, double* estimate,
                              double* stderr_out);

/* ---- simulation primitives ------------------------------------------- */

/* out must hold n entries; out[k] = path[k] - min(0, min_{j<=k} path[j]). */
rcbm_status rcbm_skorokhod_reflect(const double* path, size_t n, double* out);
rcbm_status rcbm_sample_stationary_max(const rcbm_drift* d, double a,
                                       double cdf_gap, double dt, int bridge,
                                       uint64_t seed, uint64_t replicate,
                                       double* out);

/* ---- configured runner ------------------------------------------------ */

/* Executes one subcommand from a JSON configuration document.  When out_dir
 * is non-NULL the produced CSV/JSON/dat files plus a manifest are written
 * there.  On success *summary_json receives a malloc'd JSON summary to be
 * released with rcbm_string_free.  A failing validation suite still returns
 * RCBM_OK with "pass": false in the summary. */
rcbm_status rcbm_run(const char* config_json, const char* out_dir,
                     char** summary_json);
void rcbm_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* RCBM_H */
