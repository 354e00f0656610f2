#pragma once

// Discrete-event single-server queue under shortest-remaining-processing-time
// with Pareto processing times and renewal arrivals, plus the
// distribution-dependent scaling that relocates and reweights the state
// measure, and Little's-law summary statistics.

#include <cstdint>
#include <string>
#include <vector>

namespace rcbm {

// Pareto service-time distribution: F(x) = 1 - (x_m/x)^alpha for x >= x_m.
// alpha must exceed 2 so the variance is finite.
struct ParetoService {
  double alpha = 3.0;
  double x_m = 1.0;

  double mean() const { return alpha * x_m / (alpha - 1.0); }
  double second_moment() const { return alpha * x_m * x_m / (alpha - 2.0); }
  double variance() const {
    const double m = mean();
    return second_moment() - m * m;
  }
  double sample(double u) const;  // u in (0,1)
};

// S(x) = 1 / int_x^inf y dF(y); closed form for the Pareto family.
double pareto_tail_integral(double x, double alpha, double x_m);
// Generalised inverse S^{-1}(y) = inf{ x >= 0 : S(x) > y }.
double pareto_tail_integral_inverse(double y, double alpha, double x_m);

enum class ArrivalKind { Poisson, GammaRenewal };

// Model parameters for one member of the heavy-traffic sequence, indexed by
// r.  The arrival rate is lambda_r = (1 - kappa/r)/E[v], so that
// r (1 - rho_r) = kappa exactly; c_r = S^{-1}(r) is the atom boost.
struct ScalingParams {
  double r = 10.0;
  double p = 2.0;  // tail index; alpha = p + 1
  double x_m = 1.0;
  double kappa = 1.0;
  ArrivalKind arrival = ArrivalKind::Poisson;
  double gamma_shape = 1.0;  // for GammaRenewal

  ParetoService service() const { return {p + 1.0, x_m}; }
  double lambda_tilde() const { return 1.0 / service().mean(); }
  double lambda_r() const { return (1.0 - kappa / r) / service().mean(); }
  double rho_r() const { return lambda_r() * service().mean(); }
  double c_r() const { return pareto_tail_integral_inverse(r, p + 1.0, x_m); }
  // Limiting interarrival standard deviation and composite sigma.
  double sigma_a_tilde() const;
  double sigma_tilde() const;

  void validate() const;
};

struct Atom {
  double location = 0.0;  // remaining work / c_r
  double weight = 0.0;    // c_r / r
};

struct Snapshot {
  double scaled_time = 0.0;
  std::vector<Atom> atoms;
  double scaled_workload = 0.0;      // sum of remaining / r
  double scaled_queue_length = 0.0;  // c_r * count / r
};

struct ResponseRecord {
  double arrival_time = 0.0;    // unscaled
  double departure_time = 0.0;  // unscaled
  double size = 0.0;
};

struct SrptResult {
  std::vector<Snapshot> snapshots;
  std::vector<ResponseRecord> responses;
  std::uint64_t arrivals = 0;
  std::uint64_t departures = 0;
  std::uint64_t initial_jobs = 0;
  std::uint64_t in_system_at_end = 0;
  double served_work = 0.0;  // total processing delivered
};

struct SrptRunConfig {
  double horizon_scaled = 10.0;            // unscaled horizon is r^2 * this
  std::vector<double> snapshot_times;      // scaled time units
  std::vector<double> initial_jobs;        // remaining times, nondecreasing
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  double forced_arrival_rate = -1.0;       // >= 0 overrides lambda_r (tests)
};

SrptResult run_srpt(const ScalingParams& sp, const SrptRunConfig& cfg);

// Trace replay under SRPT or FIFO: per-job departure times, and the
// queue-length step function; used for the pointwise optimality comparison.
// Arrival times must be sorted ascending.
std::vector<double> replay_departures(const std::vector<double>& arrival_times,
                                      const std::vector<double>& sizes,
                                      bool srpt);
struct TraceEvent {
  double time = 0.0;
  std::uint64_t queue_length = 0;
};
std::vector<TraceEvent> replay_queue_length(
    const std::vector<double>& arrival_times, const std::vector<double>& sizes,
    bool srpt);

// True when the SRPT queue-length path never exceeds the FIFO path on the
// merged event grid of the two replays.
bool srpt_dominates_fifo(const std::vector<double>& arrival_times,
                         const std::vector<double>& sizes);

struct LittlesRow {
  double r = 0.0;
  double mean_response = 0.0;        // unscaled E[T^r] estimate
  double mean_response_stderr = 0.0; // batch-means stderr
  double lhs = 0.0;                  // (c_r/r) * mean response
  double mean_scaled_queue = 0.0;    // time-average of c_r Q / r
  double rhs_simulated = 0.0;        // E[v] * mean_scaled_queue
  double rhs_analytic = 0.0;         // E[v] * E[Z] from the closed form
  double ratio_to_analytic = 0.0;    // lhs / rhs_analytic
  std::uint64_t completed_jobs = 0;
  std::uint64_t busy_cycles = 0;
  bool warmup_sufficient = true;     // >= 10 busy cycles in the warm-up
};

struct LittlesConfig {
  double horizon_scaled = 1000.0;
  double warmup_fraction = 0.2;
  std::size_t batches = 30;
  std::uint64_t seed = 0;
};

LittlesRow littles_law_stats(const ScalingParams& sp, const LittlesConfig& cfg);

} // namespace rcbm
