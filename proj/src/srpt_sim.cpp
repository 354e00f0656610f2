#include "rcbm/srpt_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "rcbm/measure.hpp"
#include "rcbm/rng.hpp"
#include "rcbm/stats.hpp"

namespace rcbm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Job {
  double remaining;
  std::int64_t index;
  double arrival_time;
  double size;
};

struct JobOrder {
  bool operator()(const Job& a, const Job& b) const {
    if (a.remaining != b.remaining) return a.remaining < b.remaining;
    return a.index < b.index;  // smallest index serves first among ties
  }
};

// Marsaglia-Tsang gamma variate, extended to shape < 1 by the power boost.
double gamma_variate(Rng& rng, double shape, double scale) {
  if (shape < 1.0) {
    const double u = rng.uniform_open();
    return gamma_variate(rng, shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v * scale;
  }
}

class SrptEngine {
 public:
  SrptEngine(const ScalingParams& sp, const SrptRunConfig& cfg)
      : sp_(sp),
        cfg_(cfg),
        service_(sp.service()),
        rng_(cfg.seed, cfg.replicate, 0) {
    sp.validate();
    arrival_rate_ = cfg.forced_arrival_rate >= 0.0 ? cfg.forced_arrival_rate
                                                   : sp.lambda_r();
    double prev = 0.0;
    std::int64_t idx = -static_cast<std::int64_t>(cfg.initial_jobs.size()) + 1;
    for (double v : cfg.initial_jobs) {
      if (!(v > 0.0) || v < prev)
        throw std::invalid_argument(
            "srpt: initial jobs must be positive and nondecreasing");
      jobs_.insert({v, idx++, 0.0, v});
      prev = v;
    }
    next_arrival_ = sample_interarrival();
    if (!jobs_.empty()) begin_service();
  }

  void run(double horizon, SrptResult& out) {
    std::vector<double> snaps;
    const double r2 = sp_.r * sp_.r;
    for (double t : cfg_.snapshot_times) snaps.push_back(t * r2);
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;
    while (next_snap < snaps.size() && snaps[next_snap] <= horizon) {
      advance_to(snaps[next_snap]);
      out.snapshots.push_back(take_snapshot(snaps[next_snap] / r2));
      ++next_snap;
    }
    advance_to(horizon);
    out.responses = std::move(responses_);
    out.arrivals = arrivals_;
    out.departures = departures_;
    out.initial_jobs = cfg_.initial_jobs.size();
    out.in_system_at_end = jobs_.size() + (in_service_ ? 1 : 0);
    out.served_work = served_work_;
  }

  // Integrated queue length and busy-cycle count over [from, horizon].
  void run_with_time_average(double horizon, double from, SrptResult& out,
                             double& time_avg_queue, std::uint64_t& cycles,
                             std::uint64_t& warmup_cycles) {
    measure_from_ = from;
    run(horizon, out);
    const double span = horizon - from;
    time_avg_queue = span > 0.0 ? queue_time_integral_ / span : 0.0;
    cycles = busy_cycles_;
    warmup_cycles = warmup_cycles_;
  }

 private:
  double sample_interarrival() {
    if (arrival_rate_ <= 0.0) return kInf;
    if (sp_.arrival == ArrivalKind::Poisson)
      return rng_.exponential(arrival_rate_);
    // Gamma renewal with the requested shape and mean 1/rate.
    return gamma_variate(rng_, sp_.gamma_shape,
                         1.0 / (sp_.gamma_shape * arrival_rate_));
  }

  void begin_service() {
    in_service_ = true;
    auto it = jobs_.begin();
    current_ = *it;
    jobs_.erase(it);
  }

  std::uint64_t total_in_system() const {
    return jobs_.size() + (in_service_ ? 1 : 0);
  }

  void account(double dt) {
    if (dt <= 0.0) return;
    const double upto = clock_ + dt;
    if (measure_from_ < upto) {
      const double lo = std::max(clock_, measure_from_);
      queue_time_integral_ += static_cast<double>(total_in_system()) * (upto - lo);
    }
  }

  // Move the clock forward by dt with no intervening event.
  void elapse(double dt) {
    account(dt);
    if (in_service_) {
      current_.remaining -= dt;
      served_work_ += dt;
    }
    clock_ += dt;
  }

  void advance_to(double t) {
    for (;;) {
      const double completion =
          in_service_ ? clock_ + current_.remaining : kInf;
      const double next_event = std::min(completion, next_arrival_);
      if (next_event > t) {
        elapse(t - clock_);
        return;
      }
      if (completion <= next_arrival_) {
        elapse(completion - clock_);
        responses_.push_back({current_.arrival_time, clock_, current_.size});
        ++departures_;
        in_service_ = false;
        if (!jobs_.empty()) {
          begin_service();
        } else {
          ++busy_cycles_;
          if (clock_ < measure_from_) ++warmup_cycles_;
        }
      } else {
        elapse(next_arrival_ - clock_);
        const double v = service_.sample(rng_.uniform_open());
        const Job job{v, ++arrival_index_, clock_, v};
        ++arrivals_;
        if (!in_service_) {
          current_ = job;
          in_service_ = true;
        } else if (v < current_.remaining) {
          // Strictly smaller processing time takes the server.
          jobs_.insert(current_);
          current_ = job;
        } else {
          jobs_.insert(job);
        }
        next_arrival_ = clock_ + sample_interarrival();
      }
    }
  }

  Snapshot take_snapshot(double scaled_time) const {
    Snapshot s;
    s.scaled_time = scaled_time;
    const double cr = sp_.c_r();
    const double weight = cr / sp_.r;
    double remaining_sum = 0.0;
    if (in_service_ && current_.remaining > 0.0) {
      s.atoms.push_back({current_.remaining / cr, weight});
      remaining_sum += current_.remaining;
    }
    for (const Job& j : jobs_) {
      s.atoms.push_back({j.remaining / cr, weight});
      remaining_sum += j.remaining;
    }
    s.scaled_workload = remaining_sum / sp_.r;
    s.scaled_queue_length =
        cr * static_cast<double>(total_in_system()) / sp_.r;
    return s;
  }

  const ScalingParams& sp_;
  const SrptRunConfig& cfg_;
  ParetoService service_;
  Rng rng_;
  double arrival_rate_ = 0.0;

  std::multiset<Job, JobOrder> jobs_;
  Job current_{};
  bool in_service_ = false;
  double clock_ = 0.0;
  double next_arrival_ = kInf;
  std::int64_t arrival_index_ = 0;
  double served_work_ = 0.0;
  std::uint64_t arrivals_ = 0;
  std::uint64_t departures_ = 0;
  std::uint64_t busy_cycles_ = 0;
  std::uint64_t warmup_cycles_ = 0;
  double measure_from_ = kInf;
  double queue_time_integral_ = 0.0;
  std::vector<ResponseRecord> responses_;
};

} // namespace

double ParetoService::sample(double u) const {
  return x_m * std::pow(u, -1.0 / alpha);
}

double pareto_tail_integral(double x, double alpha, double x_m) {
  if (!(alpha > 1.0)) throw std::domain_error("pareto: alpha must exceed 1");
  if (!(x_m > 0.0)) throw std::domain_error("pareto: x_m must be positive");
  const double full_mean_inv = (alpha - 1.0) / (alpha * x_m);
  if (x <= x_m) return full_mean_inv;  // the tail integral is the full mean
  return (alpha - 1.0) * std::pow(x, alpha - 1.0) /
         (alpha * std::pow(x_m, alpha));
}

double pareto_tail_integral_inverse(double y, double alpha, double x_m) {
  if (!(alpha > 1.0)) throw std::domain_error("pareto: alpha must exceed 1");
  if (!(x_m > 0.0)) throw std::domain_error("pareto: x_m must be positive");
  const double at_xm = (alpha - 1.0) / (alpha * x_m);
  if (y < at_xm) return 0.0;
  return std::pow(alpha * std::pow(x_m, alpha) * y / (alpha - 1.0),
                  1.0 / (alpha - 1.0));
}

double ScalingParams::sigma_a_tilde() const {
  const double lt = lambda_tilde();
  if (arrival == ArrivalKind::Poisson) return 1.0 / lt;
  return 1.0 / (std::sqrt(gamma_shape) * lt);
}

double ScalingParams::sigma_tilde() const {
  const double sa = sigma_a_tilde();
  const double ss2 = service().variance();
  return std::sqrt(lambda_tilde() * (sa * sa + ss2));
}

void ScalingParams::validate() const {
  if (!(p > 1.0)) throw std::invalid_argument("srpt: p must exceed 1");
  if (!(x_m > 0.0)) throw std::invalid_argument("srpt: x_m must be positive");
  if (!(kappa > 0.0)) throw std::invalid_argument("srpt: kappa must be positive");
  if (!(r > kappa)) throw std::invalid_argument("srpt: need r > kappa");
  if (arrival == ArrivalKind::GammaRenewal && !(gamma_shape > 0.0))
    throw std::invalid_argument("srpt: gamma shape must be positive");
}

SrptResult run_srpt(const ScalingParams& sp, const SrptRunConfig& cfg) {
  SrptEngine engine(sp, cfg);
  SrptResult out;
  engine.run(cfg.horizon_scaled * sp.r * sp.r, out);
  return out;
}

std::vector<double> replay_departures(const std::vector<double>& arrival_times,
                                      const std::vector<double>& sizes,
                                      bool srpt) {
  if (arrival_times.size() != sizes.size())
    throw std::invalid_argument("replay: mismatched trace");
  const std::size_t n = arrival_times.size();
  std::vector<double> departures(n);
  if (!srpt) {
    // FIFO departures in arrival order.
    double free_at = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      free_at = std::max(free_at, arrival_times[i]) + sizes[i];
      departures[i] = free_at;
    }
  } else {
    // Event-driven SRPT replay of the fixed trace.
    std::multiset<Job, JobOrder> jobs;
    bool busy = false;
    Job cur{};
    double clock = 0.0;
    std::size_t next = 0;
    while (next < n || busy || !jobs.empty()) {
      const double t_arr = next < n ? arrival_times[next] : kInf;
      const double t_dep = busy ? clock + cur.remaining : kInf;
      if (t_dep <= t_arr) {
        clock = t_dep;
        departures[static_cast<std::size_t>(cur.index)] = clock;
        busy = false;
        if (!jobs.empty()) {
          cur = *jobs.begin();
          jobs.erase(jobs.begin());
          busy = true;
        }
      } else {
        if (busy) cur.remaining -= t_arr - clock;
        clock = t_arr;
        Job job{sizes[next], static_cast<std::int64_t>(next), clock, sizes[next]};
        ++next;
        if (!busy) {
          cur = job;
          busy = true;
        } else if (job.remaining < cur.remaining) {
          jobs.insert(cur);
          cur = job;
        } else {
          jobs.insert(job);
        }
      }
    }
  }
  return departures;
}

std::vector<TraceEvent> replay_queue_length(
    const std::vector<double>& arrival_times, const std::vector<double>& sizes,
    bool srpt) {
  const std::vector<double> departures =
      replay_departures(arrival_times, sizes, srpt);
  const std::size_t n = arrival_times.size();
  // Assemble the queue-length step function from arrivals/departures.
  std::vector<std::pair<double, int>> deltas;
  for (std::size_t i = 0; i < n; ++i) {
    deltas.push_back({arrival_times[i], +1});
    deltas.push_back({departures[i], -1});
  }
  std::sort(deltas.begin(), deltas.end());
  std::vector<TraceEvent> out;
  std::int64_t q = 0;
  for (const auto& [t, d] : deltas) {
    q += d;
    if (!out.empty() && out.back().time == t)
      out.back().queue_length = static_cast<std::uint64_t>(q);
    else
      out.push_back({t, static_cast<std::uint64_t>(q)});
  }
  return out;
}

bool srpt_dominates_fifo(const std::vector<double>& arrival_times,
                         const std::vector<double>& sizes) {
  // Same arrivals on both paths, so Q_srpt(t) <= Q_fifo(t) for all t is
  // equivalent to the k-th departure happening no later under SRPT.  The
  // two replays accumulate clocks differently, so allow ulp-level slack.
  std::vector<double> a = replay_departures(arrival_times, sizes, true);
  std::vector<double> b = replay_departures(arrival_times, sizes, false);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double tol = 1e-9 * std::max(1.0, std::fabs(b[k]));
    if (a[k] > b[k] + tol) return false;
  }
  return true;
}

LittlesRow littles_law_stats(const ScalingParams& sp,
                             const LittlesConfig& cfg) {
  sp.validate();
  const double horizon = cfg.horizon_scaled * sp.r * sp.r;
  const double warmup = cfg.warmup_fraction * horizon;

  SrptRunConfig rc;
  rc.horizon_scaled = cfg.horizon_scaled;
  rc.seed = cfg.seed;
  SrptEngine engine(sp, rc);
  SrptResult res;
  double time_avg_queue = 0.0;
  std::uint64_t cycles = 0, warmup_cycles = 0;
  engine.run_with_time_average(horizon, warmup, res, time_avg_queue, cycles,
                               warmup_cycles);

  // Batch means over completions of jobs arriving after the warm-up.
  std::vector<double> resp;
  for (const auto& r : res.responses)
    if (r.arrival_time >= warmup)
      resp.push_back(r.departure_time - r.arrival_time);

  LittlesRow row;
  row.r = sp.r;
  row.completed_jobs = resp.size();
  row.busy_cycles = cycles;
  row.warmup_sufficient = warmup_cycles >= 10;
  if (resp.size() < cfg.batches * 2) return row;

  MeanVar batch_acc;
  const std::size_t per = resp.size() / cfg.batches;
  for (std::size_t b = 0; b < cfg.batches; ++b) {
    MeanVar m;
    for (std::size_t k = b * per; k < (b + 1) * per; ++k) m.add(resp[k]);
    batch_acc.add(m.mean());
  }
  row.mean_response = batch_acc.mean();
  row.mean_response_stderr = batch_acc.stderr_mean();

  const double cr_over_r = sp.c_r() / sp.r;
  row.lhs = cr_over_r * row.mean_response;
  row.mean_scaled_queue = sp.c_r() * time_avg_queue / sp.r;
  const double ev = sp.service().mean();
  row.rhs_simulated = ev * row.mean_scaled_queue;
  row.rhs_analytic = ev * srpt_queue_mean(sp.kappa, sp.lambda_tilde(), sp.p,
                                          sp.sigma_tilde());
  row.ratio_to_analytic = row.lhs / row.rhs_analytic;
  return row;
}

} // namespace rcbm
