#pragma once

// Run configuration: one JSON document drives every subcommand.  Parsing is
// strict (unknown keys are rejected with their path) and a parsed config
// serializes back to an equivalent document.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcbm/bm_sim.hpp"
#include "rcbm/drift.hpp"
#include "rcbm/srpt_sim.hpp"

namespace rcbm {

struct ConstraintInput {
  std::optional<double> a;   // size coordinate, mapped through the drift
  std::optional<double> nu;  // or an explicit slope
  double x = 0.0;
};

struct McControls {
  std::size_t n = 100000;
  double dt = 1e-3;
  std::uint64_t seed = 42;
  bool bridge = true;
  double cdf_gap = 1e-3;
  bool zero_noise = false;
};

struct SrptControls {
  std::vector<double> r_values{10.0, 20.0, 40.0};
  double p = 2.0;
  double x_m = 1.0;
  double kappa = 1.0;
  std::string arrival = "poisson";  // or "gamma"
  double gamma_shape = 1.0;
  double horizon = 200.0;  // scaled time
  std::vector<double> snapshot_times;
  std::vector<double> q0;
  double warmup_fraction = 0.2;
  std::size_t batches = 30;
};

struct RunConfig {
  std::string subcommand;
  DriftSpec drift = DriftSpec::srpt(1.0, 1.0, 1.0, 2.0);
  InitialCondition init = InitialCondition::zero();
  std::vector<double> a_grid;
  std::vector<double> t_grid;
  std::vector<double> x_grid;
  std::vector<double> gammas{1.0, 2.0};
  std::vector<ConstraintInput> constraints;
  McControls mc;
  SrptControls srpt;
  std::size_t grid_n = 2048;
  double z_threshold = 3.0;
  double ks_threshold = 0.01;
  std::string out_dir;  // empty: env RCBM_OUT_DIR, else "out"
  int threads = 0;
};

// Parses and validates a JSON document; throws std::runtime_error with the
// offending key path on malformed input.
RunConfig parse_config(const std::string& json_text);

// Canonical JSON serialization; parse(serialize(c)) reproduces c.
std::string serialize_config(const RunConfig& cfg);

ScalingParams scaling_params_from(const SrptControls& s, double r);

} // namespace rcbm
