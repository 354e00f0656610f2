#include "rcbm/config.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace rcbm {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("config: " + path + ": " + what);
}

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
}

double get_num(const json& obj, const std::string& path, const char* key,
               double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
  return obj[key].get<double>();
}

std::vector<double> get_vec(const json& obj, const std::string& path,
                            const char* key,
                            std::vector<double> fallback = {}) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_array()) fail(path + "." + key, "expected an array");
  std::vector<double> out;
  for (const auto& v : obj[key]) {
    if (v.is_string() && (v == "inf" || v == "+inf"))
      out.push_back(std::numeric_limits<double>::infinity());
    else if (v.is_number())
      out.push_back(v.get<double>());
    else
      fail(path + "." + key, "expected numbers or \"inf\"");
  }
  return out;
}

DriftSpec parse_drift(const json& j, const std::string& path) {
  require_keys(j, path, {"sigma", "kind", "kappa", "lambda", "p", "c0", "c1",
                         "q", "a", "mu", "mu_inf"});
  const double sigma = get_num(j, path, "sigma", 1.0);
  std::string kind = j.contains("kind") ? j["kind"].get<std::string>() : "srpt";
  if (kind == "srpt") {
    const double kappa = get_num(j, path, "kappa", 1.0);
    const double lambda = get_num(j, path, "lambda", 1.0);
    const double p = get_num(j, path, "p", 2.0);
    if (!(p > 1.0)) fail(path + ".p", "p must exceed 1");
    if (!(kappa > 0.0)) fail(path + ".kappa", "kappa must be positive");
    if (!(lambda > 0.0)) fail(path + ".lambda", "lambda must be positive");
    if (!(sigma > 0.0)) fail(path + ".sigma", "sigma must be positive");
    return DriftSpec::srpt(sigma, kappa, lambda, p);
  }
  if (kind == "power_law") {
    return DriftSpec::power_law(sigma, get_num(j, path, "c0", 0.0),
                                get_num(j, path, "c1", 1.0),
                                get_num(j, path, "q", 1.0));
  }
  if (kind == "tabulated") {
    return DriftSpec::tabulated(sigma, get_vec(j, path, "a"),
                                get_vec(j, path, "mu"),
                                get_num(j, path, "mu_inf", 0.0));
  }
  fail(path + ".kind", "expected srpt | power_law | tabulated");
}

InitialCondition parse_init(const json& j, const std::string& path) {
  require_keys(j, path, {"kind", "c", "scale", "a", "w"});
  std::string kind = j.contains("kind") ? j["kind"].get<std::string>() : "zero";
  if (kind == "zero") return InitialCondition::zero();
  if (kind == "ramp")
    return InitialCondition::ramp(get_num(j, path, "c", 1.0),
                                  get_num(j, path, "scale", 1.0));
  if (kind == "tabulated")
    return InitialCondition::tabulated(get_vec(j, path, "a"),
                                       get_vec(j, path, "w"));
  fail(path + ".kind", "expected zero | ramp | tabulated");
}

json drift_to_json(const DriftSpec& d) {
  json j;
  j["sigma"] = d.sigma();
  switch (d.kind()) {
    case DriftKind::Srpt:
      j["kind"] = "srpt";
      j["kappa"] = d.kappa();
      j["lambda"] = d.lambda();
      j["p"] = d.p();
      break;
    case DriftKind::PowerLaw:
      j["kind"] = "power_law";
      // mu(a) = c0 + c1 a^{-q}; recover the parameters from probes.
      j["c0"] = d.mu_inf();
      j["q"] = std::log((d.mu_at(1.0) - d.mu_inf()) /
                        (d.mu_at(2.0) - d.mu_inf())) /
               std::log(2.0);
      j["c1"] = d.mu_at(1.0) - d.mu_inf();
      break;
    case DriftKind::Tabulated:
      throw std::runtime_error(
          "config: tabulated drifts do not round-trip through serialization");
  }
  return j;
}

} // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config: expected a JSON object");
  require_keys(j, "$",
               {"subcommand", "drift", "init", "grids", "mc", "srpt",
                "constraints", "gammas", "grid_n", "thresholds", "out_dir",
                "threads"});

  RunConfig cfg;
  if (j.contains("subcommand")) {
    if (!j["subcommand"].is_string()) fail("$.subcommand", "expected a string");
    cfg.subcommand = j["subcommand"].get<std::string>();
  }
  if (j.contains("drift")) cfg.drift = parse_drift(j["drift"], "$.drift");
  if (j.contains("init")) cfg.init = parse_init(j["init"], "$.init");
  if (j.contains("grids")) {
    const auto& g = j["grids"];
    require_keys(g, "$.grids", {"a", "t", "x"});
    cfg.a_grid = get_vec(g, "$.grids", "a");
    cfg.t_grid = get_vec(g, "$.grids", "t");
    cfg.x_grid = get_vec(g, "$.grids", "x");
  }
  cfg.gammas = get_vec(j, "$", "gammas", cfg.gammas);
  if (j.contains("constraints")) {
    if (!j["constraints"].is_array()) fail("$.constraints", "expected an array");
    for (const auto& c : j["constraints"]) {
      require_keys(c, "$.constraints[]", {"a", "nu", "x"});
      ConstraintInput in;
      if (c.contains("a")) in.a = c["a"].get<double>();
      if (c.contains("nu")) in.nu = c["nu"].get<double>();
      if (!c.contains("x")) fail("$.constraints[].x", "required");
      in.x = c["x"].get<double>();
      if (!(in.x >= 0.0)) fail("$.constraints[].x", "must be >= 0");
      if (!in.a && !in.nu) fail("$.constraints[]", "need a or nu");
      cfg.constraints.push_back(in);
    }
  }
  if (j.contains("mc")) {
    const auto& m = j["mc"];
    require_keys(m, "$.mc", {"n", "dt", "seed", "bridge", "cdf_gap",
                             "zero_noise"});
    if (m.contains("n")) {
      if (!m["n"].is_number_unsigned()) fail("$.mc.n", "expected a nonnegative integer");
      cfg.mc.n = m["n"].get<std::size_t>();
    }
    cfg.mc.dt = get_num(m, "$.mc", "dt", cfg.mc.dt);
    if (!(cfg.mc.dt > 0.0)) fail("$.mc.dt", "must be positive");
    if (m.contains("seed")) {
      if (!m["seed"].is_number_unsigned())
        fail("$.mc.seed", "expected a nonnegative integer");
      cfg.mc.seed = m["seed"].get<std::uint64_t>();
    }
    if (m.contains("bridge")) cfg.mc.bridge = m["bridge"].get<bool>();
    cfg.mc.cdf_gap = get_num(m, "$.mc", "cdf_gap", cfg.mc.cdf_gap);
    if (!(cfg.mc.cdf_gap > 0.0 && cfg.mc.cdf_gap < 1.0))
      fail("$.mc.cdf_gap", "must be in (0,1)");
    if (m.contains("zero_noise")) cfg.mc.zero_noise = m["zero_noise"].get<bool>();
  }
  if (j.contains("srpt")) {
    const auto& s = j["srpt"];
    require_keys(s, "$.srpt",
                 {"r", "p", "x_m", "kappa", "arrival", "gamma_shape",
                  "horizon", "snapshots", "q0", "warmup_fraction", "batches"});
    cfg.srpt.r_values = get_vec(s, "$.srpt", "r", cfg.srpt.r_values);
    cfg.srpt.p = get_num(s, "$.srpt", "p", cfg.srpt.p);
    if (!(cfg.srpt.p > 1.0)) fail("$.srpt.p", "p must exceed 1");
    cfg.srpt.x_m = get_num(s, "$.srpt", "x_m", cfg.srpt.x_m);
    cfg.srpt.kappa = get_num(s, "$.srpt", "kappa", cfg.srpt.kappa);
    if (s.contains("arrival")) {
      cfg.srpt.arrival = s["arrival"].get<std::string>();
      if (cfg.srpt.arrival != "poisson" && cfg.srpt.arrival != "gamma")
        fail("$.srpt.arrival", "expected poisson | gamma");
    }
    cfg.srpt.gamma_shape = get_num(s, "$.srpt", "gamma_shape", 1.0);
    cfg.srpt.horizon = get_num(s, "$.srpt", "horizon", cfg.srpt.horizon);
    cfg.srpt.snapshot_times = get_vec(s, "$.srpt", "snapshots");
    cfg.srpt.q0 = get_vec(s, "$.srpt", "q0");
    cfg.srpt.warmup_fraction =
        get_num(s, "$.srpt", "warmup_fraction", cfg.srpt.warmup_fraction);
    if (s.contains("batches")) cfg.srpt.batches = s["batches"].get<std::size_t>();
  }
  if (j.contains("grid_n")) cfg.grid_n = j["grid_n"].get<std::size_t>();
  if (j.contains("thresholds")) {
    const auto& t = j["thresholds"];
    require_keys(t, "$.thresholds", {"z", "ks"});
    cfg.z_threshold = get_num(t, "$.thresholds", "z", cfg.z_threshold);
    cfg.ks_threshold = get_num(t, "$.thresholds", "ks", cfg.ks_threshold);
  }
  if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("threads")) {
    if (!j["threads"].is_number_integer() || j["threads"].get<int>() < 0)
      fail("$.threads", "expected a nonnegative integer");
    cfg.threads = j["threads"].get<int>();
  }
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  json j;
  j["subcommand"] = cfg.subcommand;
  j["drift"] = drift_to_json(cfg.drift);
  json init;
  if (cfg.init.w_inf() == 0.0) {
    init["kind"] = "zero";
  } else {
    // Reconstruct the ramp from its two parameters; tabulated profiles are
    // kept out of round-trip serialization.
    init["kind"] = "ramp";
    init["c"] = cfg.init.w_inf();
    const double w1 = cfg.init.at(1.0);
    init["scale"] = -1.0 / std::log1p(-w1 / cfg.init.w_inf());
  }
  j["init"] = init;
  j["grids"]["a"] = cfg.a_grid;
  j["grids"]["t"] = cfg.t_grid;
  j["grids"]["x"] = cfg.x_grid;
  j["gammas"] = cfg.gammas;
  json cons = json::array();
  for (const auto& c : cfg.constraints) {
    json e;
    if (c.a) e["a"] = *c.a;
    if (c.nu) e["nu"] = *c.nu;
    e["x"] = c.x;
    cons.push_back(e);
  }
  j["constraints"] = cons;
  j["mc"] = {{"n", cfg.mc.n},         {"dt", cfg.mc.dt},
             {"seed", cfg.mc.seed},   {"bridge", cfg.mc.bridge},
             {"cdf_gap", cfg.mc.cdf_gap}, {"zero_noise", cfg.mc.zero_noise}};
  j["srpt"] = {{"r", cfg.srpt.r_values},
               {"p", cfg.srpt.p},
               {"x_m", cfg.srpt.x_m},
               {"kappa", cfg.srpt.kappa},
               {"arrival", cfg.srpt.arrival},
               {"gamma_shape", cfg.srpt.gamma_shape},
               {"horizon", cfg.srpt.horizon},
               {"snapshots", cfg.srpt.snapshot_times},
               {"q0", cfg.srpt.q0},
               {"warmup_fraction", cfg.srpt.warmup_fraction},
               {"batches", cfg.srpt.batches}};
  j["grid_n"] = cfg.grid_n;
  j["thresholds"] = {{"z", cfg.z_threshold}, {"ks", cfg.ks_threshold}};
  j["out_dir"] = cfg.out_dir;
  j["threads"] = cfg.threads;
  return j.dump(2);
}

ScalingParams scaling_params_from(const SrptControls& s, double r) {
  ScalingParams sp;
  sp.r = r;
  sp.p = s.p;
  sp.x_m = s.x_m;
  sp.kappa = s.kappa;
  sp.arrival = s.arrival == "gamma" ? ArrivalKind::GammaRenewal
                                    : ArrivalKind::Poisson;
  sp.gamma_shape = s.gamma_shape;
  return sp;
}

} // namespace rcbm
