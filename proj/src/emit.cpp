#include "rcbm/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rcbm/analytic.hpp"
#include "rcbm/bm_sim.hpp"
#include "rcbm/measure.hpp"
#include "rcbm/stats.hpp"
#include "rcbm/validate.hpp"

namespace rcbm {

namespace {

using nlohmann::json;

std::string quote_csv(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string reports_csv(const std::vector<ExperimentReport>& reports) {
  std::ostringstream os;
  os << "name,parameters,analytic,mc,stderr,statistic,threshold,pass,"
        "runtime_seconds,note\n";
  for (const auto& r : reports) {
    os << quote_csv(r.name) << ',' << quote_csv(r.parameters) << ','
       << csv_num(r.analytic_value) << ',' << csv_num(r.mc_estimate) << ','
       << csv_num(r.stderr_est) << ',' << csv_num(r.z_score) << ','
       << csv_num(r.threshold) << ',' << (r.pass ? 1 : 0) << ','
       << csv_num(r.runtime_seconds) << ',' << quote_csv(r.note) << '\n';
  }
  return os.str();
}

json reports_json(const std::vector<ExperimentReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) {
    arr.push_back({{"name", r.name},
                   {"parameters", r.parameters},
                   {"analytic", r.analytic_value},
                   {"mc", r.mc_estimate},
                   {"stderr", r.stderr_est},
                   {"statistic", r.z_score},
                   {"threshold", r.threshold},
                   {"pass", r.pass},
                   {"runtime_seconds", r.runtime_seconds},
                   {"note", r.note}});
  }
  return arr;
}

ConstraintSet constraints_from(const RunConfig& cfg) {
  if (cfg.constraints.empty())
    throw std::runtime_error("ndist: no constraints configured");
  ConstraintSet cs;
  cs.sigma = cfg.drift.sigma();
  for (const auto& c : cfg.constraints) {
    const double nu = c.nu ? *c.nu : cfg.drift.mu_at(*c.a);
    cs.entries.push_back({nu, c.x});
  }
  for (std::size_t i = 1; i < cs.entries.size(); ++i)
    if (!(cs.entries[i].nu < cs.entries[i - 1].nu))
      throw std::runtime_error("ndist: slopes must strictly decrease");
  return cs;
}

RunOutput run_analytic_eval(const RunConfig& cfg) {
  RunOutput out;
  const auto& d = cfg.drift;
  std::vector<double> xs = cfg.x_grid;
  if (xs.empty()) xs = {0.25, 0.5, 1.0, 2.0};
  std::vector<double> as = cfg.a_grid;
  if (as.empty()) as = {0.5, 1.0, 2.0};

  std::ostringstream marg;
  marg << "a,mu,x,stationary_cdf\n";
  for (double a : as)
    for (double x : xs)
      marg << csv_num(a) << ',' << csv_num(d.mu_at(a)) << ',' << csv_num(x)
           << ',' << csv_num(stationary_max_cdf(d, a, x)) << '\n';
  out.files.push_back({"analytic_marginal.csv", marg.str()});

  std::ostringstream mom;
  mom << "a,mu,gamma,moment\n";
  for (double a : as)
    for (double g : cfg.gammas)
      mom << csv_num(a) << ',' << csv_num(d.mu_at(a)) << ',' << csv_num(g)
          << ',' << csv_num(stationary_max_moment(d, a, g)) << '\n';
  out.files.push_back({"analytic_moments.csv", mom.str()});

  std::ostringstream cov;
  cov << "a1,a2,covariance,correlation\n";
  for (std::size_t i = 0; i < as.size(); ++i)
    for (std::size_t j = i + 1; j < as.size(); ++j)
      cov << csv_num(as[i]) << ',' << csv_num(as[j]) << ','
          << csv_num(covariance_max(d, as[i], as[j])) << ','
          << csv_num(correlation_max(d, as[i], as[j])) << '\n';
  out.files.push_back({"analytic_cov.csv", cov.str()});

  std::ostringstream j2;
  j2 << "a1,a2,x1,x2,joint_cdf\n";
  for (std::size_t i = 0; i < as.size(); ++i)
    for (std::size_t j = i + 1; j < as.size(); ++j)
      for (double x1 : xs)
        for (double x2 : xs)
          j2 << csv_num(as[i]) << ',' << csv_num(as[j]) << ',' << csv_num(x1)
             << ',' << csv_num(x2) << ','
             << csv_num(joint_cdf_2d(d, as[i], as[j], x1, x2)) << '\n';
  out.files.push_back({"analytic_joint2d.csv", j2.str()});

  json summary;
  summary["subcommand"] = "analytic eval";
  summary["pass"] = true;
  summary["files"] = {"analytic_marginal.csv", "analytic_moments.csv",
                      "analytic_cov.csv", "analytic_joint2d.csv"};
  out.summary_json = summary.dump(2);
  return out;
}

RunOutput run_ndist_eval(const RunConfig& cfg) {
  RunOutput out;
  const ConstraintSet raw = constraints_from(cfg);
  const auto rr = reduce_constraints(raw);
  const auto taus = rr.reduced.intersection_times();
  const double analytic = joint_cdf_nd(rr.reduced, cfg.grid_n);
  McJointOptions mo;
  mo.n_paths = cfg.mc.n;
  mo.dt = cfg.mc.dt;
  mo.seed = cfg.mc.seed;
  mo.bridge = cfg.mc.bridge;
  mo.threads = cfg.threads;
  const auto mc = mc_joint_cdf(raw, mo);

  std::ostringstream csv;
  csv << "kept_nu,kept_x,removed_indices,taus,analytic,mc,stderr\n";
  auto join = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
      s += (i ? ";" : "") + csv_num(v[i]);
    return s;
  };
  std::vector<double> knu, kx, rem;
  for (const auto& e : rr.reduced.entries) {
    knu.push_back(e.nu);
    kx.push_back(e.x);
  }
  for (auto i : rr.removed) rem.push_back(static_cast<double>(i));
  csv << quote_csv(join(knu)) << ',' << quote_csv(join(kx)) << ','
      << quote_csv(join(rem)) << ',' << quote_csv(join(taus)) << ','
      << csv_num(analytic) << ',' << csv_num(mc.estimate) << ','
      << csv_num(mc.stderr_est) << '\n';
  out.files.push_back({"ndist_eval.csv", csv.str()});

  // Plot data: the raw constraint lines and their lower envelope.
  const double s_max =
      taus.empty() ? 1.0 : taus.back() * 5.0 / 3.0;
  std::ostringstream lines, env;
  lines << "# s";
  for (std::size_t i = 0; i < raw.entries.size(); ++i) lines << " line" << i;
  lines << '\n';
  env << "# s envelope\n";
  const int steps = 200;
  for (int k = 0; k <= steps; ++k) {
    const double s = s_max * k / steps;
    lines << csv_num(s);
    for (const auto& e : raw.entries) lines << ' ' << csv_num(e.nu * s + e.x);
    lines << '\n';
    env << csv_num(s) << ' ' << csv_num(raw.envelope(s)) << '\n';
  }
  out.files.push_back({"ndist_lines.dat", lines.str()});
  out.files.push_back({"ndist_envelope.dat", env.str()});

  const double z = mc.stderr_est > 0.0
                       ? (mc.estimate - analytic) / mc.stderr_est
                       : 0.0;
  out.pass = std::fabs(z) <= cfg.z_threshold;
  json summary;
  summary["subcommand"] = "ndist eval";
  summary["analytic"] = analytic;
  summary["mc"] = mc.estimate;
  summary["stderr"] = mc.stderr_est;
  summary["z"] = z;
  summary["removed"] = rr.removed;
  summary["taus"] = taus;
  summary["pass"] = out.pass;
  out.summary_json = summary.dump(2);
  return out;
}

RunOutput run_measure_eval(const RunConfig& cfg) {
  RunOutput out;
  if (cfg.drift.kind() != DriftKind::Srpt)
    throw std::runtime_error("measure eval: SRPT drift required");
  const double kappa = cfg.drift.kappa();
  const double lambda = cfg.drift.lambda();
  const double p = cfg.drift.p();
  const double sigma = cfg.drift.sigma();

  std::ostringstream csv;
  csv << "kappa,lambda,p,sigma,queue_mean,queue_variance\n";
  csv << csv_num(kappa) << ',' << csv_num(lambda) << ',' << csv_num(p) << ','
      << csv_num(sigma) << ',' << csv_num(srpt_queue_mean(kappa, lambda, p, sigma))
      << ',' << csv_num(srpt_queue_variance(kappa, lambda, p, sigma)) << '\n';
  out.files.push_back({"measure_eval.csv", csv.str()});

  std::vector<double> as = cfg.a_grid;
  if (as.empty()) as = {0.5, 1.0, 2.0, 4.0};
  std::ostringstream inc;
  inc << "a1,a2,cov_increment\n";
  for (std::size_t i = 0; i < as.size(); ++i)
    for (std::size_t j = i + 1; j < as.size(); ++j)
      inc << csv_num(as[i]) << ',' << csv_num(as[j]) << ','
          << csv_num(srpt_cov_increment(as[i], as[j], kappa, lambda, p, sigma))
          << '\n';
  out.files.push_back({"measure_cov_increment.csv", inc.str()});

  json summary;
  summary["subcommand"] = "measure eval";
  summary["queue_mean"] = srpt_queue_mean(kappa, lambda, p, sigma);
  summary["queue_variance"] = srpt_queue_variance(kappa, lambda, p, sigma);
  summary["pass"] = true;
  out.summary_json = summary.dump(2);
  out.pass = true;
  return out;
}

RunOutput run_measure_mc(const RunConfig& cfg) {
  RunOutput out;
  QueueMcOptions q;
  q.replicates = cfg.mc.n;
  q.dt = cfg.mc.dt;
  q.seed = cfg.mc.seed;
  q.bridge = cfg.mc.bridge;
  q.threads = cfg.threads;
  const auto est = mc_queue_moments(cfg.drift, q);
  const double kappa = cfg.drift.kappa();
  const double lambda = cfg.drift.lambda();
  const double p = cfg.drift.p();
  const double sigma = cfg.drift.sigma();
  const double mean_cf = srpt_queue_mean(kappa, lambda, p, sigma);
  const double var_cf = srpt_queue_variance(kappa, lambda, p, sigma);

  std::ostringstream csv;
  csv << "kappa,lambda,p,sigma,replicates,analytic_mean,mc_mean,mean_stderr,"
         "analytic_variance,mc_variance,variance_stderr,horizon\n";
  csv << csv_num(kappa) << ',' << csv_num(lambda) << ',' << csv_num(p) << ','
      << csv_num(sigma) << ',' << est.replicates << ',' << csv_num(mean_cf)
      << ',' << csv_num(est.mean) << ',' << csv_num(est.mean_stderr) << ','
      << csv_num(var_cf) << ',' << csv_num(est.variance) << ','
      << csv_num(est.variance_stderr) << ',' << csv_num(est.horizon) << '\n';
  out.files.push_back({"measure_mc.csv", csv.str()});

  json summary;
  summary["subcommand"] = "measure mc";
  summary["mc_mean"] = est.mean;
  summary["mc_variance"] = est.variance;
  summary["analytic_mean"] = mean_cf;
  summary["analytic_variance"] = var_cf;
  summary["pass"] = true;
  out.summary_json = summary.dump(2);
  return out;
}

RunOutput run_srpt_cmd(const RunConfig& cfg) {
  RunOutput out;
  std::ostringstream summ;
  summ << "r,scaled_workload_mean,scaled_queue_mean,mean_response,"
          "littles_lhs,littles_rhs_simulated,littles_rhs_analytic,ratio\n";
  json rows = json::array();
  for (double r : cfg.srpt.r_values) {
    std::ostringstream snaps;
    snaps << "t,atom_location,atom_weight\n";
    const ScalingParams sp = scaling_params_from(cfg.srpt, r);
    SrptRunConfig rc;
    rc.horizon_scaled = cfg.srpt.horizon;
    rc.seed = cfg.mc.seed;
    rc.initial_jobs = cfg.srpt.q0;
    rc.snapshot_times = cfg.srpt.snapshot_times;
    if (rc.snapshot_times.empty()) {
      const double warm = cfg.srpt.warmup_fraction * cfg.srpt.horizon;
      for (double t = warm; t <= cfg.srpt.horizon; t += 0.25)
        rc.snapshot_times.push_back(t);
    }
    const auto res = run_srpt(sp, rc);
    MeanVar wl, ql;
    for (const auto& s : res.snapshots) {
      wl.add(s.scaled_workload);
      ql.add(s.scaled_queue_length);
      for (const auto& a : s.atoms)
        snaps << csv_num(s.scaled_time) << ',' << csv_num(a.location) << ','
              << csv_num(a.weight) << '\n';
    }
    LittlesConfig lc;
    lc.horizon_scaled = cfg.srpt.horizon;
    lc.warmup_fraction = cfg.srpt.warmup_fraction;
    lc.batches = cfg.srpt.batches;
    lc.seed = cfg.mc.seed + 1;
    const auto row = littles_law_stats(sp, lc);
    summ << csv_num(r) << ',' << csv_num(wl.mean()) << ',' << csv_num(ql.mean())
         << ',' << csv_num(row.mean_response) << ',' << csv_num(row.lhs) << ','
         << csv_num(row.rhs_simulated) << ',' << csv_num(row.rhs_analytic)
         << ',' << csv_num(row.ratio_to_analytic) << '\n';
    rows.push_back({{"r", r},
                    {"scaled_workload_mean", wl.mean()},
                    {"scaled_queue_mean", ql.mean()},
                    {"littles_ratio", row.ratio_to_analytic},
                    {"warmup_sufficient", row.warmup_sufficient}});
    std::ostringstream fname;
    fname << "srpt_snapshots_r" << r << ".csv";
    out.files.push_back({fname.str(), snaps.str()});
  }
  out.files.push_back({"srpt_summary.csv", summ.str()});
  json summary;
  summary["subcommand"] = "srpt run";
  summary["rows"] = rows;
  summary["pass"] = true;
  out.summary_json = summary.dump(2);
  return out;
}

RunOutput run_field_sample(const RunConfig& cfg) {
  RunOutput out;
  std::vector<double> a = cfg.a_grid;
  if (a.empty()) a = {0.25, 0.5, 1.0, 2.0, 4.0};
  FieldOptions fo;
  fo.dt = cfg.mc.dt;
  fo.horizon = cfg.t_grid.empty() ? 1.0 : cfg.t_grid.back();
  fo.seed = cfg.mc.seed;
  fo.zero_noise = cfg.mc.zero_noise;
  const auto f = sample_field(cfg.drift, cfg.init, a, fo);
  std::ostringstream csv;
  csv << "t,a,chi,w\n";
  for (std::size_t k = 0; k < f.t_grid.size(); ++k)
    for (std::size_t j = 0; j < a.size(); ++j)
      csv << csv_num(f.t_grid[k]) << ',' << csv_num(a[j]) << ','
          << csv_num(f.chi[k][j]) << ',' << csv_num(f.w_field[k][j]) << '\n';
  out.files.push_back({"field.csv", csv.str()});
  json summary;
  summary["subcommand"] = "field sample";
  summary["rows"] = f.t_grid.size() * a.size();
  summary["pass"] = true;
  out.summary_json = summary.dump(2);
  return out;
}

RunOutput run_validate(const RunConfig& cfg, const std::string& suite) {
  std::vector<ExperimentReport> reports;
  auto append = [&](std::vector<ExperimentReport> r) {
    reports.insert(reports.end(), r.begin(), r.end());
  };

  if (suite == "stationarity" || suite == "all") {
    StationaritySweepConfig sc;
    if (!cfg.a_grid.empty()) sc.a_values = cfg.a_grid;
    sc.t_values = cfg.t_grid;
    sc.n_paths = cfg.mc.n;
    sc.dt = cfg.mc.dt;
    sc.cdf_gap = cfg.mc.cdf_gap;
    sc.seed = cfg.mc.seed;
    sc.ks_threshold = cfg.ks_threshold;
    sc.bridge = cfg.mc.bridge;
    append(stationarity_sweep(cfg.drift, cfg.init, sc));
    MomentSweepConfig mc2;
    mc2.a = cfg.a_grid.empty() ? 1.0 : cfg.a_grid.front();
    mc2.gammas = cfg.gammas;
    mc2.n_paths = cfg.mc.n;
    mc2.dt = cfg.mc.dt;
    mc2.cdf_gap = cfg.mc.cdf_gap;
    mc2.seed = cfg.mc.seed + 1;
    mc2.z_threshold = cfg.z_threshold;
    append(moment_sweep(cfg.drift, cfg.init, mc2));
    RecurrenceCheckConfig rc;
    rc.dt = cfg.mc.dt;
    rc.seed = cfg.mc.seed + 2;
    append(recurrence_check(cfg.drift, rc));
  }
  std::string law2d_csv;
  if (suite == "law2d" || suite == "all") {
    Law2dConfig lc;
    lc.sigma = cfg.drift.sigma();
    double a1 = 1.0, a2 = std::numeric_limits<double>::infinity();
    if (cfg.a_grid.size() >= 2) {
      a1 = cfg.a_grid[0];
      a2 = cfg.a_grid[1];
    }
    lc.nu1 = cfg.drift.mu_at(a1);
    lc.nu2 = cfg.drift.mu_at(a2);
    if (!cfg.x_grid.empty()) {
      lc.x1_values = cfg.x_grid;
      lc.x2_offsets = cfg.x_grid;
    }
    lc.n_paths = cfg.mc.n;
    lc.dt = cfg.mc.dt;
    lc.seed = cfg.mc.seed;
    lc.z_threshold = cfg.z_threshold;
    const auto grid_reports = law_2d_grid(lc);
    // Fixed-schema table of the joint-law cells.
    std::ostringstream gcsv;
    gcsv << "a1,a2,x1,x2,analytic,mc,stderr,z\n";
    std::size_t cell = 0;
    for (const auto& r : grid_reports) {
      if (r.name.rfind("law2d joint", 0) != 0) continue;
      const double x1 = lc.x1_values[cell / lc.x2_offsets.size()];
      const double x2 = x1 + lc.x2_offsets[cell % lc.x2_offsets.size()];
      ++cell;
      gcsv << csv_num(a1) << ',' << csv_num(a2) << ',' << csv_num(x1) << ','
           << csv_num(x2) << ',' << csv_num(r.analytic_value) << ','
           << csv_num(r.mc_estimate) << ',' << csv_num(r.stderr_est) << ','
           << csv_num(r.z_score) << '\n';
    }
    law2d_csv = gcsv.str();
    append(grid_reports);
    CovarianceCheckConfig cc;
    cc.sigma = cfg.drift.sigma();
    cc.seed = cfg.mc.seed + 3;
    append(covariance_check(cc));
    append(density_quadrature_check(2.0, 1.0, 1.0));
  }
  if (suite == "ndist" || suite == "all") {
    NdistCheckConfig nc;
    nc.n_paths = cfg.mc.n;
    nc.dt = cfg.mc.dt;
    nc.seed = cfg.mc.seed;
    nc.grid_n = cfg.grid_n;
    nc.z_threshold = cfg.z_threshold;
    nc.threads = cfg.threads;
    append(ndist_check(nc));
    append({kernel_identity_check(10000, cfg.mc.seed + 4)});
  }
  if (suite == "measure" || suite == "all") {
    MeasureCheckConfig mc3;
    if (cfg.drift.kind() == DriftKind::Srpt) {
      mc3.kappa = cfg.drift.kappa();
      mc3.lambda = cfg.drift.lambda();
      mc3.p = cfg.drift.p();
      mc3.sigma = cfg.drift.sigma();
    }
    mc3.replicates = cfg.mc.n;
    mc3.dt = cfg.mc.dt;
    mc3.seed = cfg.mc.seed;
    mc3.threads = cfg.threads;
    append(measure_check(mc3));
  }
  if (suite == "srpt" || suite == "all") {
    SrptSuiteConfig sc;
    sc.r_values = cfg.srpt.r_values;
    sc.p = cfg.srpt.p;
    sc.x_m = cfg.srpt.x_m;
    sc.kappa = cfg.srpt.kappa;
    sc.horizon_scaled = cfg.srpt.horizon;
    sc.warmup_fraction = cfg.srpt.warmup_fraction;
    sc.batches = cfg.srpt.batches;
    sc.seed = cfg.mc.seed;
    append(srpt_suite(sc));
  }
  if (reports.empty() && suite != "all")
    throw std::runtime_error("validate: unknown suite '" + suite + "'");

  RunOutput out;
  out.pass = all_pass(reports);
  out.files.push_back({"validate_" + suite + ".csv", reports_csv(reports)});
  if (!law2d_csv.empty()) out.files.push_back({"law2d_grid.csv", law2d_csv});

  // Plot series: one (x, statistic) pair per report index.
  std::ostringstream dat;
  dat << "# index statistic threshold\n";
  for (std::size_t i = 0; i < reports.size(); ++i)
    dat << i << ' ' << csv_num(reports[i].z_score) << ' '
        << csv_num(reports[i].threshold) << '\n';
  out.files.push_back({"validate_" + suite + ".dat", dat.str()});

  json summary;
  summary["subcommand"] = "validate " + suite;
  summary["pass"] = out.pass;
  summary["n_reports"] = reports.size();
  summary["reports"] = reports_json(reports);
  out.summary_json = summary.dump(2);
  return out;
}

} // namespace

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunOutput execute_subcommand(const RunConfig& cfg) {
  const std::string& sc = cfg.subcommand;
  if (sc == "analytic eval") return run_analytic_eval(cfg);
  if (sc == "ndist eval") return run_ndist_eval(cfg);
  if (sc == "measure eval") return run_measure_eval(cfg);
  if (sc == "measure mc") return run_measure_mc(cfg);
  if (sc == "srpt run") return run_srpt_cmd(cfg);
  if (sc == "field sample") return run_field_sample(cfg);
  if (sc.rfind("validate", 0) == 0) {
    std::string suite = sc.size() > 9 ? sc.substr(9) : "all";
    if (suite.empty()) suite = "all";
    return run_validate(cfg, suite);
  }
  throw std::runtime_error("unknown subcommand '" + sc + "'");
}

void write_run_outputs(const RunConfig& cfg, const RunOutput& out,
                       const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto write = [&](const std::string& name, const std::string& content) {
    const fs::path p = fs::path(out_dir) / name;
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << content;
    if (!f) throw std::runtime_error("failed writing " + p.string());
  };
  json manifest;
  manifest["version"] = kVersion;
  manifest["seed"] = cfg.mc.seed;
  manifest["config"] = json::parse(serialize_config(cfg));
  json names = json::array();
  for (const auto& f : out.files) names.push_back(f.name);
  names.push_back("summary.json");
  manifest["generated_files"] = names;
  for (const auto& f : out.files) write(f.name, f.content);
  write("summary.json", out.summary_json);
  write("manifest.json", manifest.dump(2));
}

} // namespace rcbm
