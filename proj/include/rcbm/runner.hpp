#pragma once

// Subcommand execution: turns a RunConfig into output files (CSV, JSON
// summary, gnuplot-style .dat series) plus a machine-readable summary.

#include <string>
#include <vector>

#include "rcbm/config.hpp"

namespace rcbm {

inline constexpr const char* kVersion = "1.0.0";

struct OutputFile {
  std::string name;
  std::string content;
};

struct RunOutput {
  bool pass = true;
  std::string summary_json;
  std::vector<OutputFile> files;
};

// Subcommands: "analytic eval" | "ndist eval" | "measure eval" |
// "measure mc" | "srpt run" | "validate <suite>" with suite in
// all | stationarity | law2d | ndist | measure | srpt.
RunOutput execute_subcommand(const RunConfig& cfg);

// Writes every produced file plus manifest.json under out_dir.
void write_run_outputs(const RunConfig& cfg, const RunOutput& out,
                       const std::string& out_dir);

// 17-significant-digit formatting used in all emitted tables.
std::string csv_num(double v);

} // namespace rcbm
