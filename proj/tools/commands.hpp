#pragma once

#include <string>

#include "artifacts.hpp"
#include "config.hpp"

namespace critlab::cli {

/// Bad invocation that is not a config problem (e.g. missing manifest); exit 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunContext {
  ExperimentConfig config;
  fs::path out;
  int threads = 1;
  std::string command;
  std::vector<std::string> outputs;  ///< files written, relative to `out`

  void write(const std::string& name, const std::string& text);
  void write(const std::string& name, const Json& j);
  /// `<analysis>.report.json` plus the optional `<analysis>.curves.json`.
  void report(const std::string& analysis, const Json& body, const Json& curves = Json());
};

void simulate(RunContext& ctx);
void analyze(RunContext& ctx);
void charfunc(RunContext& ctx);
void dyson(RunContext& ctx);
void gap(RunContext& ctx);
void newman(RunContext& ctx);

/// Executes the stages listed in run.stages, in order.
void run_stages(RunContext& ctx);

/// Append this run to manifest.json (versions, seed, config hash, wall time).
void write_manifest(const RunContext& ctx, double wall_seconds);

/// Merge every `<analysis>.report.json` in `dir` into report.json and emit
/// one .dat file per fitted relation. Returns the merged document.
Json report(const fs::path& dir);

}  // namespace critlab::cli
