#pragma once

#include "resnls/io.hpp"
#include "resnls/nlsolve.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace resnls::pipeline {

using json = nlohmann::json;

struct Check {
  std::string name;
  double value = 0;
  double limit = 0;
  std::string relation;   // "<", ">" or "=="
  bool evaluated = true;  // false when the run was too short or the mode makes the check meaningless
  bool pass = true;
};

struct StageResult {
  std::string stage;
  std::vector<Check> checks;
  json summary = json::object();
  std::vector<CsvTable> tables;
  double seconds = 0;
  std::string error;  // exception text when the stage stopped early

  void below(const std::string& name, double value, double limit);
  void above(const std::string& name, double value, double limit);
  void require(const std::string& name, bool ok);
  void skip(const std::string& name, double limit, const std::string& relation);
  bool pass() const;
  const Check* first_failure() const;
  json to_json() const;
};

struct RunConfig {
  std::string command;
  std::string out = "out";
  unsigned seed = 7;
  int samples = 20;

  std::string potential = "pt";
  double param = 1;
  double L = 40, kmax = 16;
  int nx = 4096, nk = 2048;

  int nsd_n = 256;
  double nsd_L = 16, nsd_t = 0;
  bool nsd_refine = true;

  double lin_L = 1024, lin_tmax = 100, smoothing_t = 50;
  int lin_n = 8192;
  bool lin_refine = true;

  std::string nl_potential = "resonance-bump";
  double nl_param = 0.5;
  double nl_L = 1024;
  int nl_n = 8192;
  double eps = 0.05, T = 200, dt = 0.02;
  int sign = -1;
  bool crossval = true;
  double cross_L = 512, cross_T = 20;
  bool cross_eps = false;

  static const std::vector<std::string>& keys();
  static const std::vector<std::string>& commands();
  // Applies the settings on top of the defaults and validates everything; throws ConfigError.
  static RunConfig resolve(const std::string& command, const Config& cfg);
  json to_json() const;
};

StageResult run_scatter(const RunConfig& c);
StageResult run_dft_check(const RunConfig& c);
StageResult run_nsd_check(const RunConfig& c);
StageResult run_linear(const RunConfig& c);
// `keep` receives the trajectory so that the asymptotics stage can reuse it.
StageResult run_evolve(const RunConfig& c, Trajectory* keep = nullptr);
StageResult run_asymptotics(const RunConfig& c, const Trajectory* given = nullptr);

// Runs every stage of the command; exceptions inside a stage end that stage with a failure.
std::vector<StageResult> run(const RunConfig& c);

// Writes <out>/<stage>_<table>.csv, manifest.json and result.json. Returns 0 on pass, 1 otherwise.
int write_outputs(const RunConfig& c, const std::vector<StageResult>& stages);

// Machine-readable record of the first violated invariant, or null when everything passed.
json failure_record(const std::vector<StageResult>& stages);

}  // namespace resnls::pipeline
