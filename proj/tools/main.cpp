#include "pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

using namespace resnls;
using namespace resnls::pipeline;

namespace {

struct Flags {
  std::string config_file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> direct;
};

void add_options(CLI::App* sub, Flags& f) {
  sub->add_option("-c,--config", f.config_file, "key = value settings file");
  sub->add_option("-s,--set", f.sets, "override one setting, KEY=VALUE (repeatable)");
  for (const char* key : {"out", "seed", "potential", "param", "eps", "T", "dt", "sign"})
    sub->add_option(std::string("--") + key, f.direct[key], std::string("shorthand for --set ") + key + "=...");
}

Config gather(const Flags& f) {
  Config cfg = f.config_file.empty() ? Config{} : Config::load(f.config_file);
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects KEY=VALUE, got '" + s + "'");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  for (const auto& [k, v] : f.direct)
    if (!v.empty()) cfg.set(k, v);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cubic NLS with a resonant potential: scattering, distorted transforms and long-time asymptotics"};
  app.require_subcommand(1);
  Flags flags;
  const std::map<std::string, std::string> help{
      {"scatter", "Jost solutions, T/R, classification and identity residuals"},
      {"dft-check", "Plancherel, intertwining, round-trip and jump checks of the distorted transform"},
      {"nsd-check", "decomposition of the nonlinear spectral distribution and trilinear identities"},
      {"linear", "decay, local decay and smoothing constants of the linear flow"},
      {"evolve", "nonlinear evolution with conservation and scheme cross-validation"},
      {"asymptotics", "profile norms, asymptotic ODE, modified scattering and physical asymptote"},
      {"all", "every stage in order"}};
  for (const auto& name : RunConfig::commands()) add_options(app.add_subcommand(name, help.at(name)), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    cfg = RunConfig::resolve(command, gather(flags));
  } catch (const ConfigError& e) {
    std::cerr << json{{"stage", "config"}, {"invariant", "configuration"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }

  const std::vector<StageResult> stages = run(cfg);
  int code = 1;
  try {
    code = write_outputs(cfg, stages);
  } catch (const std::exception& e) {
    std::cerr << json{{"stage", "output"}, {"invariant", "write"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  for (const auto& s : stages) {
    std::cout << (s.pass() ? "PASS " : "FAIL ") << s.stage << " (" << s.seconds << " s)\n";
    for (const auto& ch : s.checks) {
      if (!ch.evaluated) {
        std::cout << "  skip " << ch.name << "\n";
        continue;
      }
      std::cout << "  " << (ch.pass ? "ok   " : "FAIL ") << ch.name << " = " << ch.value << " " << ch.relation << " "
                << ch.limit << "\n";
    }
    if (!s.error.empty()) std::cout << "  error: " << s.error << "\n";
  }
  if (code != 0) std::cerr << failure_record(stages).dump() << "\n";
  return code;
}
