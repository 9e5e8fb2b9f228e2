#include "qps.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct ScenarioPtr {
  qps_scenario* p = nullptr;
  ~ScenarioPtr() { qps_scenario_free(p); }
};

int report(int status, const std::string& message) {
  nlohmann::ordered_json rec;
  rec["error"] = qps_status_name(status);
  rec["status"] = status;
  rec["message"] = message;
  std::cerr << rec.dump() << std::endl;
  return status;
}

int report_last(int status) { return report(status, qps_last_error()); }

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void log_line(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-periodic Maxwell scattering solver"};
  app.set_version_flag("--version", std::string(qps_version()));

  std::string config, scenario, output_dir = "qps_out", sweep;
  std::optional<int> modes, depth_elems, nalpha, threads;
  std::optional<double> cutoff_tol;
  std::vector<std::string> sets;
  bool check = false, quiet = false;

  app.add_option("--config", config, "Scenario config file")->check(CLI::ExistingFile);
  app.add_option("--scenario", scenario, "Built-in scenario name");
  app.add_option("--modes", modes, "Lattice mode truncation M")->check(CLI::NonNegativeNumber);
  app.add_option("--depth-elems", depth_elems, "Depth elements N")->check(CLI::PositiveNumber);
  app.add_option("--nalpha", nalpha, "Base Brillouin-cell nodes per direction")->check(CLI::PositiveNumber);
  app.add_option("--cutoff-tol", cutoff_tol, "Cutoff distance below which a mode is singular");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--output-dir", output_dir, "Directory for manifest.json, field files and tables");
  app.add_flag("--check", check, "Run the oracle and acceptance suite");
  app.add_option("--sweep", sweep, "alpha-path, convergence or none");
  app.add_option("--set", sets, "Override a config key, key=value (repeatable)");
  app.add_flag("-q,--quiet", quiet, "No progress lines");

  auto* run_cmd = app.add_subcommand("run", "Solve, sweep or check (the default)");
  run_cmd->fallthrough();
  auto* keys_cmd = app.add_subcommand("keys", "List config keys with units");
  auto* list_cmd = app.add_subcommand("scenarios", "List built-in scenarios");
  auto* show_cmd = app.add_subcommand("show", "Print the effective config");
  show_cmd->fallthrough();
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(QPS_CONFIG, e.what());
  }
  (void)run_cmd;

  if (keys_cmd->parsed()) {
    for (int i = 0; i < qps_config_key_count(); ++i) {
      const char *key, *unit, *help;
      qps_config_key(i, &key, &unit, &help);
      std::printf("%-22s %-12s %s\n", key, unit, help);
    }
    return 0;
  }
  if (list_cmd->parsed()) {
    for (int i = 0; i < qps_builtin_count(); ++i) std::printf("%s\n", qps_builtin_name(i));
    return 0;
  }
  if (!quiet) qps_set_log(log_line, nullptr);

  if (!config.empty() && !scenario.empty()) return report(QPS_CONFIG, "--config and --scenario are exclusive");

  // Nothing to solve: the whole acceptance suite.
  const bool overrides = modes || depth_elems || nalpha || cutoff_tol || !sets.empty();
  if (check && config.empty() && scenario.empty() && sweep.empty() && !overrides && !show_cmd->parsed()) {
    int failed = 0;
    const int st = qps_check(nullptr, output_dir.c_str(), threads.value_or(1), &failed);
    return st == QPS_OK ? 0 : report_last(st);
  }

  ScenarioPtr s;
  int st;
  if (!config.empty())
    st = qps_scenario_load(config.c_str(), &s.p);
  else if (!scenario.empty())
    st = qps_scenario_builtin(scenario.c_str(), &s.p);
  else if (sweep == "alpha-path")
    st = qps_scenario_builtin("wood_anomaly", &s.p);
  else
    st = qps_scenario_builtin("homogeneous_outgoing", &s.p);
  if (st != QPS_OK) return report_last(st);

  auto set = [&](const char* key, const std::string& value) {
    const int r = qps_scenario_set(s.p, key, value.c_str());
    if (r != QPS_OK) throw r;
  };
  try {
    if (modes) set("modes", std::to_string(*modes));
    if (depth_elems) set("depth_elems", std::to_string(*depth_elems));
    if (nalpha) set("quad.n_base", std::to_string(*nalpha));
    if (cutoff_tol) set("cutoff_tol", shortest(*cutoff_tol));
    if (threads) set("threads", std::to_string(*threads));
    if (!sweep.empty()) set("sweep", sweep);
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) return report(QPS_CONFIG, "--set expects key=value, got '" + kv + "'");
      set(kv.substr(0, eq).c_str(), kv.substr(eq + 1));
    }
  } catch (int r) {
    return report_last(r);
  }

  if (show_cmd->parsed()) {
    char* text = nullptr;
    st = qps_scenario_serialize(s.p, &text);
    if (st != QPS_OK) return report_last(st);
    std::fputs(text, stdout);
    qps_string_free(text);
    return 0;
  }

  int failed = 0;
  st = qps_run(s.p, output_dir.c_str(), check ? 1 : 0, &failed);
  if (st != QPS_OK) return report_last(st);
  if (!quiet) std::fprintf(stderr, "wrote %s/manifest.json\n", output_dir.c_str());
  return 0;
}
