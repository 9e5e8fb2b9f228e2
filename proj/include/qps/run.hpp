#pragma once

#include "qps/scenario.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qps {

struct RunOptions {
  std::string output_dir = "qps_out";
  bool check = false;                    // run the acceptance criteria tied to the scenario
  std::function<void(const std::string&)> log;
};

struct RunReport {
  int failed_criteria = 0;
  std::string manifest_path;
};

// Solve, sweep and check as the scenario requests; writes manifest.json, fields_cell_<j1>_<j2>.bin and tables/*.csv.
RunReport run_scenario(const Scenario& s, const RunOptions& opts);
// The listed acceptance criteria only (all of them when ids is empty).
RunReport run_acceptance(const std::vector<std::string>& ids, const RunOptions& opts, int threads = 1);

// Criteria exercised by a built-in scenario under --check.
std::vector<std::string> scenario_suite(const std::string& name);

}  // namespace qps
