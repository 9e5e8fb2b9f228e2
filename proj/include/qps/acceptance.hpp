#pragma once

#include <string>
#include <vector>

namespace qps {

struct CriterionResult {
  std::string id;      // A1 ... A9
  std::string title;
  bool passed = false;
  double seconds = 0.0;
  double time_limit = 0.0;
  std::vector<std::pair<std::string, double>> values;  // measured quantities
  std::string detail;
};

struct AcceptanceOptions {
  int threads = 1;
};

CriterionResult check_smw_identity(const AcceptanceOptions& opts = {});       // A1
CriterionResult check_dtn_signs(const AcceptanceOptions& opts = {});          // A2
CriterionResult check_manufactured_mode(const AcceptanceOptions& opts = {});  // A3
CriterionResult check_bloch_round_trip(const AcceptanceOptions& opts = {});   // A4
CriterionResult check_near_cutoff(const AcceptanceOptions& opts = {});        // A5
CriterionResult check_sqrt_decomposition(const AcceptanceOptions& opts = {}); // A6
CriterionResult check_defect(const AcceptanceOptions& opts = {});             // A7
CriterionResult check_energy_balance(const AcceptanceOptions& opts = {});     // A8
CriterionResult check_divergence(const AcceptanceOptions& opts = {});         // A9

std::vector<std::string> acceptance_ids();
CriterionResult run_criterion(const std::string& id, const AcceptanceOptions& opts = {});

// "PASS A1 <title> (<values>, <seconds> s)"
std::string format_result(const CriterionResult& r);

}  // namespace qps
