#include "qps/acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

// Usage: acceptance [--threads N] [A1 A5 ...]
int main(int argc, char** argv) {
  qps::AcceptanceOptions opts;
  std::vector<std::string> ids;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--threads" && i + 1 < argc)
      opts.threads = std::atoi(argv[++i]);
    else
      ids.push_back(a);
  }
  if (ids.empty()) ids = qps::acceptance_ids();
  int failed = 0;
  for (const std::string& id : ids) {
    const qps::CriterionResult r = qps::run_criterion(id, opts);
    std::printf("%s\n", qps::format_result(r).c_str());
    if (!r.passed && !r.detail.empty()) std::printf("  %s\n", r.detail.c_str());
    std::fflush(stdout);
    failed += !r.passed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(ids.size()) - failed, ids.size());
  return failed == 0 ? 0 : 1;
}
