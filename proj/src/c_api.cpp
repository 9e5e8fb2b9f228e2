#include "qps.h"

#include "qps/run.hpp"
#include "qps/scenario.hpp"
#include "qps/studies.hpp"

#include <cstdlib>
#include <cstring>
#include <mutex>
#include <sstream>
#include <variant>

struct qps_scenario {
  qps::Scenario s;
};

struct qps_solution {
  double R = 0.0;
  std::variant<qps::CellSolution, qps::StripSolution> u;
};

namespace {

thread_local std::string last_error;

std::mutex log_mutex;
qps_log_fn log_fn = nullptr;
void* log_user = nullptr;

int set_error(int code, const std::string& msg) {
  last_error = msg;
  return code;
}

template <class F>
int guarded(F&& f) {
  last_error.clear();
  try {
    return f();
  } catch (const qps::Error& e) {
    return set_error(static_cast<int>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(QPS_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(QPS_INTERNAL, e.what());
  }
}

qps::RunOptions run_options(const char* output_dir) {
  qps::RunOptions o;
  if (output_dir && *output_dir) o.output_dir = output_dir;
  o.log = [](const std::string& line) {
    std::lock_guard<std::mutex> lock(log_mutex);
    if (log_fn) log_fn(line.c_str(), log_user);
  };
  return o;
}

int adopt(qps::Scenario s, qps_scenario** out) {
  *out = new qps_scenario{std::move(s)};
  return QPS_OK;
}

}  // namespace

extern "C" {

const char* qps_version(void) { return QPS_VERSION; }

const char* qps_last_error(void) { return last_error.c_str(); }

const char* qps_status_name(int status) {
  switch (status) {
    case QPS_OK:
      return "ok";
    case QPS_CHECK_FAILED:
      return "check_failed";
    case QPS_INTERNAL:
      return "internal";
    default:
      if (status >= 1 && status <= 8) return qps::error_code_name(static_cast<qps::ErrorCode>(status));
      return "unknown";
  }
}

int qps_builtin_count(void) { return static_cast<int>(qps::builtin_scenarios().size()); }

const char* qps_builtin_name(int index) {
  static const std::vector<std::string> names = qps::builtin_scenarios();
  if (index < 0 || index >= static_cast<int>(names.size())) return nullptr;
  return names[index].c_str();
}

int qps_config_key_count(void) { return static_cast<int>(qps::config_keys().size()); }

int qps_config_key(int index, const char** key, const char** unit, const char** help) {
  const auto& keys = qps::config_keys();
  if (index < 0 || index >= static_cast<int>(keys.size())) return set_error(QPS_INVALID_ARGUMENT, "key index out of range");
  if (key) *key = keys[index].key.c_str();
  if (unit) *unit = keys[index].unit.c_str();
  if (help) *help = keys[index].help.c_str();
  return QPS_OK;
}

int qps_scenario_builtin(const char* name, qps_scenario** out) {
  return guarded([&]() -> int {
    if (!name || !out) return set_error(QPS_INVALID_ARGUMENT, "null argument");
    return adopt(qps::builtin_scenario(name), out);
  });
}

int qps_scenario_load(const char* path, qps_scenario** out) {
  return guarded([&]() -> int {
    if (!path || !out) return set_error(QPS_INVALID_ARGUMENT, "null argument");
    return adopt(qps::load_scenario(path), out);
  });
}

int qps_scenario_parse(const char* text, qps_scenario** out) {
  return guarded([&]() -> int {
    if (!text || !out) return set_error(QPS_INVALID_ARGUMENT, "null argument");
    return adopt(qps::parse_scenario(text), out);
  });
}

int qps_scenario_set(qps_scenario* s, const char* key, const char* value) {
  return guarded([&]() -> int {
    if (!s || !key || !value) return set_error(QPS_INVALID_ARGUMENT, "null argument");
    qps::set_scenario_value(s->s, key, value);
    return QPS_OK;
  });
}

int qps_scenario_get(const qps_scenario* s, const char* key, char* buf, size_t len, size_t* needed) {
  return guarded([&]() -> int {
    if (!s || !key) return set_error(QPS_INVALID_ARGUMENT, "null argument");
    const std::string v = qps::get_scenario_value(s->s, key);
    if (needed) *needed = v.size() + 1;
    if (buf && len > v.size()) std::memcpy(buf, v.c_str(), v.size() + 1);
    return QPS_OK;
  });
}

int qps_scenario_serialize(const qps_scenario* s, char** out) {
  return guarded([&]() -> int {
    if (!s || !out) return set_error(QPS_INVALID_ARGUMENT, "null argument");
    const std::string text = qps::serialize_scenario(s->s);
    char* p = static_cast<char*>(std::malloc(text.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, text.c_str(), text.size() + 1);
    *out = p;
    return QPS_OK;
  });
}

void qps_scenario_free(qps_scenario* s) { delete s; }

void qps_string_free(char* p) { std::free(p); }

void qps_set_log(qps_log_fn fn, void* user) {
  std::lock_guard<std::mutex> lock(log_mutex);
  log_fn = fn;
  log_user = user;
}

int qps_run(const qps_scenario* s, const char* output_dir, int check, int* failed_criteria) {
  return guarded([&]() -> int {
    if (!s) return set_error(QPS_INVALID_ARGUMENT, "null scenario");
    qps::RunOptions o = run_options(output_dir);
    o.check = check != 0;
    const qps::RunReport r = qps::run_scenario(s->s, o);
    if (failed_criteria) *failed_criteria = r.failed_criteria;
    if (r.failed_criteria > 0)
      return set_error(QPS_CHECK_FAILED, std::to_string(r.failed_criteria) + " acceptance criteria failed");
    return QPS_OK;
  });
}

int qps_check(const char* ids, const char* output_dir, int threads, int* failed_criteria) {
  return guarded([&]() -> int {
    std::vector<std::string> list;
    if (ids) {
      std::stringstream in(ids);
      std::string id;
      while (std::getline(in, id, ','))
        if (!id.empty()) list.push_back(id);
    }
    qps::RunOptions o = run_options(output_dir);
    const qps::RunReport r = qps::run_acceptance(list, o, threads);
    if (failed_criteria) *failed_criteria = r.failed_criteria;
    if (r.failed_criteria > 0)
      return set_error(QPS_CHECK_FAILED, std::to_string(r.failed_criteria) + " acceptance criteria failed");
    return QPS_OK;
  });
}

int qps_solve(const qps_scenario* s, qps_solution** out) {
  return guarded([&]() -> int {
    if (!s || !out) return set_error(QPS_INVALID_ARGUMENT, "null argument");
    s->s.validate();
    auto sol = std::make_unique<qps_solution>();
    sol->R = s->s.R;
    if (s->s.solve == "strip")
      sol->u = qps::run_strip(s->s).solution;
    else
      sol->u = qps::run_cell(s->s).solution;
    *out = sol.release();
    return QPS_OK;
  });
}

int qps_solution_extend(const qps_solution* u, const double x[3], double out[6]) {
  return guarded([&]() -> int {
    if (!u || !x || !out) return set_error(QPS_INVALID_ARGUMENT, "null argument");
    const qps::Vec3 p{x[0], x[1], x[2]};
    const qps::Field3 e = std::holds_alternative<qps::CellSolution>(u->u)
                              ? qps::extend_field(std::get<qps::CellSolution>(u->u), p, u->R)
                              : qps::extend_field(std::get<qps::StripSolution>(u->u), p);
    for (int c = 0; c < 3; ++c) {
      out[2 * c] = e[c].real();
      out[2 * c + 1] = e[c].imag();
    }
    return QPS_OK;
  });
}

int qps_solution_norm(const qps_solution* u, double* out) {
  return guarded([&]() -> int {
    if (!u || !out) return set_error(QPS_INVALID_ARGUMENT, "null argument");
    *out = std::holds_alternative<qps::CellSolution>(u->u) ? std::get<qps::CellSolution>(u->u).coeffs.norm()
                                                             : qps::weighted_norm(std::get<qps::StripSolution>(u->u));
    return QPS_OK;
  });
}

void qps_solution_free(qps_solution* u) { delete u; }

}  // extern "C"
