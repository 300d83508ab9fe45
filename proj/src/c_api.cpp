#include "aircomp/aircomp.h"

#include <cstring>
#include <iostream>
#include <memory>
#include <new>
#include <string>

#include "aircomp/error.hpp"
#include "aircomp/experiment.hpp"
#include "aircomp/plot.hpp"
#include "aircomp/reporting.hpp"
#include "aircomp/scenario.hpp"

struct aircomp_scenario {
  aircomp::ScenarioSpec spec;
};

struct aircomp_results {
  aircomp::ExperimentResult result;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
int guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return AIRCOMP_OK;
  } catch (const aircomp::Error& e) {
    return fail(static_cast<int>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(AIRCOMP_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(AIRCOMP_E_INTERNAL, e.what());
  } catch (...) {
    return fail(AIRCOMP_E_INTERNAL, "unknown error");
  }
}

// Adapts C callbacks to the C++ hook interface.
class CallbackHook : public aircomp::PolicyHook {
 public:
  CallbackHook(aircomp_act_fn act, aircomp_reward_fn reward, void* user) : act_(act), reward_(reward), user_(user) {}

  std::optional<aircomp::Action> act(const aircomp::Observation& obs) override {
    const std::string json = aircomp::observation_to_json(obs);
    const char* reply = act_(json.c_str(), user_);
    if (!reply) return std::nullopt;
    return aircomp::action_from_json(reply);
  }

  void reward(const aircomp::Reward& r) override {
    if (!reward_) return;
    const std::string json = aircomp::reward_to_json(r);
    reward_(json.c_str(), user_);
  }

 private:
  aircomp_act_fn act_;
  aircomp_reward_fn reward_;
  void* user_;
};

const aircomp::Estimate* estimate_for(const aircomp::MetricsRow& row, const std::vector<std::string>& apps,
                                      const std::string& column) {
  if (column == "success_rate") return &row.success;
  if (column == "svc_time_s") return &row.svc_time;
  if (column == "edge_util") return &row.edge_util;
  if (column == "uav_util") return &row.uav_util;
  if (column == "share_edge") return &row.share_edge;
  if (column == "share_uav") return &row.share_uav;
  if (column == "share_cloud") return &row.share_cloud;
  if (column == "success_ci") return &row.success;
  for (std::size_t a = 0; a < apps.size() && a < row.app_success.size(); ++a)
    if (column == "succ_" + apps[a]) return &row.app_success[a];
  return nullptr;
}

int run_impl(const aircomp_scenario_t* scenario, const aircomp_run_options* options, bool sweep,
             aircomp_results_t** out) {
  if (!scenario || !out) return fail(AIRCOMP_E_INVALID_ARGUMENT, "null scenario or output pointer");
  *out = nullptr;
  return guarded([&] {
    aircomp::ExperimentOptions eo;
    eo.sweep = sweep;
    std::unique_ptr<aircomp::PolicyHook> hook;
    if (options) {
      if (options->event_log_dir) eo.event_log_dir = options->event_log_dir;
      if (options->records_dir) eo.records_dir = options->records_dir;
      eo.threads = options->threads;
      if (options->act)
        hook = std::make_unique<CallbackHook>(options->act, options->reward, options->user_data);
      else if (options->hook_stdio)
        hook = std::make_unique<aircomp::LineProtocolHook>(std::cin, std::cout);
    }
    eo.hook = hook.get();
    auto results = std::make_unique<aircomp_results>();
    results->result = aircomp::run_experiment(scenario->spec, eo);
    *out = results.release();
  });
}

}  // namespace

extern "C" {

void aircomp_run_options_init(aircomp_run_options* options) {
  if (options) std::memset(options, 0, sizeof *options);
}

int aircomp_scenario_load_file(const char* path, aircomp_scenario_t** out) {
  if (!path || !out) return fail(AIRCOMP_E_INVALID_ARGUMENT, "null path or output pointer");
  *out = nullptr;
  return guarded([&] { *out = new aircomp_scenario{aircomp::load_scenario_file(path)}; });
}

int aircomp_scenario_load_text(const char* text, aircomp_scenario_t** out) {
  if (!text || !out) return fail(AIRCOMP_E_INVALID_ARGUMENT, "null text or output pointer");
  *out = nullptr;
  return guarded([&] { *out = new aircomp_scenario{aircomp::load_scenario(text)}; });
}

void aircomp_scenario_destroy(aircomp_scenario_t* scenario) { delete scenario; }

int aircomp_scenario_set_seed(aircomp_scenario_t* scenario, uint64_t root_seed) {
  if (!scenario) return fail(AIRCOMP_E_INVALID_ARGUMENT, "null scenario");
  scenario->spec.sim.root_seed = root_seed;
  return AIRCOMP_OK;
}

int aircomp_scenario_set_repeats(aircomp_scenario_t* scenario, int repeats) {
  if (!scenario) return fail(AIRCOMP_E_INVALID_ARGUMENT, "null scenario");
  if (repeats < 1) return fail(AIRCOMP_E_VALIDATION, "sim.repeats: must be >= 1");
  scenario->spec.sim.repeats = repeats;
  return AIRCOMP_OK;
}

int aircomp_scenario_config_count(const aircomp_scenario_t* scenario, size_t* out) {
  if (!scenario || !out) return fail(AIRCOMP_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = aircomp::expand_sweep(scenario->spec).configs.size(); });
}

int aircomp_run(const aircomp_scenario_t* scenario, const aircomp_run_options* options, aircomp_results_t** out) {
  return run_impl(scenario, options, false, out);
}

int aircomp_sweep(const aircomp_scenario_t* scenario, const aircomp_run_options* options, aircomp_results_t** out) {
  return run_impl(scenario, options, true, out);
}

int aircomp_results_write_csv(const aircomp_results_t* results, const char* path) {
  if (!results || !path) return fail(AIRCOMP_E_INVALID_ARGUMENT, "null results or path");
  return guarded([&] { aircomp::write_csv(results->result.rows, path, results->result.meta); });
}

int aircomp_results_row_count(const aircomp_results_t* results, size_t* out) {
  if (!results || !out) return fail(AIRCOMP_E_INVALID_ARGUMENT, "null argument");
  *out = results->result.rows.size();
  return AIRCOMP_OK;
}

int aircomp_results_get(const aircomp_results_t* results, size_t row, const char* column, double* value,
                        int* present) {
  if (!results || !column || !value || !present) return fail(AIRCOMP_E_INVALID_ARGUMENT, "null argument");
  const auto& r = results->result;
  if (row >= r.rows.size()) return fail(AIRCOMP_E_INVALID_ARGUMENT, "row index out of range");
  const auto& mr = r.rows[row];
  const std::string name = column;
  *present = 1;
  if (name == "users") return *value = mr.users, AIRCOMP_OK;
  if (name == "uavs") return *value = mr.uavs, AIRCOMP_OK;
  if (name == "repeat_count") return *value = mr.repeat_count, AIRCOMP_OK;
  for (const auto& [axis, v] : mr.extra_axes)
    if (axis == name) return *value = v, AIRCOMP_OK;
  const bool ci = name.size() > 3 && name.compare(name.size() - 3, 3, "_ci") == 0;
  std::string base = name;
  if (name == "svc_time_ci") base = "svc_time_s";
  else if (ci) base = name.substr(0, name.size() - 3) + "_rate";
  const aircomp::Estimate* e = estimate_for(mr, r.meta.app_names, base);
  if (!e) return fail(AIRCOMP_E_MISSING_COLUMN, "unknown column '" + name + "'");
  const auto& cell = ci ? e->half_width : e->mean;
  *present = cell.has_value();
  *value = cell.value_or(0.0);
  return AIRCOMP_OK;
}

int aircomp_results_position_violations(const aircomp_results_t* results, uint64_t* out) {
  if (!results || !out) return fail(AIRCOMP_E_INVALID_ARGUMENT, "null argument");
  *out = results->result.audit.violations;
  return AIRCOMP_OK;
}

int aircomp_results_invalid_actions(const aircomp_results_t* results, uint64_t* out) {
  if (!results || !out) return fail(AIRCOMP_E_INVALID_ARGUMENT, "null argument");
  *out = results->result.invalid_actions;
  return AIRCOMP_OK;
}

void aircomp_results_destroy(aircomp_results_t* results) { delete results; }

int aircomp_plot(const char* csv_path, const char* out_dir) {
  if (!csv_path || !out_dir) return fail(AIRCOMP_E_INVALID_ARGUMENT, "null path");
  return guarded([&] { aircomp::render_plots(csv_path, out_dir); });
}

int aircomp_verify(const char* csv_path, size_t* rows_checked, size_t* tasks_checked) {
  if (!csv_path) return fail(AIRCOMP_E_INVALID_ARGUMENT, "null path");
  aircomp::VerifyReport report;
  const int rc = guarded([&] { report = aircomp::verify_csv(csv_path); });
  if (rc != AIRCOMP_OK) return rc;
  if (rows_checked) *rows_checked = report.rows_checked;
  if (tasks_checked) *tasks_checked = report.tasks_checked;
  if (!report.ok()) {
    std::string msg = std::to_string(report.mismatches.size()) + " mismatch(es)";
    for (std::size_t i = 0; i < report.mismatches.size() && i < 20; ++i) msg += "\n  " + report.mismatches[i];
    return fail(AIRCOMP_E_VERIFY_MISMATCH, msg);
  }
  return AIRCOMP_OK;
}

const char* aircomp_last_error(void) { return g_last_error.c_str(); }

const char* aircomp_status_name(int status) { return aircomp::to_string(static_cast<aircomp::ErrorCode>(status)); }

const char* aircomp_version(void) { return "1.0.0"; }

}  // extern "C"
