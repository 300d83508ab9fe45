#include "aircomp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "aircomp/error.hpp"

namespace aircomp {

namespace {

int axis_or(const ConfigPoint& cp, std::string_view name, int fallback) {
  for (const auto& [n, v] : cp.axes)
    if (n == name) return static_cast<int>(v);
  return fallback;
}

}  // namespace

ExperimentResult run_experiment(const ScenarioSpec& input, const ExperimentOptions& options) {
  ExperimentResult result;
  result.spec = input;
  if (options.root_seed) result.spec.sim.root_seed = *options.root_seed;
  if (options.repeats) result.spec.sim.repeats = *options.repeats;
  if (!options.sweep) result.spec.sweeps.clear();
  result.spec.validate();
  result.plan = expand_sweep(result.spec);

  const auto& plan = result.plan;
  const std::size_t app_count = result.spec.apps.size();
  const int repeats = result.spec.sim.repeats;
  result.metrics.assign(plan.configs.size(), std::vector<RunMetrics>(static_cast<std::size_t>(repeats)));

  std::optional<RecordWriter> records;
  if (options.records_dir) {
    std::filesystem::create_directories(*options.records_dir);
    records.emplace(*options.records_dir, result.spec.apps);
  }
  if (options.event_log_dir) std::filesystem::create_directories(*options.event_log_dir);

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  if (options.hook || records) threads = 1;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, plan.runs.size())));

  std::vector<PositionAudit> audits(plan.runs.size());
  std::vector<std::uint64_t> invalid(plan.runs.size(), 0);
  std::vector<std::uint64_t> task_counts(plan.runs.size(), 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plan.runs.size()) return;
      try {
        const RunConfig& rc = plan.runs[i];
        RunOptions ro;
        ro.hook = options.hook;
        std::ofstream log;
        if (options.event_log_dir) {
          const auto path = *options.event_log_dir /
                            ("events_c" + std::to_string(rc.config) + "_r" + std::to_string(rc.repeat) + ".log");
          log.open(path, std::ios::binary | std::ios::trunc);
          if (!log) throw Error(ErrorCode::kIo, "cannot write event log " + path.string());
          log << "time,seq,kind,entity_id,detail\n";
          ro.event_log = &log;
        }
        if (options.position_observer) {
          ro.position_observer = [&, rc](std::uint32_t u, double t, Position p) {
            options.position_observer(rc.config, rc.repeat, u, t, p);
          };
        }
        const RunResult run = simulate(plan.configs[rc.config].spec, rc.seed, rc.repeat, ro);
        result.metrics[rc.config][static_cast<std::size_t>(rc.repeat)] = summarize_run(run, app_count);
        audits[i] = run.audit;
        invalid[i] = run.invalid_actions;
        task_counts[i] = run.tasks.size();
        if (records) records->write({rc.config, rc.repeat}, run);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(plan.runs.size());
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t i = 0; i < plan.runs.size(); ++i) {
    result.audit.checked += audits[i].checked;
    result.audit.violations += audits[i].violations;
    result.invalid_actions += invalid[i];
    result.tasks += task_counts[i];
  }

  std::vector<std::string> extra;
  if (!plan.configs.empty()) {
    for (const auto& [name, v] : plan.configs.front().axes)
      if (name != "users" && name != "uavs") extra.push_back(name);
  }
  for (std::size_t c = 0; c < plan.configs.size(); ++c) {
    const auto& cp = plan.configs[c];
    std::vector<std::pair<std::string, double>> extras;
    for (const auto& [name, v] : cp.axes)
      if (name != "users" && name != "uavs") extras.emplace_back(name, v);
    result.rows.push_back(aggregate(result.metrics[c], axis_or(cp, "users", cp.spec.users.count),
                                    axis_or(cp, "uavs", cp.spec.uav.fleet_size), std::move(extras)));
  }

  result.meta.scenario_hash = scenario_hash(result.spec);
  result.meta.root_seed = result.spec.sim.root_seed;
  result.meta.scenario_json = serialize_scenario(result.spec, -1);
  for (const auto& a : result.spec.apps) result.meta.app_names.push_back(a.name);
  result.meta.extra_axes = std::move(extra);
  return result;
}

}  // namespace aircomp
