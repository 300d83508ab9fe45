#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aircomp/policies.hpp"
#include "aircomp/reporting.hpp"
#include "aircomp/scenario.hpp"
#include "aircomp/simulation.hpp"

namespace aircomp {

struct ExperimentOptions {
  /// false: run only the base configuration and ignore `sweeps`.
  bool sweep = true;
  std::optional<std::uint64_t> root_seed;
  std::optional<int> repeats;
  /// 0 picks the hardware concurrency. Forced to 1 when a hook is set.
  unsigned threads = 0;
  PolicyHook* hook = nullptr;
  /// When set, one event log per run: events_c<config>_r<repeat>.log.
  std::optional<std::filesystem::path> event_log_dir;
  /// When set, raw tasks.csv / servers.csv are written here.
  std::optional<std::filesystem::path> records_dir;
  std::function<void(std::size_t config, int repeat, std::uint32_t user, double t, Position p)> position_observer;
};

struct ExperimentResult {
  ScenarioSpec spec;  // after seed/repeat overrides
  SweepPlan plan;
  std::vector<std::vector<RunMetrics>> metrics;  // [config][repeat]
  std::vector<MetricsRow> rows;
  CsvMeta meta;
  PositionAudit audit;
  std::uint64_t invalid_actions = 0;
  std::uint64_t tasks = 0;
};

ExperimentResult run_experiment(const ScenarioSpec& spec, const ExperimentOptions& options = {});

}  // namespace aircomp
