#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aircomp/policies.hpp"
#include "aircomp/scenario.hpp"
#include "aircomp/servers.hpp"
#include "aircomp/sim_core.hpp"
#include "aircomp/workload.hpp"

namespace aircomp {

struct TaskRecord {
  TaskId id = 0;
  std::uint32_t user = 0;
  std::uint32_t app = 0;
  Tier tier = Tier::Cloud;
  ServerId server = 0;
  double created_at = 0.0;
  DelayTriple delays;
  double tolerance = 0.0;
  TaskStatus status = TaskStatus::Completed;
  bool success = false;
};

struct ServerUsage {
  std::string id;
  Tier tier = Tier::Edge;
  double busy_s = 0.0;
  double available_s = 0.0;

  std::optional<double> utilization() const {
    if (available_s <= 0.0) return std::nullopt;
    return busy_s / available_s;
  }
};

struct PositionAudit {
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
};

struct RunOptions {
  std::ostream* event_log = nullptr;
  PolicyHook* hook = nullptr;
  /// Called for every user position the simulation evaluates.
  std::function<void(std::uint32_t user, double t, Position p)> position_observer;
};

struct RunResult {
  std::vector<TaskRecord> tasks;
  std::vector<ServerUsage> servers;
  RunSummary summary;
  PositionAudit audit;
  std::uint64_t events_scheduled = 0;
  std::uint64_t events_cancelled = 0;
  std::uint64_t events_pending = 0;
  std::uint64_t invalid_actions = 0;
};

/// Runs one repeat of a concrete scenario (its `sweeps` are ignored).
///
/// Server ids: edges in declaration order, then the cloud, then UAVs named
/// uav_1..uav_n. Tasks still queued at the horizon are completed
/// analytically: with non-preemptive FIFO service and no later events their
/// delays are already fixed.
RunResult simulate(const ScenarioSpec& spec, std::uint64_t run_seed, int repeat, const RunOptions& options = {});

}  // namespace aircomp
