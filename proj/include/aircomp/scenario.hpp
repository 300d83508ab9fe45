#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aircomp/topology.hpp"
#include "aircomp/workload.hpp"

namespace aircomp {

struct WorldSpec {
  WorldBounds bounds;
  int grid_rows = 2;
  int grid_cols = 2;
};

struct EdgeSpec {
  std::string id;
  Position position;
  double radius = 100.0;
  double capacity = 1000.0;
};

struct CloudSpec {
  std::string id = "cloud";
  double capacity = 20000.0;
};

struct UavFleetSpec {
  int fleet_size = 0;
  double capacity = 500.0;
  double radius = 100.0;
  double altitude = 200.0;
  double speed_mps = 10.0;
  bool instant_flight = false;
  double relocation_period_s = 10.0;
};

enum class ServiceModel { Deterministic, Exponential };

struct UsersSpec {
  int count = 0;
  double nomadic_fraction = 0.0;
  MobilityParams mobility;
  /// App names each user runs; empty means every declared app.
  std::vector<std::string> apps;
};

struct SimSpec {
  double duration_s = 1000.0;
  int repeats = 1;
  std::uint64_t root_seed = 1;
};

enum class DynamicEventKind { ServerFailure, ServerRestore, CapacitySurge, UserBurst };

struct DynamicEvent {
  double time = 0.0;
  DynamicEventKind kind = DynamicEventKind::ServerFailure;
  std::string server;        // ServerFailure / ServerRestore
  double multiplier = 1.0;   // CapacitySurge: factor on every user's task rates
  int count = 0;             // UserBurst
  Position at;               // UserBurst
};

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

/// Axis names accepted under `sweeps`; `users` and `uavs` always appear as
/// CSV columns, the rest only when swept.
inline constexpr std::string_view kSweepAxisNames[] = {
    "users", "uavs", "uav_capacity", "edge_capacity", "cloud_wan_latency_s", "relocation_period_s", "uav_speed_mps",
};

struct ScenarioSpec {
  std::string name = "scenario";
  WorldSpec world;
  DelayParams network;
  std::optional<std::string> uav_preset;
  std::vector<EdgeSpec> edges;
  CloudSpec cloud;
  UavFleetSpec uav;
  ServiceModel service = ServiceModel::Deterministic;
  UsersSpec users;
  std::vector<AppProfile> apps;
  bool apps_from_preset = false;
  SimSpec sim;
  std::vector<DynamicEvent> events;
  std::vector<SweepAxis> sweeps;

  /// Enforces every structural invariant; throws ValidationError.
  void validate() const;
  /// App indices every user runs.
  std::vector<std::uint32_t> user_app_indices() const;
};

/// Parses the JSON scenario format. Omitted fields take documented defaults;
/// unknown keys are rejected. Throws Error(kParse) or ValidationError.
ScenarioSpec load_scenario(std::string_view text);
ScenarioSpec load_scenario_file(const std::filesystem::path& path);

/// Canonical JSON with every field spelled out.
std::string serialize_scenario(const ScenarioSpec& spec, int indent = 2);
std::uint64_t scenario_hash(const ScenarioSpec& spec);

/// Applies one sweep axis value to a copy of the spec.
void apply_axis(ScenarioSpec& spec, std::string_view axis, double value);

struct ConfigPoint {
  std::vector<std::pair<std::string, double>> axes;  // in sweep declaration order
  ScenarioSpec spec;                                 // concrete, sweeps cleared
};

struct RunConfig {
  std::size_t config = 0;
  int repeat = 0;
  std::uint64_t seed = 0;
};

struct SweepPlan {
  std::vector<ConfigPoint> configs;
  std::vector<RunConfig> runs;  // configs x repeats, config-major
  std::vector<std::string> warnings;
};

/// Cartesian product of the sweep axes times the repeat indices. Run seeds
/// depend only on (root_seed, repeat), so the same repeat sees the same user
/// traffic in every configuration.
SweepPlan expand_sweep(const ScenarioSpec& spec);

}  // namespace aircomp
