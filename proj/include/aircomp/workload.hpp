#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aircomp/servers.hpp"
#include "aircomp/sim_core.hpp"
#include "aircomp/topology.hpp"

namespace aircomp {

struct AppProfile {
  std::string name;
  double mean_interarrival_s = 0.0;
  double comp_load = 0.0;
  double max_tolerable_delay_s = 0.0;
  double task_size_bits = 0.0;

  /// Mean computational demand in units/sec.
  double offered_load() const { return comp_load / mean_interarrival_s; }
  void validate(const std::string& field) const;
  bool operator==(const AppProfile&) const = default;
};

/// The four demonstration applications: entertainment, multimedia,
/// rendering and image classification, 500 kilobit tasks each.
std::vector<AppProfile> paper_apps();

struct DelayTriple {
  double network = 0.0;
  double queueing = 0.0;
  double processing = 0.0;

  double total() const { return network + queueing + processing; }
};

/// Success iff total delay <= tolerance.
bool judge_task(const DelayTriple& delays, double max_tolerable_delay_s);

enum class TaskStatus { Pending, Completed, ServerFailed };

struct Task {
  TaskId id = 0;
  std::uint32_t app = 0;
  std::uint32_t owner = 0;
  double created_at = 0.0;
  std::optional<ServerId> target;
  Tier tier = Tier::Cloud;
  DelayTriple delays;
  TaskStatus status = TaskStatus::Pending;
  bool success = false;
  std::uint64_t completion_seq = 0;
};

/// Exponential interarrival; `rate_multiplier` scales the task rate.
double next_task_time(const AppProfile& app, RngStream& rng, double now, double rate_multiplier = 1.0);

enum class UserKind { Mobile, Nomadic };

struct MobilityParams {
  double speed_min_mps = 1.0;
  double speed_max_mps = 2.0;
  double pause_max_s = 0.0;
};

/// One straight leg: the user waits at `origin` until `depart_time`, then
/// moves toward `destination` at `speed`.
struct Waypoint {
  Position origin;
  Position destination;
  double speed = 0.0;
  double depart_time = 0.0;

  double arrival_time() const;
};

struct User {
  std::uint32_t id = 0;
  UserKind kind = UserKind::Mobile;
  Waypoint leg;
  std::vector<std::uint32_t> apps;
};

/// Random-waypoint leg from the user's current destination. Throws
/// Error(kInvalidArgument) for nomadic users.
Waypoint rwp_next_leg(const User& user, const WorldBounds& bounds, const MobilityParams& params,
                      RngStream& rng, double now);

Position position_at(const User& user, double t);

/// Sum over the user's apps of comp_load / mean_interarrival.
double user_offered_load(const User& user, std::span<const AppProfile> apps);

}  // namespace aircomp
