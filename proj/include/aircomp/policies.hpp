#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aircomp/servers.hpp"
#include "aircomp/topology.hpp"
#include "aircomp/workload.hpp"

namespace aircomp {

// --- Offloading -------------------------------------------------------------

struct Candidate {
  ServerId id = 0;
  Tier tier = Tier::Edge;
  double queueing_delay = 0.0;
};

struct OffloadDecision {
  TaskId task = 0;
  ServerId chosen = 0;
  bool cloud_fallback = false;
  std::vector<Candidate> candidates;
};

/// Alive, in-service edge/UAV servers covering `user_pos`, in server order,
/// with the queueing delay each would impose at `now`.
std::vector<Candidate> connected_candidates(Position user_pos, std::span<const Server> servers, double now);

/// Lowest queueing delay wins; ties go Edge before UAV, then lower id. With
/// no candidate the task falls back to `cloud`.
OffloadDecision select_target(TaskId task, std::span<const Candidate> connected, ServerId cloud);

// --- UAV placement ----------------------------------------------------------

struct AreaDemand {
  AreaId area = 0;
  double offered_load = 0.0;
  double edge_capacity = 0.0;
  double deficit = 0.0;
  /// Areas without any edge server never receive UAVs.
  bool has_edge = false;
};

/// Offered load per area from users' current positions; edge capacity from
/// alive edge servers sited in the area.
std::vector<AreaDemand> area_demand(std::span<const User> users, double now, const AreaGrid& grid,
                                    std::span<const AppProfile> apps, std::span<const Server> servers,
                                    double rate_multiplier = 1.0);

/// Per-area UAV counts. Each area needs ceil(deficit / uav_capacity); areas
/// are served in descending deficit order until the fleet runs out. UAVs left
/// once every need is met cycle one per area in descending offered-load order.
std::vector<int> allocate_uavs(std::span<const AreaDemand> demands, double uav_capacity, int fleet_size);

struct UavSlot {
  std::optional<AreaId> area;  // assignment, empty before first deployment
  Position position;
  double backlog = 0.0;  // seconds of queued work; idle UAVs move first
};

struct Flight {
  std::size_t uav = 0;  // index into the fleet
  AreaId to_area = 0;
  Position destination;
  double depart = 0.0;
  double arrive = 0.0;
};

inline constexpr double kInstantFlight = std::numeric_limits<double>::infinity();

/// Moves the fewest UAVs needed to reach `target` counts. UAVs whose area is
/// still within its target stay put. Destinations are the per-area anchors
/// (the area's edge server site). `speed` may be kInstantFlight.
std::vector<Flight> relocate_fleet(std::span<const UavSlot> fleet, std::span<const int> target,
                                   std::span<const Position> anchors, double speed, double now);

// --- External policy hook ---------------------------------------------------

enum class DecisionKind { Offload, Relocation };

struct ServerSnapshot {
  std::string id;
  Tier tier = Tier::Edge;
  bool alive = true;
  bool in_service = true;
  double utilization = 0.0;  // busy fraction of elapsed time so far
  double backlog_s = 0.0;
  std::optional<AreaId> area;
};

struct Observation {
  DecisionKind kind = DecisionKind::Offload;
  double time = 0.0;
  std::vector<double> area_loads;
  std::vector<ServerSnapshot> servers;

  // Offload decisions.
  TaskId task = 0;
  std::string app;
  std::uint32_t user = 0;
  std::vector<std::string> candidates;
  std::vector<double> candidate_delays;
  std::string default_target;

  // Relocation decisions.
  int fleet_size = 0;
  std::vector<bool> area_has_edge;
  std::vector<int> default_counts;
};

struct Action {
  std::optional<std::string> offload_target;
  std::optional<std::vector<int>> uav_counts;
};

struct Reward {
  double time = 0.0;
  std::optional<TaskId> task;  // set for per-task rewards
  double value = 0.0;          // 1/0 per task, success fraction per interval
  std::uint64_t tasks = 0;     // tasks judged in the interval
};

/// Synchronous policy callback invoked at every decision point. Returning
/// an empty optional keeps the default decision.
class PolicyHook {
 public:
  virtual ~PolicyHook() = default;
  virtual std::optional<Action> act(const Observation& obs) = 0;
  virtual void reward(const Reward&) {}
};

/// Throws Error(kInvalidAction) unless the action fits the decision point.
void validate_action(const Observation& obs, const Action& action);

std::string observation_to_json(const Observation& obs);
std::string reward_to_json(const Reward& reward);
std::string action_to_json(const Action& action);
/// Empty input or `null` means "no override". Throws kInvalidAction on
/// malformed records.
std::optional<Action> action_from_json(std::string_view text);

/// Drives an external agent over a line protocol: each decision point writes
/// one `{"type":"observation",...}` line to `out` and reads one action line
/// from `in`; rewards are written as `{"type":"reward",...}` lines.
class LineProtocolHook : public PolicyHook {
 public:
  LineProtocolHook(std::istream& in, std::ostream& out, bool send_rewards = true)
      : in_(in), out_(out), send_rewards_(send_rewards) {}

  std::optional<Action> act(const Observation& obs) override;
  void reward(const Reward& r) override;

 private:
  std::istream& in_;
  std::ostream& out_;
  bool send_rewards_;
};

}  // namespace aircomp
