#include "aircomp/policies.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "aircomp/error.hpp"

namespace aircomp {

using json = nlohmann::json;

std::vector<Candidate> connected_candidates(Position user_pos, std::span<const Server> servers, double now) {
  std::vector<Candidate> out;
  for (const auto& s : servers) {
    if (s.tier() == Tier::Cloud || !s.alive() || !s.in_service()) continue;
    if (!covered_by(user_pos, s)) continue;
    out.push_back({s.id(), s.tier(), s.queueing_delay_at(now)});
  }
  return out;
}

namespace {

bool better(const Candidate& a, const Candidate& b) {
  if (a.queueing_delay != b.queueing_delay) return a.queueing_delay < b.queueing_delay;
  if (a.tier != b.tier) return a.tier == Tier::Edge;
  return a.id < b.id;
}

}  // namespace

OffloadDecision select_target(TaskId task, std::span<const Candidate> connected, ServerId cloud) {
  OffloadDecision d;
  d.task = task;
  d.candidates.assign(connected.begin(), connected.end());
  if (connected.empty()) {
    d.chosen = cloud;
    d.cloud_fallback = true;
    return d;
  }
  d.chosen = std::min_element(connected.begin(), connected.end(), better)->id;
  return d;
}

std::vector<AreaDemand> area_demand(std::span<const User> users, double now, const AreaGrid& grid,
                                    std::span<const AppProfile> apps, std::span<const Server> servers,
                                    double rate_multiplier) {
  std::vector<AreaDemand> out(static_cast<std::size_t>(grid.area_count()));
  for (int a = 0; a < grid.area_count(); ++a) out[a].area = a;
  for (const auto& u : users) {
    const AreaId a = grid.area_of(position_at(u, now));
    out[a].offered_load += user_offered_load(u, apps) * rate_multiplier;
  }
  for (const auto& s : servers) {
    if (s.tier() != Tier::Edge) continue;
    const AreaId a = grid.area_of(*s.position());
    out[a].has_edge = true;
    if (s.alive()) out[a].edge_capacity += s.capacity();
  }
  for (auto& d : out) d.deficit = std::max(0.0, d.offered_load - d.edge_capacity);
  return out;
}

std::vector<int> allocate_uavs(std::span<const AreaDemand> demands, double uav_capacity, int fleet_size) {
  if (fleet_size < 0) throw Error(ErrorCode::kInvalidArgument, "fleet size must be >= 0");
  if (!(uav_capacity > 0.0)) throw Error(ErrorCode::kInvalidArgument, "UAV capacity must be > 0");
  std::vector<int> counts(demands.size(), 0);
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < demands.size(); ++i)
    if (demands[i].has_edge) eligible.push_back(i);
  if (eligible.empty() || fleet_size == 0) return counts;

  auto by_deficit = eligible;
  std::stable_sort(by_deficit.begin(), by_deficit.end(),
                   [&](std::size_t a, std::size_t b) { return demands[a].deficit > demands[b].deficit; });
  int remaining = fleet_size;
  for (std::size_t i : by_deficit) {
    if (remaining == 0) break;
    const int need = static_cast<int>(std::ceil(demands[i].deficit / uav_capacity));
    const int give = std::min(need, remaining);
    counts[i] += give;
    remaining -= give;
  }

  auto by_load = eligible;
  std::stable_sort(by_load.begin(), by_load.end(), [&](std::size_t a, std::size_t b) {
    return demands[a].offered_load > demands[b].offered_load;
  });
  for (std::size_t k = 0; remaining > 0; k = (k + 1) % by_load.size(), --remaining) ++counts[by_load[k]];
  return counts;
}

std::vector<Flight> relocate_fleet(std::span<const UavSlot> fleet, std::span<const int> target,
                                   std::span<const Position> anchors, double speed, double now) {
  if (target.size() != anchors.size())
    throw Error(ErrorCode::kInvalidArgument, "target counts and anchors differ in size");
  const std::size_t areas = target.size();
  std::vector<int> have(areas, 0);
  for (const auto& u : fleet)
    if (u.area) ++have[static_cast<std::size_t>(*u.area)];

  // Movers: unassigned UAVs, then the least loaded surplus UAVs of each
  // over-served area.
  std::vector<std::size_t> movers;
  for (std::size_t i = 0; i < fleet.size(); ++i)
    if (!fleet[i].area) movers.push_back(i);
  for (std::size_t a = 0; a < areas; ++a) {
    int surplus = have[a] - target[a];
    if (surplus <= 0) continue;
    std::vector<std::size_t> here;
    for (std::size_t i = 0; i < fleet.size(); ++i)
      if (fleet[i].area && static_cast<std::size_t>(*fleet[i].area) == a) here.push_back(i);
    std::stable_sort(here.begin(), here.end(),
                     [&](std::size_t x, std::size_t y) { return fleet[x].backlog < fleet[y].backlog; });
    movers.insert(movers.end(), here.begin(), here.begin() + surplus);
  }

  std::vector<Flight> plan;
  std::vector<bool> used(movers.size(), false);
  for (std::size_t a = 0; a < areas; ++a) {
    for (int slot = have[a]; slot < target[a]; ++slot) {
      std::optional<std::size_t> best;
      double best_dist = 0.0;
      for (std::size_t m = 0; m < movers.size(); ++m) {
        if (used[m]) continue;
        const double d = distance(fleet[movers[m]].position, anchors[a]);
        if (!best || d < best_dist) {
          best = m;
          best_dist = d;
        }
      }
      if (!best) return plan;
      used[*best] = true;
      Flight f;
      f.uav = movers[*best];
      f.to_area = static_cast<AreaId>(a);
      f.destination = anchors[a];
      f.depart = now;
      f.arrive = std::isinf(speed) ? now : now + best_dist / speed;
      plan.push_back(f);
    }
  }
  std::sort(plan.begin(), plan.end(), [](const Flight& x, const Flight& y) { return x.uav < y.uav; });
  return plan;
}

// --- Hook contract ----------------------------------------------------------

void validate_action(const Observation& obs, const Action& action) {
  if (obs.kind == DecisionKind::Offload) {
    if (action.uav_counts) throw Error(ErrorCode::kInvalidAction, "uav_counts given at an offload decision");
    if (!action.offload_target) return;
    const auto& t = *action.offload_target;
    const bool known = std::find(obs.candidates.begin(), obs.candidates.end(), t) != obs.candidates.end();
    const bool cloud = std::any_of(obs.servers.begin(), obs.servers.end(),
                                   [&](const ServerSnapshot& s) { return s.tier == Tier::Cloud && s.id == t; });
    if (!known && !cloud) throw Error(ErrorCode::kInvalidAction, "offload target '" + t + "' is not reachable");
    return;
  }
  if (action.offload_target) throw Error(ErrorCode::kInvalidAction, "offload_target given at a relocation decision");
  if (!action.uav_counts) return;
  const auto& c = *action.uav_counts;
  if (c.size() != obs.area_has_edge.size())
    throw Error(ErrorCode::kInvalidAction, "uav_counts must have one entry per area");
  long total = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] < 0) throw Error(ErrorCode::kInvalidAction, "uav_counts entries must be >= 0");
    if (c[i] > 0 && !obs.area_has_edge[i])
      throw Error(ErrorCode::kInvalidAction, "UAVs assigned to an area without an edge server");
    total += c[i];
  }
  if (total > obs.fleet_size) throw Error(ErrorCode::kInvalidAction, "uav_counts exceed the fleet size");
}

namespace {

json snapshot_json(const ServerSnapshot& s) {
  json j{{"id", s.id},
         {"tier", std::string(to_string(s.tier))},
         {"alive", s.alive},
         {"in_service", s.in_service},
         {"utilization", s.utilization},
         {"backlog_s", s.backlog_s}};
  j["area"] = s.area ? json(*s.area) : json(nullptr);
  return j;
}

}  // namespace

std::string observation_to_json(const Observation& obs) {
  json j;
  j["type"] = "observation";
  j["decision"] = obs.kind == DecisionKind::Offload ? "offload" : "relocation";
  j["time"] = obs.time;
  j["area_loads"] = obs.area_loads;
  j["servers"] = json::array();
  for (const auto& s : obs.servers) j["servers"].push_back(snapshot_json(s));
  if (obs.kind == DecisionKind::Offload) {
    j["task"] = obs.task;
    j["app"] = obs.app;
    j["user"] = obs.user;
    j["candidates"] = obs.candidates;
    j["candidate_delays"] = obs.candidate_delays;
    j["default_action"] = {{"offload_target", obs.default_target}};
  } else {
    j["fleet_size"] = obs.fleet_size;
    j["area_has_edge"] = obs.area_has_edge;
    j["default_action"] = {{"uav_counts", obs.default_counts}};
  }
  return j.dump();
}

std::string reward_to_json(const Reward& r) {
  json j{{"type", "reward"}, {"time", r.time}, {"value", r.value}, {"tasks", r.tasks}};
  j["task"] = r.task ? json(*r.task) : json(nullptr);
  return j.dump();
}

std::string action_to_json(const Action& a) {
  json j = json::object();
  if (a.offload_target) j["offload_target"] = *a.offload_target;
  if (a.uav_counts) j["uav_counts"] = *a.uav_counts;
  return j.dump();
}

std::optional<Action> action_from_json(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return std::nullopt;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidAction, std::string("malformed action: ") + e.what());
  }
  if (j.is_null()) return std::nullopt;
  if (!j.is_object()) throw Error(ErrorCode::kInvalidAction, "action must be an object");
  Action a;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "offload_target") {
      if (it->is_null()) continue;
      if (!it->is_string()) throw Error(ErrorCode::kInvalidAction, "offload_target must be a string");
      a.offload_target = it->get<std::string>();
    } else if (it.key() == "uav_counts") {
      if (it->is_null()) continue;
      if (!it->is_array()) throw Error(ErrorCode::kInvalidAction, "uav_counts must be an array");
      std::vector<int> counts;
      for (const auto& v : *it) {
        if (!v.is_number_integer()) throw Error(ErrorCode::kInvalidAction, "uav_counts entries must be integers");
        counts.push_back(v.get<int>());
      }
      a.uav_counts = std::move(counts);
    } else if (it.key() != "type") {
      throw Error(ErrorCode::kInvalidAction, "unknown action field '" + it.key() + "'");
    }
  }
  return a;
}

std::optional<Action> LineProtocolHook::act(const Observation& obs) {
  out_ << observation_to_json(obs) << '\n';
  out_.flush();
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  return action_from_json(line);
}

void LineProtocolHook::reward(const Reward& r) {
  if (!send_rewards_) return;
  out_ << reward_to_json(r) << '\n';
}

}  // namespace aircomp
