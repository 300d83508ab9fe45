#include "aircomp/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "aircomp/error.hpp"

namespace aircomp {

namespace {

constexpr std::uint64_t kNoEvent = ~std::uint64_t{0};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct UavState {
  std::optional<AreaId> area;
  Position from;
  Position to;
  double depart = 0.0;
  double arrive = 0.0;
  std::uint64_t arrival_seq = kNoEvent;
};

class World {
 public:
  World(const ScenarioSpec& spec, std::uint64_t seed, int repeat, const RunOptions& options)
      : spec_(spec),
        seed_(seed),
        repeat_(static_cast<std::uint64_t>(repeat)),
        options_(options),
        grid_(spec.world.grid_rows, spec.world.grid_cols, spec.world.bounds),
        user_apps_(spec.user_app_indices()) {
    engine_.set_log(options.event_log);
    build_servers();
    build_anchors();
    for (int i = 0; i < spec_.users.count; ++i) add_user(std::nullopt);
    wire_handlers();
    if (spec_.uav.fleet_size > 0) engine_.schedule(0.0, EventKind::UavRelocationTick);
    for (std::size_t i = 0; i < spec_.events.size(); ++i)
      engine_.schedule(spec_.events[i].time, EventKind::ScenarioEvent, 0, i);
    engine_.schedule(spec_.sim.duration_s, EventKind::SimulationEnd);
  }

  RunResult run() {
    RunResult out;
    out.summary = engine_.run(SimTime(spec_.sim.duration_s));
    finalize_pending();
    out.events_scheduled = engine_.scheduled();
    out.events_cancelled = engine_.cancelled();
    out.events_pending = engine_.pending();
    out.audit = audit_;
    out.invalid_actions = invalid_actions_;
    out.tasks.reserve(tasks_.size());
    for (const auto& t : tasks_) {
      TaskRecord r;
      r.id = t.id;
      r.user = t.owner;
      r.app = t.app;
      r.tier = t.tier;
      r.server = t.target.value_or(cloud_);
      r.created_at = t.created_at;
      r.delays = t.delays;
      r.tolerance = spec_.apps[t.app].max_tolerable_delay_s;
      r.status = t.status;
      r.success = t.success;
      out.tasks.push_back(r);
    }
    const double horizon = spec_.sim.duration_s;
    for (const auto& s : servers_) {
      ServerUsage u;
      u.id = s.name();
      u.tier = s.tier();
      u.available_s = s.available_time(horizon);
      u.busy_s = s.utilization(horizon).value_or(0.0) * u.available_s;
      out.servers.push_back(std::move(u));
    }
    return out;
  }

 private:
  // --- construction ---------------------------------------------------------

  void build_servers() {
    ServerId id = 0;
    for (const auto& e : spec_.edges)
      servers_.emplace_back(id++, e.id, Tier::Edge, e.position, e.radius, e.capacity);
    cloud_ = id;
    servers_.emplace_back(id++, spec_.cloud.id, Tier::Cloud, std::nullopt, 0.0, spec_.cloud.capacity);
    first_uav_ = id;
    const Position parking = grid_.area_center(0);
    for (int k = 0; k < spec_.uav.fleet_size; ++k) {
      servers_.emplace_back(id++, "uav_" + std::to_string(k + 1), Tier::Uav, parking, spec_.uav.radius,
                            spec_.uav.capacity, spec_.uav.altitude);
      servers_.back().set_in_service(false);
      UavState st;
      st.from = st.to = parking;
      uavs_.push_back(st);
    }
    if (spec_.service == ServiceModel::Exponential) {
      for (const auto& s : servers_) service_rng_.push_back(derive_stream(seed_, {"service", s.id(), repeat_}));
    }
  }

  void build_anchors() {
    anchors_.resize(static_cast<std::size_t>(grid_.area_count()));
    area_has_edge_.assign(anchors_.size(), false);
    for (int a = 0; a < grid_.area_count(); ++a) anchors_[a] = grid_.area_center(a);
    for (const auto& s : servers_) {
      if (s.tier() != Tier::Edge) continue;
      const auto a = static_cast<std::size_t>(grid_.area_of(*s.position()));
      if (!area_has_edge_[a]) anchors_[a] = *s.position();
      area_has_edge_[a] = true;
    }
  }

  void add_user(std::optional<Position> start) {
    const auto uid = static_cast<std::uint32_t>(users_.size());
    User u;
    u.id = uid;
    auto kind_rng = derive_stream(seed_, {"user_kind", uid, repeat_});
    u.kind = kind_rng.uniform() < spec_.users.nomadic_fraction ? UserKind::Nomadic : UserKind::Mobile;
    auto place_rng = derive_stream(seed_, {"placement", uid, repeat_});
    const auto& b = spec_.world.bounds;
    const Position p0 = start ? *start : Position{place_rng.uniform(0.0, b.x_max), place_rng.uniform(0.0, b.y_max)};
    u.leg.origin = u.leg.destination = p0;
    u.leg.depart_time = engine_.now_s();
    u.apps = user_apps_;
    users_.push_back(u);
    mobility_rng_.push_back(derive_stream(seed_, {"mobility", uid, repeat_}));
    for (std::uint32_t a : user_apps_) {
      arrival_rng_.push_back(derive_stream(seed_, {"arrivals", (std::uint64_t{uid} << 16) | a, repeat_}));
      next_arrival_seq_.push_back(kNoEvent);
    }
    observe_position(uid, engine_.now_s(), p0);
    if (u.kind == UserKind::Mobile) start_leg(uid);
    for (std::uint32_t k = 0; k < user_apps_.size(); ++k) schedule_arrival(uid, k);
  }

  void wire_handlers() {
    engine_.on(EventKind::TaskArrival, [this](const EventRecord& ev) { on_task_arrival(ev); });
    engine_.on(EventKind::TaskCompletion, [this](const EventRecord& ev) { on_task_completion(ev); });
    engine_.on(EventKind::UserWaypointReached, [this](const EventRecord& ev) { on_waypoint(ev); });
    engine_.on(EventKind::UavRelocationTick, [this](const EventRecord&) { on_relocation_tick(); });
    engine_.on(EventKind::UavArrived, [this](const EventRecord& ev) { on_uav_arrived(ev); });
    engine_.on(EventKind::ScenarioEvent, [this](const EventRecord& ev) { apply_dynamic_event(spec_.events[ev.item]); });
    engine_.on(EventKind::SimulationEnd, [this](const EventRecord&) {
      if (engine_.logging()) engine_.annotate("tasks=" + std::to_string(tasks_.size()));
    });
  }

  // --- users and traffic ----------------------------------------------------

  std::size_t arrival_slot(std::uint32_t user, std::uint32_t k) const { return user * user_apps_.size() + k; }

  void schedule_arrival(std::uint32_t user, std::uint32_t k) {
    const std::size_t slot = arrival_slot(user, k);
    const auto& app = spec_.apps[user_apps_[k]];
    const double t = next_task_time(app, arrival_rng_[slot], engine_.now_s(), rate_multiplier_);
    next_arrival_seq_[slot] = t < spec_.sim.duration_s ? engine_.schedule(t, EventKind::TaskArrival, user, k) : kNoEvent;
  }

  void start_leg(std::uint32_t uid) {
    User& u = users_[uid];
    u.leg = rwp_next_leg(u, spec_.world.bounds, spec_.users.mobility, mobility_rng_[uid], engine_.now_s());
    const double arrive = u.leg.arrival_time();
    if (arrive <= spec_.sim.duration_s) engine_.schedule(arrive, EventKind::UserWaypointReached, uid);
  }

  void observe_position(std::uint32_t uid, double t, Position p) {
    ++audit_.checked;
    if (!spec_.world.bounds.contains(p)) ++audit_.violations;
    if (options_.position_observer) options_.position_observer(uid, t, p);
  }

  void on_waypoint(const EventRecord& ev) {
    const std::uint32_t uid = ev.entity;
    const Position p = users_[uid].leg.destination;
    observe_position(uid, engine_.now_s(), p);
    if (engine_.logging()) engine_.annotate("pos=" + fmt("%.3f", p.x) + ":" + fmt("%.3f", p.y));
    start_leg(uid);
  }

  // --- offloading -----------------------------------------------------------

  void on_task_arrival(const EventRecord& ev) {
    const double now = engine_.now_s();
    const std::uint32_t uid = ev.entity;
    const auto k = static_cast<std::uint32_t>(ev.item);
    const std::uint32_t app_index = user_apps_[k];
    const AppProfile& app = spec_.apps[app_index];
    const Position pos = position_at(users_[uid], now);
    observe_position(uid, now, pos);

    Task task;
    task.id = tasks_.size();
    task.app = app_index;
    task.owner = uid;
    task.created_at = now;

    const auto candidates = connected_candidates(pos, servers_, now);
    auto decision = select_target(task.id, candidates, cloud_);
    ServerId chosen = decision.chosen;
    if (options_.hook) chosen = consult_offload_hook(task, app, uid, decision);

    Server& server = servers_[chosen];
    task.target = chosen;
    task.tier = server.tier();
    task.delays.network = network_delay(app.task_size_bits, server.tier(), spec_.network);
    const double at_server = now + task.delays.network;
    double service = processing_time(app.comp_load, server.capacity());
    if (!service_rng_.empty()) service = service_rng_[chosen].exponential(service);
    const Assignment a = server.enqueue(task.id, at_server, service);
    task.delays.queueing = a.queueing_delay;
    task.delays.processing = a.processing_delay;
    task.completion_seq = engine_.schedule(a.completion, EventKind::TaskCompletion, chosen, task.id);

    if (engine_.logging()) {
      engine_.annotate("task=" + std::to_string(task.id) + " app=" + app.name + " pos=" + fmt("%.3f", pos.x) + ":" +
                       fmt("%.3f", pos.y) + " target=" + server.name() + " q=" + fmt("%.6f", a.queueing_delay));
    }
    tasks_.push_back(task);
    schedule_arrival(uid, k);
  }

  void on_task_completion(const EventRecord& ev) {
    Server& server = servers_[ev.entity];
    const TaskId head = server.complete_head();
    if (head != ev.item) throw Error(ErrorCode::kInternal, "FIFO violation on " + server.name());
    Task& t = tasks_[ev.item];
    judge(t, TaskStatus::Completed);
    if (engine_.logging())
      engine_.annotate("task=" + std::to_string(t.id) + " total=" + fmt("%.6f", t.delays.total()) +
                       (t.success ? " ok" : " miss"));
  }

  void judge(Task& t, TaskStatus status) {
    t.status = status;
    t.success = status == TaskStatus::Completed && judge_task(t.delays, spec_.apps[t.app].max_tolerable_delay_s);
    ++interval_judged_;
    if (t.success) ++interval_successes_;
    if (options_.hook) {
      Reward r;
      r.time = engine_.now_s();
      r.task = t.id;
      r.value = t.success ? 1.0 : 0.0;
      r.tasks = 1;
      options_.hook->reward(r);
    }
  }

  void finalize_pending() {
    for (auto& t : tasks_)
      if (t.status == TaskStatus::Pending) judge(t, TaskStatus::Completed);
  }

  // --- hook -----------------------------------------------------------------

  Observation base_observation(DecisionKind kind) {
    Observation obs;
    obs.kind = kind;
    obs.time = engine_.now_s();
    for (const auto& d : area_demand(users_, obs.time, grid_, spec_.apps, servers_, rate_multiplier_))
      obs.area_loads.push_back(d.offered_load);
    for (const auto& s : servers_) {
      ServerSnapshot snap;
      snap.id = s.name();
      snap.tier = s.tier();
      snap.alive = s.alive();
      snap.in_service = s.in_service();
      snap.backlog_s = s.queueing_delay_at(obs.time);
      if (obs.time > 0.0) snap.utilization = s.utilization(obs.time).value_or(0.0);
      if (s.tier() == Tier::Uav) snap.area = uavs_[s.id() - first_uav_].area;
      obs.servers.push_back(std::move(snap));
    }
    return obs;
  }

  template <typename F>
  std::optional<Action> ask_hook(const Observation& obs, F&& fallback_note) {
    try {
      auto action = options_.hook->act(obs);
      if (action) validate_action(obs, *action);
      return action;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInvalidAction) throw;
      ++invalid_actions_;
      if (engine_.logging()) engine_.annotate(std::string("invalid_action: ") + e.what());
      fallback_note();
      return std::nullopt;
    }
  }

  ServerId consult_offload_hook(const Task& task, const AppProfile& app, std::uint32_t uid,
                                const OffloadDecision& decision) {
    Observation obs = base_observation(DecisionKind::Offload);
    obs.task = task.id;
    obs.app = app.name;
    obs.user = uid;
    for (const auto& c : decision.candidates) {
      obs.candidates.push_back(servers_[c.id].name());
      obs.candidate_delays.push_back(c.queueing_delay);
    }
    obs.default_target = servers_[decision.chosen].name();
    const auto action = ask_hook(obs, [] {});
    if (!action || !action->offload_target) return decision.chosen;
    for (const auto& s : servers_)
      if (s.name() == *action->offload_target) return s.id();
    return decision.chosen;
  }

  // --- UAV fleet ------------------------------------------------------------

  Position uav_position(std::size_t k, double now) const {
    const UavState& st = uavs_[k];
    if (now >= st.arrive || st.arrive <= st.depart) return st.to;
    const double f = (now - st.depart) / (st.arrive - st.depart);
    return {std::lerp(st.from.x, st.to.x, f), std::lerp(st.from.y, st.to.y, f)};
  }

  void on_relocation_tick() {
    const double now = engine_.now_s();
    const bool first = !fleet_deployed_;
    fleet_deployed_ = true;

    const auto demands = area_demand(users_, now, grid_, spec_.apps, servers_, rate_multiplier_);
    std::vector<int> target = allocate_uavs(demands, spec_.uav.capacity, spec_.uav.fleet_size);

    if (options_.hook) {
      Observation obs = base_observation(DecisionKind::Relocation);
      obs.fleet_size = spec_.uav.fleet_size;
      obs.area_has_edge = area_has_edge_;
      obs.default_counts = target;
      if (auto action = ask_hook(obs, [] {}); action && action->uav_counts) target = *action->uav_counts;
      if (interval_judged_ > 0) {
        Reward r;
        r.time = now;
        r.value = static_cast<double>(interval_successes_) / static_cast<double>(interval_judged_);
        r.tasks = interval_judged_;
        options_.hook->reward(r);
      }
    }
    interval_judged_ = interval_successes_ = 0;

    std::vector<UavSlot> slots;
    for (std::size_t k = 0; k < uavs_.size(); ++k) {
      UavSlot s;
      s.area = uavs_[k].area;
      s.position = uav_position(k, now);
      s.backlog = servers_[first_uav_ + k].queueing_delay_at(now);
      slots.push_back(s);
    }
    const double speed = (first || spec_.uav.instant_flight) ? kInstantFlight : spec_.uav.speed_mps;
    const auto plan = relocate_fleet(slots, target, anchors_, speed, now);
    for (const auto& f : plan) {
      UavState& st = uavs_[f.uav];
      Server& s = servers_[first_uav_ + f.uav];
      if (st.arrival_seq != kNoEvent) engine_.cancel(st.arrival_seq);
      st.arrival_seq = kNoEvent;
      st.from = slots[f.uav].position;
      st.to = f.destination;
      st.depart = f.depart;
      st.arrive = f.arrive;
      st.area = f.to_area;
      s.set_position(f.destination);
      if (f.arrive <= now) {
        s.set_in_service(true);
      } else {
        s.set_in_service(false);
        st.arrival_seq = engine_.schedule(f.arrive, EventKind::UavArrived, static_cast<std::uint32_t>(f.uav));
      }
    }
    if (engine_.logging()) {
      std::string counts;
      for (int c : target) counts += (counts.empty() ? "" : ":") + std::to_string(c);
      engine_.annotate("counts=" + counts + " moved=" + std::to_string(plan.size()));
    }
    const double next = now + spec_.uav.relocation_period_s;
    if (next < spec_.sim.duration_s) engine_.schedule(next, EventKind::UavRelocationTick);
  }

  void on_uav_arrived(const EventRecord& ev) {
    UavState& st = uavs_[ev.entity];
    st.arrival_seq = kNoEvent;
    servers_[first_uav_ + ev.entity].set_in_service(true);
    if (engine_.logging()) engine_.annotate("uav=" + servers_[first_uav_ + ev.entity].name());
  }

  // --- dynamic events -------------------------------------------------------

  ServerId server_by_name(const std::string& name) const {
    for (const auto& s : servers_)
      if (s.name() == name) return s.id();
    throw Error(ErrorCode::kInvalidArgument, "unknown server '" + name + "'");
  }

  void apply_dynamic_event(const DynamicEvent& ev) {
    const double now = engine_.now_s();
    switch (ev.kind) {
      case DynamicEventKind::ServerFailure: {
        Server& s = servers_[server_by_name(ev.server)];
        const auto lost = s.fail(now);
        for (TaskId id : lost) {
          engine_.cancel(tasks_[id].completion_seq);
          judge(tasks_[id], TaskStatus::ServerFailed);
        }
        if (engine_.logging()) engine_.annotate("fail=" + ev.server + " lost=" + std::to_string(lost.size()));
        break;
      }
      case DynamicEventKind::ServerRestore:
        servers_[server_by_name(ev.server)].restore(now);
        if (engine_.logging()) engine_.annotate("restore=" + ev.server);
        break;
      case DynamicEventKind::CapacitySurge: {
        rate_multiplier_ *= ev.multiplier;
        // Exponential gaps are memoryless, so redrawing every pending arrival
        // at the new rate is exact.
        for (std::uint32_t u = 0; u < users_.size(); ++u) {
          for (std::uint32_t k = 0; k < user_apps_.size(); ++k) {
            auto& seq = next_arrival_seq_[arrival_slot(u, k)];
            if (seq == kNoEvent) continue;
            engine_.cancel(seq);
            schedule_arrival(u, k);
          }
        }
        if (engine_.logging()) engine_.annotate("surge=" + fmt("%.6f", rate_multiplier_));
        break;
      }
      case DynamicEventKind::UserBurst:
        for (int i = 0; i < ev.count; ++i) add_user(ev.at);
        if (engine_.logging()) engine_.annotate("burst=" + std::to_string(ev.count));
        break;
    }
  }

  const ScenarioSpec& spec_;
  std::uint64_t seed_;
  std::uint64_t repeat_;
  const RunOptions& options_;
  Engine engine_;
  AreaGrid grid_;
  std::vector<std::uint32_t> user_apps_;

  std::vector<Server> servers_;
  ServerId cloud_ = 0;
  ServerId first_uav_ = 0;
  std::vector<UavState> uavs_;
  std::vector<Position> anchors_;
  std::vector<bool> area_has_edge_;
  std::vector<RngStream> service_rng_;
  bool fleet_deployed_ = false;

  std::vector<User> users_;
  std::vector<RngStream> mobility_rng_;
  std::vector<RngStream> arrival_rng_;
  std::vector<std::uint64_t> next_arrival_seq_;
  double rate_multiplier_ = 1.0;

  std::vector<Task> tasks_;
  PositionAudit audit_;
  std::uint64_t invalid_actions_ = 0;
  std::uint64_t interval_judged_ = 0;
  std::uint64_t interval_successes_ = 0;
};

}  // namespace

RunResult simulate(const ScenarioSpec& spec, std::uint64_t run_seed, int repeat, const RunOptions& options) {
  spec.validate();
  World world(spec, run_seed, repeat, options);
  return world.run();
}

}  // namespace aircomp
