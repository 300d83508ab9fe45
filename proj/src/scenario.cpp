#include "aircomp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "aircomp/error.hpp"
#include "aircomp/sim_core.hpp"

namespace aircomp {

using ojson = nlohmann::ordered_json;

namespace {

// Wraps one JSON object, tracks which keys were read and rejects the rest.
class Section {
 public:
  Section(const ojson& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_, "must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const ojson* get(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const char* key, double fallback) {
    const ojson* v = get(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ValidationError(field(key), "must be a number");
    return v->get<double>();
  }

  int integer(const char* key, int fallback) {
    const ojson* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ValidationError(field(key), "must be an integer");
    const auto x = v->get<long long>();
    if (x < -1'000'000'000LL || x > 1'000'000'000LL) throw ValidationError(field(key), "out of range");
    return static_cast<int>(x);
  }

  std::uint64_t unsigned64(const char* key, std::uint64_t fallback) {
    const ojson* v = get(key);
    if (!v) return fallback;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
      throw ValidationError(field(key), "must be a non-negative integer");
    return v->get<std::uint64_t>();
  }

  bool boolean(const char* key, bool fallback) {
    const ojson* v = get(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ValidationError(field(key), "must be true or false");
    return v->get<bool>();
  }

  std::string string(const char* key, const std::string& fallback) {
    const ojson* v = get(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ValidationError(field(key), "must be a string");
    return v->get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ValidationError(field(it.key().c_str()), "unknown key");
  }

 private:
  const ojson& j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

std::string indexed(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void require_finite_positive(double v, const std::string& field) {
  if (!std::isfinite(v) || !(v > 0.0)) throw ValidationError(field, "must be finite and > 0");
}

DynamicEventKind event_kind_from(const std::string& s, const std::string& field) {
  if (s == "server_failure") return DynamicEventKind::ServerFailure;
  if (s == "server_restore") return DynamicEventKind::ServerRestore;
  if (s == "capacity_surge") return DynamicEventKind::CapacitySurge;
  if (s == "user_burst") return DynamicEventKind::UserBurst;
  throw ValidationError(field, "must be one of server_failure, server_restore, capacity_surge, user_burst");
}

const char* event_kind_name(DynamicEventKind k) {
  switch (k) {
    case DynamicEventKind::ServerFailure: return "server_failure";
    case DynamicEventKind::ServerRestore: return "server_restore";
    case DynamicEventKind::CapacitySurge: return "capacity_surge";
    case DynamicEventKind::UserBurst: return "user_burst";
  }
  return "?";
}

bool is_known_axis(std::string_view name) {
  return std::find(std::begin(kSweepAxisNames), std::end(kSweepAxisNames), name) != std::end(kSweepAxisNames);
}

AppProfile parse_app(const ojson& j, const std::string& path) {
  Section s(j, path);
  AppProfile a;
  a.name = s.string("name", "");
  a.mean_interarrival_s = s.number("mean_interarrival_s", 0.0);
  a.comp_load = s.number("comp_load", 0.0);
  a.max_tolerable_delay_s = s.number("max_tolerable_delay_s", 0.0);
  a.task_size_bits = s.number("task_size_bits", 500e3);
  s.finish();
  return a;
}

}  // namespace

void ScenarioSpec::validate() const {
  if (!(world.bounds.x_max > 0.0) || !std::isfinite(world.bounds.x_max))
    throw ValidationError("world.x_max", "must be finite and > 0");
  if (!(world.bounds.y_max > 0.0) || !std::isfinite(world.bounds.y_max))
    throw ValidationError("world.y_max", "must be finite and > 0");
  if (world.grid_rows < 1) throw ValidationError("world.grid_rows", "must be >= 1");
  if (world.grid_cols < 1) throw ValidationError("world.grid_cols", "must be >= 1");

  network.validate();

  std::set<std::string> ids;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    const auto path = indexed("servers.edges", i);
    if (e.id.empty()) throw ValidationError(path + ".id", "must not be empty");
    if (!ids.insert(e.id).second) throw ValidationError(path + ".id", "duplicate server id '" + e.id + "'");
    if (!world.bounds.contains(e.position)) throw ValidationError(path, "position outside the world bounds");
    require_finite_positive(e.radius, path + ".radius");
    require_finite_positive(e.capacity, path + ".capacity");
  }
  if (cloud.id.empty()) throw ValidationError("servers.cloud.id", "must not be empty");
  if (!ids.insert(cloud.id).second) throw ValidationError("servers.cloud.id", "duplicate server id '" + cloud.id + "'");
  require_finite_positive(cloud.capacity, "servers.cloud.capacity");

  if (uav.fleet_size < 0) throw ValidationError("servers.uav.fleet_size", "must be >= 0");
  require_finite_positive(uav.capacity, "servers.uav.capacity");
  require_finite_positive(uav.radius, "servers.uav.radius");
  if (!(uav.altitude >= 0.0) || !std::isfinite(uav.altitude))
    throw ValidationError("servers.uav.altitude", "must be finite and >= 0");
  require_finite_positive(uav.speed_mps, "servers.uav.speed_mps");
  require_finite_positive(uav.relocation_period_s, "servers.uav.relocation_period_s");

  if (users.count < 0) throw ValidationError("users.count", "must be >= 0");
  if (!(users.nomadic_fraction >= 0.0 && users.nomadic_fraction <= 1.0))
    throw ValidationError("users.nomadic_fraction", "must lie in [0, 1]");
  require_finite_positive(users.mobility.speed_min_mps, "users.speed_min_mps");
  if (!(users.mobility.speed_max_mps >= users.mobility.speed_min_mps) || !std::isfinite(users.mobility.speed_max_mps))
    throw ValidationError("users.speed_max_mps", "must be finite and >= speed_min_mps");
  if (!(users.mobility.pause_max_s >= 0.0) || !std::isfinite(users.mobility.pause_max_s))
    throw ValidationError("users.pause_max_s", "must be finite and >= 0");

  if (apps.empty()) throw ValidationError("apps", "at least one application is required");
  std::set<std::string> app_names;
  for (std::size_t i = 0; i < apps.size(); ++i) {
    apps[i].validate(indexed("apps", i));
    if (!app_names.insert(apps[i].name).second) throw ValidationError(indexed("apps", i) + ".name", "duplicate app name");
  }
  for (std::size_t i = 0; i < users.apps.size(); ++i)
    if (!app_names.count(users.apps[i])) throw ValidationError(indexed("users.apps", i), "unknown app '" + users.apps[i] + "'");

  if (!std::isfinite(sim.duration_s) || !(sim.duration_s > 0.0)) throw ValidationError("sim.duration_s", "must be finite and > 0");
  if (sim.repeats < 1) throw ValidationError("sim.repeats", "must be >= 1");

  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    const auto path = indexed("events", i);
    if (!(ev.time >= 0.0 && ev.time <= sim.duration_s)) throw ValidationError(path + ".time", "must lie in [0, sim.duration_s]");
    switch (ev.kind) {
      case DynamicEventKind::ServerFailure:
      case DynamicEventKind::ServerRestore:
        if (!ids.count(ev.server)) throw ValidationError(path + ".server", "unknown server '" + ev.server + "'");
        break;
      case DynamicEventKind::CapacitySurge:
        require_finite_positive(ev.multiplier, path + ".multiplier");
        break;
      case DynamicEventKind::UserBurst:
        if (ev.count < 0) throw ValidationError(path + ".count", "must be >= 0");
        if (!world.bounds.contains(ev.at)) throw ValidationError(path, "burst position outside the world bounds");
        break;
    }
  }

  std::set<std::string> axes;
  for (std::size_t i = 0; i < sweeps.size(); ++i) {
    const auto& ax = sweeps[i];
    const auto path = "sweeps." + ax.name;
    if (!is_known_axis(ax.name)) throw ValidationError(path, "unknown sweep axis");
    if (!axes.insert(ax.name).second) throw ValidationError(path, "axis declared twice");
    if (ax.values.empty()) throw ValidationError(path, "must list at least one value");
    for (std::size_t k = 0; k < ax.values.size(); ++k) {
      const double v = ax.values[k];
      if (ax.name == "users" || ax.name == "uavs") {
        if (!(v >= 0.0) || v != std::floor(v) || v > 1e6) throw ValidationError(indexed(path, k), "must be a non-negative integer");
      } else {
        require_finite_positive(v, indexed(path, k));
      }
    }
  }
}

std::vector<std::uint32_t> ScenarioSpec::user_app_indices() const {
  std::vector<std::uint32_t> out;
  if (users.apps.empty()) {
    for (std::uint32_t i = 0; i < apps.size(); ++i) out.push_back(i);
    return out;
  }
  for (const auto& n : users.apps) {
    for (std::uint32_t i = 0; i < apps.size(); ++i)
      if (apps[i].name == n) out.push_back(i);
  }
  return out;
}

ScenarioSpec load_scenario(std::string_view text) {
  ojson root;
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    root = ojson::object();
  } else {
    try {
      root = ojson::parse(text);
    } catch (const ojson::parse_error& e) {
      throw Error(ErrorCode::kParse, std::string("scenario parse error: ") + e.what());
    }
  }
  if (!root.is_object()) throw ValidationError("(root)", "scenario must be an object");

  std::vector<std::string> missing;
  for (const char* req : {"world", "servers", "users", "sim"})
    if (!root.contains(req)) missing.push_back(req);
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ValidationError("(root)", "missing required sections: " + list);
  }

  ScenarioSpec spec;
  Section top(root, "");
  spec.name = top.string("name", spec.name);

  {
    Section w(*top.get("world"), "world");
    spec.world.bounds.x_max = w.number("x_max", 400.0);
    spec.world.bounds.y_max = w.number("y_max", 400.0);
    spec.world.grid_rows = w.integer("grid_rows", 2);
    spec.world.grid_cols = w.integer("grid_cols", 2);
    w.finish();
  }

  if (const ojson* n = top.get("network")) {
    Section s(*n, "network");
    spec.network.data_rate_bps = s.number("data_rate_bps", spec.network.data_rate_bps);
    spec.network.edge_access_latency_s = s.number("edge_latency_s", spec.network.edge_access_latency_s);
    spec.network.cloud_wan_latency_s = s.number("cloud_wan_latency_s", spec.network.cloud_wan_latency_s);
    if (const ojson* p = s.get("uav_preset"); p && !p->is_null()) {
      if (!p->is_string()) throw ValidationError("network.uav_preset", "must be a string");
      spec.uav_preset = p->get<std::string>();
      spec.network.uav_access_latency_s = platform_band(*spec.uav_preset).midpoint();
    }
    // An explicit latency overrides the preset midpoint.
    spec.network.uav_access_latency_s = s.number("uav_latency_s", spec.network.uav_access_latency_s);
    s.finish();
  }

  {
    Section s(*top.get("servers"), "servers");
    if (const ojson* edges = s.get("edges")) {
      if (!edges->is_array()) throw ValidationError("servers.edges", "must be an array");
      for (std::size_t i = 0; i < edges->size(); ++i) {
        Section e((*edges)[i], indexed("servers.edges", i));
        EdgeSpec es;
        es.id = e.string("id", "edge_" + std::to_string(i + 1));
        if (!e.has("x") || !e.has("y")) throw ValidationError(indexed("servers.edges", i), "x and y are required");
        es.position = {e.number("x", 0.0), e.number("y", 0.0)};
        es.radius = e.number("radius", es.radius);
        es.capacity = e.number("capacity", es.capacity);
        e.finish();
        spec.edges.push_back(std::move(es));
      }
    }
    if (const ojson* c = s.get("cloud")) {
      Section cs(*c, "servers.cloud");
      spec.cloud.id = cs.string("id", spec.cloud.id);
      spec.cloud.capacity = cs.number("capacity", spec.cloud.capacity);
      cs.finish();
    }
    if (const ojson* u = s.get("uav")) {
      Section us(*u, "servers.uav");
      auto& f = spec.uav;
      f.fleet_size = us.integer("fleet_size", f.fleet_size);
      f.capacity = us.number("capacity", f.capacity);
      f.radius = us.number("radius", f.radius);
      f.altitude = us.number("altitude", f.altitude);
      f.speed_mps = us.number("speed_mps", f.speed_mps);
      f.instant_flight = us.boolean("instant_flight", f.instant_flight);
      f.relocation_period_s = us.number("relocation_period_s", f.relocation_period_s);
      us.finish();
    }
    const auto model = s.string("service_model", "deterministic");
    if (model == "deterministic") {
      spec.service = ServiceModel::Deterministic;
    } else if (model == "exponential") {
      spec.service = ServiceModel::Exponential;
    } else {
      throw ValidationError("servers.service_model", "must be deterministic or exponential");
    }
    s.finish();
  }

  {
    Section s(*top.get("users"), "users");
    auto& u = spec.users;
    u.count = s.integer("count", u.count);
    u.nomadic_fraction = s.number("nomadic_fraction", u.nomadic_fraction);
    u.mobility.speed_min_mps = s.number("speed_min_mps", u.mobility.speed_min_mps);
    u.mobility.speed_max_mps = s.number("speed_max_mps", u.mobility.speed_max_mps);
    u.mobility.pause_max_s = s.number("pause_max_s", u.mobility.pause_max_s);
    if (const ojson* a = s.get("apps")) {
      if (!a->is_array()) throw ValidationError("users.apps", "must be an array of app names");
      for (std::size_t i = 0; i < a->size(); ++i) {
        if (!(*a)[i].is_string()) throw ValidationError(indexed("users.apps", i), "must be a string");
        u.apps.push_back((*a)[i].get<std::string>());
      }
    }
    s.finish();
  }

  if (const ojson* a = top.get("apps"); a && !(a->is_string() && a->get<std::string>() == "paper_apps")) {
    if (!a->is_array()) throw ValidationError("apps", "must be \"paper_apps\" or an array of app records");
    for (std::size_t i = 0; i < a->size(); ++i) spec.apps.push_back(parse_app((*a)[i], indexed("apps", i)));
  } else {
    spec.apps = paper_apps();
    spec.apps_from_preset = true;
  }

  {
    Section s(*top.get("sim"), "sim");
    spec.sim.duration_s = s.number("duration_s", spec.sim.duration_s);
    spec.sim.repeats = s.integer("repeats", spec.sim.repeats);
    spec.sim.root_seed = s.unsigned64("root_seed", spec.sim.root_seed);
    s.finish();
  }

  if (const ojson* evs = top.get("events")) {
    if (!evs->is_array()) throw ValidationError("events", "must be an array");
    for (std::size_t i = 0; i < evs->size(); ++i) {
      const auto path = indexed("events", i);
      Section s((*evs)[i], path);
      DynamicEvent ev;
      if (!s.has("time")) throw ValidationError(path + ".time", "is required");
      ev.time = s.number("time", 0.0);
      ev.kind = event_kind_from(s.string("kind", ""), path + ".kind");
      switch (ev.kind) {
        case DynamicEventKind::ServerFailure:
        case DynamicEventKind::ServerRestore:
          ev.server = s.string("server", "");
          break;
        case DynamicEventKind::CapacitySurge:
          ev.multiplier = s.number("multiplier", 0.0);
          break;
        case DynamicEventKind::UserBurst:
          ev.count = s.integer("count", 0);
          ev.at = {s.number("x", 0.0), s.number("y", 0.0)};
          break;
      }
      s.finish();
      spec.events.push_back(std::move(ev));
    }
  }

  if (const ojson* sw = top.get("sweeps")) {
    if (!sw->is_object()) throw ValidationError("sweeps", "must be an object of axis arrays");
    for (auto it = sw->begin(); it != sw->end(); ++it) {
      const auto path = "sweeps." + it.key();
      if (!it->is_array()) throw ValidationError(path, "must be an array of numbers");
      SweepAxis ax{it.key(), {}};
      for (std::size_t k = 0; k < it->size(); ++k) {
        if (!(*it)[k].is_number()) throw ValidationError(indexed(path, k), "must be a number");
        ax.values.push_back((*it)[k].get<double>());
      }
      spec.sweeps.push_back(std::move(ax));
    }
  }

  top.finish();
  spec.validate();
  return spec;
}

ScenarioSpec load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

std::string serialize_scenario(const ScenarioSpec& spec, int indent) {
  ojson j;
  j["name"] = spec.name;
  j["world"] = {{"x_max", spec.world.bounds.x_max},
                {"y_max", spec.world.bounds.y_max},
                {"grid_rows", spec.world.grid_rows},
                {"grid_cols", spec.world.grid_cols}};
  ojson net{{"data_rate_bps", spec.network.data_rate_bps},
            {"edge_latency_s", spec.network.edge_access_latency_s},
            {"uav_latency_s", spec.network.uav_access_latency_s},
            {"cloud_wan_latency_s", spec.network.cloud_wan_latency_s}};
  if (spec.uav_preset) net["uav_preset"] = *spec.uav_preset;
  j["network"] = net;
  ojson edges = ojson::array();
  for (const auto& e : spec.edges)
    edges.push_back({{"id", e.id}, {"x", e.position.x}, {"y", e.position.y}, {"radius", e.radius}, {"capacity", e.capacity}});
  j["servers"] = {{"edges", edges},
                  {"cloud", {{"id", spec.cloud.id}, {"capacity", spec.cloud.capacity}}},
                  {"uav",
                   {{"fleet_size", spec.uav.fleet_size},
                    {"capacity", spec.uav.capacity},
                    {"radius", spec.uav.radius},
                    {"altitude", spec.uav.altitude},
                    {"speed_mps", spec.uav.speed_mps},
                    {"instant_flight", spec.uav.instant_flight},
                    {"relocation_period_s", spec.uav.relocation_period_s}}},
                  {"service_model", spec.service == ServiceModel::Deterministic ? "deterministic" : "exponential"}};
  j["users"] = {{"count", spec.users.count},
                {"nomadic_fraction", spec.users.nomadic_fraction},
                {"speed_min_mps", spec.users.mobility.speed_min_mps},
                {"speed_max_mps", spec.users.mobility.speed_max_mps},
                {"pause_max_s", spec.users.mobility.pause_max_s},
                {"apps", spec.users.apps}};
  ojson apps = ojson::array();
  for (const auto& a : spec.apps)
    apps.push_back({{"name", a.name},
                    {"mean_interarrival_s", a.mean_interarrival_s},
                    {"comp_load", a.comp_load},
                    {"max_tolerable_delay_s", a.max_tolerable_delay_s},
                    {"task_size_bits", a.task_size_bits}});
  j["apps"] = apps;
  j["sim"] = {{"duration_s", spec.sim.duration_s}, {"repeats", spec.sim.repeats}, {"root_seed", spec.sim.root_seed}};
  ojson evs = ojson::array();
  for (const auto& ev : spec.events) {
    ojson e{{"time", ev.time}, {"kind", event_kind_name(ev.kind)}};
    switch (ev.kind) {
      case DynamicEventKind::ServerFailure:
      case DynamicEventKind::ServerRestore: e["server"] = ev.server; break;
      case DynamicEventKind::CapacitySurge: e["multiplier"] = ev.multiplier; break;
      case DynamicEventKind::UserBurst:
        e["count"] = ev.count;
        e["x"] = ev.at.x;
        e["y"] = ev.at.y;
        break;
    }
    evs.push_back(std::move(e));
  }
  j["events"] = evs;
  ojson sw = ojson::object();
  for (const auto& ax : spec.sweeps) sw[ax.name] = ax.values;
  j["sweeps"] = sw;
  return j.dump(indent);
}

std::uint64_t scenario_hash(const ScenarioSpec& spec) { return fnv1a64(serialize_scenario(spec)); }

void apply_axis(ScenarioSpec& spec, std::string_view axis, double value) {
  if (axis == "users") {
    spec.users.count = static_cast<int>(value);
  } else if (axis == "uavs") {
    spec.uav.fleet_size = static_cast<int>(value);
  } else if (axis == "uav_capacity") {
    spec.uav.capacity = value;
  } else if (axis == "edge_capacity") {
    for (auto& e : spec.edges) e.capacity = value;
  } else if (axis == "cloud_wan_latency_s") {
    spec.network.cloud_wan_latency_s = value;
  } else if (axis == "relocation_period_s") {
    spec.uav.relocation_period_s = value;
  } else if (axis == "uav_speed_mps") {
    spec.uav.speed_mps = value;
  } else {
    throw ValidationError("sweeps." + std::string(axis), "unknown sweep axis");
  }
}

SweepPlan expand_sweep(const ScenarioSpec& spec) {
  SweepPlan plan;
  std::vector<SweepAxis> axes;
  for (const auto& ax : spec.sweeps) {
    SweepAxis clean{ax.name, {}};
    for (double v : ax.values) {
      if (std::find(clean.values.begin(), clean.values.end(), v) != clean.values.end()) {
        std::ostringstream msg;
        msg << "sweeps." << ax.name << ": duplicate value " << v << " dropped";
        plan.warnings.push_back(msg.str());
        continue;
      }
      clean.values.push_back(v);
    }
    axes.push_back(std::move(clean));
  }

  ScenarioSpec base = spec;
  base.sweeps.clear();
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    ConfigPoint cp;
    cp.spec = base;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const double v = axes[a].values[idx[a]];
      cp.axes.emplace_back(axes[a].name, v);
      apply_axis(cp.spec, axes[a].name, v);
    }
    cp.spec.validate();
    plan.configs.push_back(std::move(cp));
    // Odometer increment, last axis fastest.
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].values.size()) break;
      idx[a] = 0;
      if (a == 0) { a = axes.size() + 1; break; }
    }
    if (axes.empty() || a == axes.size() + 1) break;
  }

  for (std::size_t c = 0; c < plan.configs.size(); ++c)
    for (int r = 0; r < spec.sim.repeats; ++r)
      plan.runs.push_back({c, r, derive_run_seed(spec.sim.root_seed, static_cast<std::uint64_t>(r))});
  return plan;
}

}  // namespace aircomp
