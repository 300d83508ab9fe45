#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "aircomp/error.hpp"
#include "aircomp/policies.hpp"

using namespace aircomp;

namespace {

AreaDemand demand(AreaId area, double deficit, double offered, bool has_edge = true) {
  return {area, offered, 1000.0, deficit, has_edge};
}

std::vector<AreaDemand> deficits(std::initializer_list<double> ds) {
  std::vector<AreaDemand> out;
  AreaId a = 0;
  for (double d : ds) {
    out.push_back(demand(a, d, 1000.0 + d - (d == 0 ? 200.0 + a : 0.0)));
    ++a;
  }
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

}  // namespace

// --- select_target ----------------------------------------------------------

TEST_CASE("lower queueing delay wins") {
  const std::vector<Candidate> c{{0, Tier::Edge, 0.4}, {5, Tier::Uav, 0.1}};
  const auto d = select_target(1, c, 4);
  CHECK(d.chosen == 5);
  CHECK_FALSE(d.cloud_fallback);
  CHECK(d.candidates.size() == 2);
}

TEST_CASE("no candidates falls back to the cloud") {
  const auto d = select_target(1, {}, 4);
  CHECK(d.chosen == 4);
  CHECK(d.cloud_fallback);
}

TEST_CASE("ties go to the edge, then the lower id") {
  CHECK(select_target(1, std::vector<Candidate>{{6, Tier::Uav, 0}, {2, Tier::Edge, 0}}, 9).chosen == 2);
  CHECK(select_target(1, std::vector<Candidate>{{7, Tier::Uav, 0}, {6, Tier::Uav, 0}}, 9).chosen == 6);
  CHECK(select_target(1, std::vector<Candidate>{{3, Tier::Edge, 0}, {1, Tier::Edge, 0}}, 9).chosen == 1);
}

TEST_CASE("property: the chosen candidate has minimal delay") {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> n(1, 8), d(0, 4);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<Candidate> c;
    const int k = n(gen);
    for (int i = 0; i < k; ++i)
      c.push_back({static_cast<ServerId>(i), i % 3 == 0 ? Tier::Edge : Tier::Uav, d(gen) * 0.25});
    const auto dec = select_target(0, c, 100);
    const auto& chosen = *std::find_if(c.begin(), c.end(), [&](const Candidate& x) { return x.id == dec.chosen; });
    for (const auto& x : c) {
      CHECK(chosen.queueing_delay <= x.queueing_delay);
      if (x.queueing_delay == chosen.queueing_delay && x.id != chosen.id) {
        const bool tier_first = chosen.tier == Tier::Edge && x.tier == Tier::Uav;
        CHECK((tier_first || (chosen.tier == x.tier && chosen.id < x.id)));
      }
    }
  }
}

TEST_CASE("connected candidates skip dead, flying and distant servers") {
  std::vector<Server> servers;
  servers.emplace_back(0, "edge_1", Tier::Edge, Position{100, 100}, 100, 1000);
  servers.emplace_back(1, "edge_2", Tier::Edge, Position{300, 100}, 100, 1000);
  servers.emplace_back(2, "cloud", Tier::Cloud, std::nullopt, 0, 20000);
  servers.emplace_back(3, "uav_1", Tier::Uav, Position{100, 100}, 100, 500);
  servers.emplace_back(4, "uav_2", Tier::Uav, Position{100, 100}, 100, 500);
  servers[4].set_in_service(false);
  servers[0].enqueue(1, 0.0, 2.0);
  auto c = connected_candidates({120, 100}, servers, 1.0);
  REQUIRE(c.size() == 2);
  CHECK(c[0].id == 0);
  CHECK(c[0].queueing_delay == doctest::Approx(1.0));
  CHECK(c[1].id == 3);
  CHECK(select_target(9, c, 2).chosen == 3);
  servers[0].fail(1.0);
  c = connected_candidates({120, 100}, servers, 1.0);
  REQUIRE(c.size() == 1);
  CHECK(c[0].id == 3);
  CHECK(connected_candidates({0, 399}, servers, 1.0).empty());
}

// --- area_demand ------------------------------------------------------------

TEST_CASE("area demand from user positions and edge capacity") {
  const AreaGrid grid(2, 2, WorldBounds{400, 400});
  const auto apps = paper_apps();
  std::vector<Server> servers;
  servers.emplace_back(0, "edge_1", Tier::Edge, Position{100, 100}, 100, 1000);
  std::vector<User> users;
  for (std::uint32_t i = 0; i < 25; ++i) {
    User u;
    u.id = i;
    u.apps = {0, 1, 2, 3};
    u.leg.origin = u.leg.destination = {50, 60};
    users.push_back(u);
  }
  const auto d = area_demand(users, 0.0, grid, apps, servers);
  REQUIRE(d.size() == 4);
  const AreaId a = grid.area_of({50, 60});
  CHECK(d[a].offered_load == doctest::Approx(1500.0));
  CHECK(d[a].edge_capacity == 1000.0);
  CHECK(d[a].deficit == doctest::Approx(500.0));
  CHECK(d[a].has_edge);
  for (AreaId k = 0; k < 4; ++k) {
    if (k == a) continue;
    CHECK(d[k].offered_load == 0.0);
    CHECK(d[k].deficit == 0.0);
    CHECK_FALSE(d[k].has_edge);
  }
  const auto one = area_demand(std::span<const User>(users.data(), 1), 0.0, grid, apps, servers);
  CHECK(one[a].offered_load == doctest::Approx(60.0));
  const auto surge = area_demand(users, 0.0, grid, apps, servers, 2.0);
  CHECK(surge[a].deficit == doctest::Approx(2000.0));
}

TEST_CASE("dead edges contribute no capacity") {
  const AreaGrid grid(1, 1, WorldBounds{200, 200});
  std::vector<Server> servers;
  servers.emplace_back(0, "edge_1", Tier::Edge, Position{100, 100}, 100, 1000);
  servers[0].fail(0.0);
  User u;
  u.apps = {0};
  u.leg.origin = u.leg.destination = {10, 10};
  const auto d = area_demand(std::span<const User>(&u, 1), 0.0, grid, paper_apps(), servers);
  CHECK(d[0].edge_capacity == 0.0);
  CHECK(d[0].deficit == doctest::Approx(10.0));
  CHECK(d[0].has_edge);
}

// --- allocate_uavs ----------------------------------------------------------

TEST_CASE("allocation examples") {
  CHECK(allocate_uavs(deficits({500, 0, 0, 0}), 500, 2) == std::vector<int>{2, 0, 0, 0});
  CHECK(allocate_uavs(deficits({1200, 700, 0, 0}), 500, 3) == std::vector<int>{3, 0, 0, 0});
  CHECK(allocate_uavs(deficits({1200, 700, 0, 0}), 500, 0) == std::vector<int>{0, 0, 0, 0});
  // Needs (3,2) met exactly, then one leftover per area by offered load.
  CHECK(allocate_uavs(deficits({1200, 700, 0, 0}), 500, 8) == std::vector<int>{4, 3, 1, 0});
}

TEST_CASE("areas without an edge never receive UAVs") {
  std::vector<AreaDemand> d{demand(0, 0, 100), demand(1, 900, 900, false), demand(2, 0, 50)};
  d[1].edge_capacity = 0;
  CHECK(allocate_uavs(d, 500, 5) == std::vector<int>{3, 0, 2});
  std::vector<AreaDemand> none{demand(0, 100, 100, false)};
  CHECK(allocate_uavs(none, 500, 4) == std::vector<int>{0});
}

TEST_CASE("allocation rejects bad arguments") {
  CHECK(code_of([] { allocate_uavs(deficits({0}), 500, -1); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { allocate_uavs(deficits({0}), 0, 1); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("property: allocation respects fleet size, needs and priority") {
  std::mt19937_64 gen(2);
  std::uniform_int_distribution<int> areas(1, 6), fleet(0, 25), units(0, 12);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = areas(gen);
    std::vector<AreaDemand> d;
    for (int a = 0; a < n; ++a) {
      const double deficit = units(gen) * 125.0;
      d.push_back(demand(a, deficit, 1000.0 + deficit + units(gen)));
    }
    const double cap = 500.0;
    const int f = fleet(gen);
    const auto counts = allocate_uavs(d, cap, f);
    std::vector<int> need(n);
    int total_need = 0;
    for (int a = 0; a < n; ++a) total_need += need[a] = static_cast<int>(std::ceil(d[a].deficit / cap));
    CHECK(std::accumulate(counts.begin(), counts.end(), 0) == f);
    if (f >= total_need) {
      for (int a = 0; a < n; ++a) CHECK(counts[a] >= need[a]);
    } else {
      for (int i = 0; i < n; ++i) {
        CHECK(counts[i] <= need[i]);
        for (int j = 0; j < n; ++j)
          if (d[i].deficit > d[j].deficit && counts[j] > 0) CHECK(counts[i] == need[i]);
      }
    }
  }
}

// --- relocate_fleet ---------------------------------------------------------

TEST_CASE("a UAV already at its target area does not move") {
  const std::vector<UavSlot> fleet{{0, Position{100, 100}, 0.0}};
  const std::vector<int> target{1, 0};
  const std::vector<Position> anchors{{100, 100}, {300, 100}};
  CHECK(relocate_fleet(fleet, target, anchors, 10.0, 50.0).empty());
}

TEST_CASE("a reassigned UAV flies at the configured speed") {
  const std::vector<UavSlot> fleet{{0, Position{100, 100}, 0.0}};
  const std::vector<int> target{0, 1};
  const std::vector<Position> anchors{{100, 100}, {300, 100}};
  const auto plan = relocate_fleet(fleet, target, anchors, 10.0, 50.0);
  REQUIRE(plan.size() == 1);
  CHECK(plan[0].uav == 0);
  CHECK(plan[0].to_area == 1);
  CHECK(plan[0].destination == Position{300, 100});
  CHECK(plan[0].arrive - plan[0].depart == doctest::Approx(20.0));
}

TEST_CASE("instant flight lands immediately") {
  const std::vector<UavSlot> fleet{{std::nullopt, Position{0, 0}, 0.0}, {std::nullopt, Position{0, 0}, 0.0}};
  const std::vector<int> target{1, 1};
  const std::vector<Position> anchors{{100, 100}, {300, 100}};
  const auto plan = relocate_fleet(fleet, target, anchors, kInstantFlight, 7.0);
  REQUIRE(plan.size() == 2);
  for (const auto& f : plan) CHECK(f.arrive == 7.0);
}

TEST_CASE("surplus UAVs with the smallest backlog move first") {
  const std::vector<UavSlot> fleet{{0, Position{100, 100}, 5.0}, {0, Position{100, 100}, 0.5}, {0, Position{100, 100}, 2.0}};
  const std::vector<int> target{2, 1};
  const std::vector<Position> anchors{{100, 100}, {300, 100}};
  const auto plan = relocate_fleet(fleet, target, anchors, 10.0, 0.0);
  REQUIRE(plan.size() == 1);
  CHECK(plan[0].uav == 1);
}

TEST_CASE("property: relocation reaches the target with the fewest moves") {
  std::mt19937_64 gen(23);
  std::uniform_int_distribution<int> areas(1, 4), size(0, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = areas(gen);
    std::uniform_int_distribution<int> area(-1, n - 1);
    std::vector<UavSlot> fleet;
    const int m = size(gen);
    for (int i = 0; i < m; ++i) {
      const int a = area(gen);
      fleet.push_back({a < 0 ? std::nullopt : std::optional<AreaId>(a), Position{1.0 * i, 0}, 1.0 * (i % 3)});
    }
    std::vector<int> target(n, 0);
    std::uniform_int_distribution<int> pick(0, n - 1);
    const int assign = std::uniform_int_distribution<int>(0, m)(gen);
    for (int i = 0; i < assign; ++i) ++target[pick(gen)];
    std::vector<Position> anchors;
    for (int a = 0; a < n; ++a) anchors.push_back({100.0 * a, 100.0});

    const auto plan = relocate_fleet(fleet, target, anchors, 10.0, 0.0);
    std::vector<std::optional<AreaId>> after;
    for (const auto& u : fleet) after.push_back(u.area);
    for (const auto& f : plan) after[f.uav] = f.to_area;
    std::vector<int> have(n, 0);
    for (const auto& a : after)
      if (a) ++have[*a];
    // Every area reaches at least its target.
    for (int a = 0; a < n; ++a) CHECK(have[a] >= target[a]);
    // Minimum moves: the sum of shortfalls.
    std::vector<int> before(n, 0);
    for (const auto& u : fleet)
      if (u.area) ++before[*u.area];
    int shortfall = 0;
    for (int a = 0; a < n; ++a) shortfall += std::max(0, target[a] - before[a]);
    CHECK(static_cast<int>(plan.size()) == shortfall);
  }
}

// --- hook contract ----------------------------------------------------------

namespace {

Observation offload_obs() {
  Observation o;
  o.kind = DecisionKind::Offload;
  o.time = 12.5;
  o.area_loads = {60, 0, 120, 0};
  o.servers = {{"edge_1", Tier::Edge, true, true, 0.5, 0.1, 0}, {"cloud", Tier::Cloud, true, true, 0.0, 0.0, {}}};
  o.task = 42;
  o.app = "rendering";
  o.user = 3;
  o.candidates = {"edge_1"};
  o.candidate_delays = {0.1};
  o.default_target = "edge_1";
  return o;
}

Observation relocation_obs() {
  Observation o;
  o.kind = DecisionKind::Relocation;
  o.fleet_size = 3;
  o.area_has_edge = {true, true, false, true};
  o.default_counts = {2, 1, 0, 0};
  return o;
}

}  // namespace

TEST_CASE("observation JSON carries the default action") {
  const auto j = nlohmann::json::parse(observation_to_json(offload_obs()));
  CHECK(j["type"] == "observation");
  CHECK(j["decision"] == "offload");
  CHECK(j["default_action"]["offload_target"] == "edge_1");
  CHECK(j["servers"][1]["area"].is_null());
  const auto r = nlohmann::json::parse(observation_to_json(relocation_obs()));
  CHECK(r["default_action"]["uav_counts"] == nlohmann::json::array({2, 1, 0, 0}));
}

TEST_CASE("actions round-trip through JSON") {
  Action a;
  a.uav_counts = std::vector<int>{1, 2, 0, 0};
  const auto back = action_from_json(action_to_json(a));
  REQUIRE(back);
  CHECK(back->uav_counts == a.uav_counts);
  CHECK_FALSE(back->offload_target);
  CHECK_FALSE(action_from_json(""));
  CHECK_FALSE(action_from_json("null"));
  CHECK_FALSE(action_from_json("  \n"));
}

TEST_CASE("malformed actions are rejected") {
  for (const char* bad : {"{", "[1,2]", R"({"offload_target": 3})", R"({"uav_counts": [1.5]})", R"({"fly": true})"})
    CHECK(code_of([&] { action_from_json(bad); }) == ErrorCode::kInvalidAction);
}

TEST_CASE("actions are validated against the decision point") {
  Action to_cloud{"cloud", std::nullopt};
  CHECK_NOTHROW(validate_action(offload_obs(), to_cloud));
  Action unknown{"edge_9", std::nullopt};
  CHECK(code_of([&] { validate_action(offload_obs(), unknown); }) == ErrorCode::kInvalidAction);
  Action wrong_kind{std::nullopt, std::vector<int>{1, 0, 0, 0}};
  CHECK(code_of([&] { validate_action(offload_obs(), wrong_kind); }) == ErrorCode::kInvalidAction);

  CHECK_NOTHROW(validate_action(relocation_obs(), Action{std::nullopt, std::vector<int>{1, 1, 0, 1}}));
  CHECK(code_of([&] { validate_action(relocation_obs(), Action{std::nullopt, std::vector<int>{4, 0, 0, 0}}); }) ==
        ErrorCode::kInvalidAction);
  CHECK(code_of([&] { validate_action(relocation_obs(), Action{std::nullopt, std::vector<int>{0, 0, 1, 0}}); }) ==
        ErrorCode::kInvalidAction);
  CHECK(code_of([&] { validate_action(relocation_obs(), Action{std::nullopt, std::vector<int>{1, 1}}); }) ==
        ErrorCode::kInvalidAction);
  CHECK(code_of([&] { validate_action(relocation_obs(), Action{std::nullopt, std::vector<int>{-1, 0, 0, 0}}); }) ==
        ErrorCode::kInvalidAction);
}

TEST_CASE("line protocol writes one observation and reads one action") {
  std::istringstream in("{\"offload_target\":\"cloud\"}\nnull\n");
  std::ostringstream out;
  LineProtocolHook hook(in, out);
  const auto a = hook.act(offload_obs());
  REQUIRE(a);
  CHECK(a->offload_target == "cloud");
  CHECK_FALSE(hook.act(offload_obs()));
  CHECK_FALSE(hook.act(offload_obs()));  // end of input keeps defaults
  hook.reward({20.0, 42, 1.0, 1});
  std::istringstream lines(out.str());
  std::string line;
  int observations = 0, rewards = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    if (j["type"] == "observation") ++observations;
    if (j["type"] == "reward") {
      ++rewards;
      CHECK(j["task"] == 42);
    }
  }
  CHECK(observations == 3);
  CHECK(rewards == 1);
}
