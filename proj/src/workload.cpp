#include "aircomp/workload.hpp"

#include <cmath>

#include "aircomp/error.hpp"

namespace aircomp {

void AppProfile::validate(const std::string& field) const {
  if (name.empty()) throw ValidationError(field + ".name", "must not be empty");
  auto positive = [&](double v, const char* sub) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(field + "." + sub, "must be finite and > 0");
  };
  positive(mean_interarrival_s, "mean_interarrival_s");
  positive(comp_load, "comp_load");
  positive(max_tolerable_delay_s, "max_tolerable_delay_s");
  positive(task_size_bits, "task_size_bits");
}

std::vector<AppProfile> paper_apps() {
  constexpr double kTaskBits = 500e3;
  return {
      {"entertainment", 10.0, 100.0, 0.3, kTaskBits},
      {"multimedia", 10.0, 100.0, 3.0, kTaskBits},
      {"rendering", 20.0, 200.0, 1.0, kTaskBits},
      {"imgclass", 20.0, 600.0, 1.0, kTaskBits},
  };
}

bool judge_task(const DelayTriple& delays, double max_tolerable_delay_s) {
  return delays.total() <= max_tolerable_delay_s;
}

double next_task_time(const AppProfile& app, RngStream& rng, double now, double rate_multiplier) {
  return now + rng.exponential(app.mean_interarrival_s / rate_multiplier);
}

double Waypoint::arrival_time() const {
  if (speed <= 0.0) return depart_time;
  return depart_time + distance(origin, destination) / speed;
}

Waypoint rwp_next_leg(const User& user, const WorldBounds& bounds, const MobilityParams& params,
                      RngStream& rng, double now) {
  if (user.kind != UserKind::Mobile)
    throw Error(ErrorCode::kInvalidArgument, "random waypoint applies to mobile users only");
  Waypoint leg;
  leg.origin = user.leg.destination;
  leg.destination = {rng.uniform(0.0, bounds.x_max), rng.uniform(0.0, bounds.y_max)};
  leg.speed = rng.uniform(params.speed_min_mps, params.speed_max_mps);
  const double pause = params.pause_max_s > 0.0 ? rng.uniform(0.0, params.pause_max_s) : 0.0;
  leg.depart_time = now + pause;
  return leg;
}

Position position_at(const User& user, double t) {
  const Waypoint& leg = user.leg;
  if (user.kind == UserKind::Nomadic || t <= leg.depart_time || leg.speed <= 0.0) return leg.origin;
  const double length = distance(leg.origin, leg.destination);
  if (length == 0.0) return leg.destination;
  const double frac = (t - leg.depart_time) * leg.speed / length;
  if (frac >= 1.0) return leg.destination;
  // std::lerp is monotone and exact at the endpoints, so the result stays
  // inside the bounding box of the leg.
  return {std::lerp(leg.origin.x, leg.destination.x, frac), std::lerp(leg.origin.y, leg.destination.y, frac)};
}

double user_offered_load(const User& user, std::span<const AppProfile> apps) {
  double load = 0.0;
  for (auto a : user.apps) load += apps[a].offered_load();
  return load;
}

}  // namespace aircomp
