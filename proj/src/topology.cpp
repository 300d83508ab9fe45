#include "aircomp/topology.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aircomp/error.hpp"

namespace aircomp {

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

AreaGrid::AreaGrid(int rows, int cols, WorldBounds bounds) : rows_(rows), cols_(cols), bounds_(bounds) {
  if (rows <= 0 || cols <= 0) throw Error(ErrorCode::kInvalidArgument, "grid dimensions must be positive");
  if (!(bounds.x_max > 0.0) || !(bounds.y_max > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "world bounds must be positive");
}

namespace {

// Index of the cell containing `v` along one axis; upper edges are closed so
// a shared boundary falls to the lower cell.
int cell_index(double v, double extent, int cells) {
  const double width = extent / cells;
  const int idx = static_cast<int>(std::ceil(v / width)) - 1;
  return std::clamp(idx, 0, cells - 1);
}

}  // namespace

AreaId AreaGrid::area_of(Position p) const {
  if (!bounds_.contains(p)) {
    throw Error(ErrorCode::kOutOfBounds, "position (" + std::to_string(p.x) + ", " +
                                             std::to_string(p.y) + ") outside world");
  }
  const int col = cell_index(p.x, bounds_.x_max, cols_);
  const int row = cell_index(p.y, bounds_.y_max, rows_);
  return row * cols_ + col;
}

Position AreaGrid::area_center(AreaId area) const {
  if (area < 0 || area >= area_count()) throw Error(ErrorCode::kInvalidArgument, "area index out of range");
  const double w = bounds_.x_max / cols_;
  const double h = bounds_.y_max / rows_;
  return {w * (area % cols_ + 0.5), h * (area / cols_ + 0.5)};
}

bool covered_by(Position user, Position server_ground, double radius) {
  const double dx = user.x - server_ground.x;
  const double dy = user.y - server_ground.y;
  return dx * dx + dy * dy <= radius * radius;
}

std::string_view to_string(Tier tier) {
  switch (tier) {
    case Tier::Edge: return "edge";
    case Tier::Uav: return "uav";
    case Tier::Cloud: return "cloud";
  }
  return "unknown";
}

Tier tier_from_string(std::string_view name) {
  if (name == "edge") return Tier::Edge;
  if (name == "uav") return Tier::Uav;
  if (name == "cloud") return Tier::Cloud;
  throw Error(ErrorCode::kParse, "unknown tier '" + std::string(name) + "'");
}

double DelayParams::access_latency(Tier tier) const {
  switch (tier) {
    case Tier::Edge: return edge_access_latency_s;
    case Tier::Uav: return uav_access_latency_s;
    case Tier::Cloud: return cloud_wan_latency_s;
  }
  return 0.0;
}

void DelayParams::validate() const {
  auto positive = [](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(field, "must be finite and > 0");
  };
  positive(data_rate_bps, "network.data_rate_bps");
  positive(edge_access_latency_s, "network.edge_latency_s");
  positive(uav_access_latency_s, "network.uav_latency_s");
  positive(cloud_wan_latency_s, "network.cloud_wan_latency_s");
}

LatencyBand platform_band(std::string_view preset) {
  if (preset == "lap") return kLapBand;
  if (preset == "hap") return kHapBand;
  if (preset == "leo") return kLeoBand;
  throw ValidationError("network.uav_preset", "must be one of lap, hap, leo");
}

double network_delay(double task_size_bits, Tier tier, const DelayParams& params) {
  return task_size_bits / params.data_rate_bps + params.access_latency(tier);
}

}  // namespace aircomp
