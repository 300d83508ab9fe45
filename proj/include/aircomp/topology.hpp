#pragma once

#include <cstddef>
#include <string_view>

namespace aircomp {

struct Position {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Position&) const = default;
};

double distance(Position a, Position b);

struct WorldBounds {
  double x_max = 400.0;
  double y_max = 400.0;

  bool contains(Position p) const { return p.x >= 0.0 && p.x <= x_max && p.y >= 0.0 && p.y <= y_max; }
};

using AreaId = int;

/// rows x cols equal rectangles tiling the world. A point on a shared
/// boundary belongs to the lower-index cell.
class AreaGrid {
 public:
  AreaGrid(int rows, int cols, WorldBounds bounds);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int area_count() const noexcept { return rows_ * cols_; }
  const WorldBounds& bounds() const noexcept { return bounds_; }

  /// Throws Error(kOutOfBounds) for positions outside the world.
  AreaId area_of(Position p) const;
  Position area_center(AreaId area) const;

 private:
  int rows_;
  int cols_;
  WorldBounds bounds_;
};

/// Horizontal coverage test; inclusive at the radius.
bool covered_by(Position user, Position server_ground, double radius);

enum class Tier { Edge, Uav, Cloud };
inline constexpr std::size_t kTierCount = 3;

std::string_view to_string(Tier tier);
/// Accepts "edge", "uav", "cloud".
Tier tier_from_string(std::string_view name);

struct DelayParams {
  double data_rate_bps = 100e6;
  double edge_access_latency_s = 0.002;
  double uav_access_latency_s = 20e-6;
  double cloud_wan_latency_s = 1.5;

  double access_latency(Tier tier) const;
  /// Throws ValidationError when any field is not strictly positive.
  void validate() const;
};

/// Propagation delay bands of the three air platforms.
struct LatencyBand {
  double min_s;
  double max_s;
  double midpoint() const { return 0.5 * (min_s + max_s); }
};

inline constexpr LatencyBand kLapBand{10e-6, 30e-6};
inline constexpr LatencyBand kHapBand{50e-6, 85e-6};
inline constexpr LatencyBand kLeoBand{1.5e-3, 3e-3};

/// Band by preset name: "lap", "hap" or "leo". Throws ValidationError otherwise.
LatencyBand platform_band(std::string_view preset);

/// Upload time plus tier access latency. Result download is not modelled.
double network_delay(double task_size_bits, Tier tier, const DelayParams& params);

}  // namespace aircomp
