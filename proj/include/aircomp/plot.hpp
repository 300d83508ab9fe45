#pragma once

#include <filesystem>
#include <vector>

namespace aircomp {

/// Renders the five result figures from a metrics CSV as SVG files:
///   success_rate.svg   success vs users, one line per UAV count
///   service_time.svg   mean service time vs users
///   utilization.svg    UAV and edge utilization panels
///   offload_shares.svg edge/UAV/cloud shares, one panel per UAV count
///   app_success.svg    per-application success, one panel per user count
/// Output is a pure function of the CSV contents. Throws
/// Error(kMissingColumn) when a required column is absent.
std::vector<std::filesystem::path> render_plots(const std::filesystem::path& csv,
                                                const std::filesystem::path& out_dir);

}  // namespace aircomp
