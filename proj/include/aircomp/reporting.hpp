#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aircomp/simulation.hpp"
#include "aircomp/topology.hpp"

namespace aircomp {

/// Per-repeat counters. Rates are empty when their denominator is zero.
struct RunMetrics {
  std::uint64_t tasks = 0;
  std::uint64_t successes = 0;
  std::vector<std::uint64_t> app_tasks;
  std::vector<std::uint64_t> app_successes;
  std::uint64_t completed = 0;
  double service_time_sum = 0.0;
  std::array<std::uint64_t, kTierCount> tier_tasks{};
  std::optional<double> edge_util;
  std::optional<double> uav_util;

  std::optional<double> success_rate() const;
  std::optional<double> service_time() const;
  std::optional<double> share(Tier tier) const;
  std::optional<double> app_success(std::size_t app) const;
};

class MetricsCollector {
 public:
  explicit MetricsCollector(std::size_t app_count);

  void record(const TaskRecord& task);
  void record_server(const ServerUsage& usage);
  RunMetrics finish() const;

 private:
  RunMetrics m_;
  double edge_sum_ = 0.0;
  double uav_sum_ = 0.0;
  std::size_t edge_n_ = 0;
  std::size_t uav_n_ = 0;
};

RunMetrics summarize_run(const RunResult& run, std::size_t app_count);

struct Estimate {
  std::optional<double> mean;
  std::optional<double> half_width;  // 95% Student-t; empty below 2 samples
  std::size_t n = 0;
};

Estimate estimate(std::span<const double> samples);

struct MetricsRow {
  int users = 0;
  int uavs = 0;
  std::vector<std::pair<std::string, double>> extra_axes;
  int repeat_count = 0;
  Estimate success;
  Estimate svc_time;
  Estimate edge_util;
  Estimate uav_util;
  Estimate share_edge;
  Estimate share_uav;
  Estimate share_cloud;
  std::vector<Estimate> app_success;
};

/// Mean over repeats of each per-repeat metric; repeats where a metric is
/// undefined are skipped for that metric.
MetricsRow aggregate(std::span<const RunMetrics> repeats, int users, int uavs,
                     std::vector<std::pair<std::string, double>> extra_axes = {});

struct CsvMeta {
  std::uint64_t scenario_hash = 0;
  std::uint64_t root_seed = 0;
  std::string scenario_json;  // echoed as a comment, single line
  std::vector<std::string> app_names;
  std::vector<std::string> extra_axes;
};

std::vector<std::string> csv_columns(std::span<const std::string> app_names, std::span<const std::string> extra_axes);
std::vector<std::string> format_row(const MetricsRow& row);
std::string format_csv(std::span<const MetricsRow> rows, const CsvMeta& meta);
/// Throws Error(kIo) naming the path on failure.
void write_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path, const CsvMeta& meta);

struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index or -1.
  int column(std::string_view name) const;
  /// Numeric cell, empty when the cell is blank.
  std::optional<double> number(std::size_t row, int col) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

// --- Raw per-task and per-server records ------------------------------------

inline constexpr const char* kTaskRecordsFile = "tasks.csv";
inline constexpr const char* kServerRecordsFile = "servers.csv";

struct RunKey {
  std::size_t config = 0;
  int repeat = 0;
};

/// Streams raw records. Doubles use 17 significant digits so the success
/// flag can be recomputed exactly.
class RecordWriter {
 public:
  explicit RecordWriter(const std::filesystem::path& dir, std::span<const AppProfile> apps);
  ~RecordWriter();
  RecordWriter(const RecordWriter&) = delete;
  RecordWriter& operator=(const RecordWriter&) = delete;

  void write(const RunKey& key, const RunResult& run);

 private:
  struct Files;
  std::unique_ptr<Files> files_;
  std::vector<AppProfile> apps_;
};

struct VerifyReport {
  std::size_t rows_checked = 0;
  std::size_t tasks_checked = 0;
  std::vector<std::string> mismatches;
  bool ok() const { return mismatches.empty(); }
};

/// Recomputes every aggregate in a metrics CSV from the raw records beside
/// it and compares the formatted cells. Throws Error(kIo) when records are
/// missing.
VerifyReport verify_csv(const std::filesystem::path& metrics_csv);

}  // namespace aircomp
