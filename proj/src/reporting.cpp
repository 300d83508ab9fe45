#include "aircomp/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "aircomp/error.hpp"

namespace aircomp {

// --- Per-run metrics --------------------------------------------------------

namespace {

std::optional<double> ratio(double num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return num / static_cast<double>(den);
}

}  // namespace

std::optional<double> RunMetrics::success_rate() const { return ratio(static_cast<double>(successes), tasks); }
std::optional<double> RunMetrics::service_time() const { return ratio(service_time_sum, completed); }
std::optional<double> RunMetrics::share(Tier tier) const {
  return ratio(static_cast<double>(tier_tasks[static_cast<std::size_t>(tier)]), tasks);
}
std::optional<double> RunMetrics::app_success(std::size_t app) const {
  if (app >= app_tasks.size()) return std::nullopt;
  return ratio(static_cast<double>(app_successes[app]), app_tasks[app]);
}

MetricsCollector::MetricsCollector(std::size_t app_count) {
  m_.app_tasks.assign(app_count, 0);
  m_.app_successes.assign(app_count, 0);
}

void MetricsCollector::record(const TaskRecord& t) {
  ++m_.tasks;
  ++m_.tier_tasks[static_cast<std::size_t>(t.tier)];
  if (t.app >= m_.app_tasks.size()) throw Error(ErrorCode::kInvalidArgument, "task app index out of range");
  ++m_.app_tasks[t.app];
  if (t.success) {
    ++m_.successes;
    ++m_.app_successes[t.app];
  }
  if (t.status == TaskStatus::Completed) {
    ++m_.completed;
    m_.service_time_sum += t.delays.total();
  }
}

void MetricsCollector::record_server(const ServerUsage& u) {
  const auto util = u.utilization();
  if (!util) return;
  if (u.tier == Tier::Edge) {
    edge_sum_ += *util;
    ++edge_n_;
  } else if (u.tier == Tier::Uav) {
    uav_sum_ += *util;
    ++uav_n_;
  }
}

RunMetrics MetricsCollector::finish() const {
  RunMetrics out = m_;
  if (edge_n_ > 0) out.edge_util = edge_sum_ / static_cast<double>(edge_n_);
  if (uav_n_ > 0) out.uav_util = uav_sum_ / static_cast<double>(uav_n_);
  return out;
}

RunMetrics summarize_run(const RunResult& run, std::size_t app_count) {
  MetricsCollector c(app_count);
  for (const auto& t : run.tasks) c.record(t);
  for (const auto& s : run.servers) c.record_server(s);
  return c.finish();
}

// --- Aggregation ------------------------------------------------------------

Estimate estimate(std::span<const double> samples) {
  Estimate e;
  e.n = samples.size();
  if (samples.empty()) return e;
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mean = sum / static_cast<double>(samples.size());
  e.mean = mean;
  if (samples.size() < 2) return e;
  if (std::all_of(samples.begin(), samples.end(), [&](double x) { return x == samples.front(); })) {
    e.half_width = 0.0;
    return e;
  }
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double n = static_cast<double>(samples.size());
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  e.half_width = boost::math::quantile(dist, 0.975) * sd / std::sqrt(n);
  return e;
}

namespace {

template <typename F>
Estimate estimate_over(std::span<const RunMetrics> repeats, F&& metric) {
  std::vector<double> xs;
  xs.reserve(repeats.size());
  for (const auto& r : repeats)
    if (const std::optional<double> v = metric(r)) xs.push_back(*v);
  return estimate(xs);
}

}  // namespace

MetricsRow aggregate(std::span<const RunMetrics> repeats, int users, int uavs,
                     std::vector<std::pair<std::string, double>> extra_axes) {
  if (repeats.empty()) throw Error(ErrorCode::kInvalidArgument, "aggregate needs at least one repeat");
  MetricsRow row;
  row.users = users;
  row.uavs = uavs;
  row.extra_axes = std::move(extra_axes);
  row.repeat_count = static_cast<int>(repeats.size());
  row.success = estimate_over(repeats, [](const RunMetrics& m) { return m.success_rate(); });
  row.svc_time = estimate_over(repeats, [](const RunMetrics& m) { return m.service_time(); });
  row.edge_util = estimate_over(repeats, [](const RunMetrics& m) { return m.edge_util; });
  row.uav_util = estimate_over(repeats, [](const RunMetrics& m) { return m.uav_util; });
  row.share_edge = estimate_over(repeats, [](const RunMetrics& m) { return m.share(Tier::Edge); });
  row.share_uav = estimate_over(repeats, [](const RunMetrics& m) { return m.share(Tier::Uav); });
  row.share_cloud = estimate_over(repeats, [](const RunMetrics& m) { return m.share(Tier::Cloud); });
  const std::size_t apps = repeats.front().app_tasks.size();
  for (std::size_t a = 0; a < apps; ++a)
    row.app_success.push_back(estimate_over(repeats, [a](const RunMetrics& m) { return m.app_success(a); }));
  return row;
}

// --- CSV --------------------------------------------------------------------

namespace {

std::string fixed6(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  // +0.0 folds a negative zero into "0.000000".
  std::snprintf(buf, sizeof buf, "%.6f", *v + 0.0);
  return buf;
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<std::string> csv_columns(std::span<const std::string> app_names, std::span<const std::string> extra_axes) {
  std::vector<std::string> cols = {"users",     "uavs",     "repeat_count", "success_rate", "success_ci",
                                   "svc_time_s", "svc_time_ci", "edge_util", "uav_util",    "share_edge",
                                   "share_uav", "share_cloud"};
  for (const auto& a : app_names) cols.push_back("succ_" + a);
  for (const auto& x : extra_axes) cols.push_back(x);
  return cols;
}

std::vector<std::string> format_row(const MetricsRow& r) {
  std::vector<std::string> cells = {std::to_string(r.users),
                                    std::to_string(r.uavs),
                                    std::to_string(r.repeat_count),
                                    fixed6(r.success.mean),
                                    fixed6(r.success.half_width),
                                    fixed6(r.svc_time.mean),
                                    fixed6(r.svc_time.half_width),
                                    fixed6(r.edge_util.mean),
                                    fixed6(r.uav_util.mean),
                                    fixed6(r.share_edge.mean),
                                    fixed6(r.share_uav.mean),
                                    fixed6(r.share_cloud.mean)};
  for (const auto& a : r.app_success) cells.push_back(fixed6(a.mean));
  for (const auto& [name, value] : r.extra_axes) cells.push_back(fixed6(value));
  return cells;
}

std::string format_csv(std::span<const MetricsRow> rows, const CsvMeta& meta) {
  std::ostringstream out;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(meta.scenario_hash));
  out << "# aircomp metrics\n";
  out << "# scenario_hash=" << hash << " root_seed=" << meta.root_seed << '\n';
  if (!meta.scenario_json.empty()) out << "# scenario=" << meta.scenario_json << '\n';
  out << join(csv_columns(meta.app_names, meta.extra_axes)) << '\n';
  for (const auto& r : rows) out << join(format_row(r)) << '\n';
  return out.str();
}

void write_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path, const CsvMeta& meta) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << format_csv(rows, meta);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

int CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

std::optional<double> CsvTable::number(std::size_t row, int col) const {
  if (col < 0 || row >= rows.size() || static_cast<std::size_t>(col) >= rows[row].size())
    throw Error(ErrorCode::kMissingColumn, "cell out of range");
  const auto& cell = rows[row][static_cast<std::size_t>(col)];
  if (cell.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParse, "non-numeric cell '" + cell + "'");
  }
}

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (t.header.empty() && line.front() == '#') {
      t.comments.emplace_back(line);
      continue;
    }
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
    } else {
      if (cells.size() != t.header.size())
        throw Error(ErrorCode::kParse, "row " + std::to_string(t.rows.size() + 1) + " has " +
                                           std::to_string(cells.size()) + " cells, header has " +
                                           std::to_string(t.header.size()));
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

// --- Raw records ------------------------------------------------------------

struct RecordWriter::Files {
  std::ofstream tasks;
  std::ofstream servers;
};

RecordWriter::RecordWriter(const std::filesystem::path& dir, std::span<const AppProfile> apps)
    : files_(std::make_unique<Files>()), apps_(apps.begin(), apps.end()) {
  files_->tasks.open(dir / kTaskRecordsFile, std::ios::binary | std::ios::trunc);
  files_->servers.open(dir / kServerRecordsFile, std::ios::binary | std::ios::trunc);
  if (!files_->tasks || !files_->servers) throw Error(ErrorCode::kIo, "cannot write records under " + dir.string());
  files_->tasks << "config,repeat,task,user,app,tier,server,created_at,network_s,queueing_s,processing_s,tolerance_s,"
                   "status,success\n";
  files_->servers << "config,repeat,server,tier,busy_s,available_s\n";
}

RecordWriter::~RecordWriter() = default;

void RecordWriter::write(const RunKey& key, const RunResult& run) {
  const std::string prefix = std::to_string(key.config) + "," + std::to_string(key.repeat) + ",";
  auto& t = files_->tasks;
  for (const auto& r : run.tasks) {
    t << prefix << r.id << ',' << r.user << ',' << apps_[r.app].name << ',' << to_string(r.tier) << ','
      << run.servers[r.server].id << ',' << g17(r.created_at) << ',' << g17(r.delays.network) << ','
      << g17(r.delays.queueing) << ',' << g17(r.delays.processing) << ',' << g17(r.tolerance) << ','
      << (r.status == TaskStatus::Completed ? "completed" : "server_failed") << ',' << (r.success ? 1 : 0) << '\n';
  }
  auto& s = files_->servers;
  for (const auto& u : run.servers)
    s << prefix << u.id << ',' << to_string(u.tier) << ',' << g17(u.busy_s) << ',' << g17(u.available_s) << '\n';
  if (!t || !s) throw Error(ErrorCode::kIo, "record write failed");
}

// --- Verification -----------------------------------------------------------

namespace {

int require_column(const CsvTable& t, std::string_view name, const std::string& file) {
  const int c = t.column(name);
  if (c < 0) throw Error(ErrorCode::kMissingColumn, file + ": missing column '" + std::string(name) + "'");
  return c;
}

}  // namespace

VerifyReport verify_csv(const std::filesystem::path& metrics_csv) {
  const CsvTable metrics = read_csv(metrics_csv);
  const auto dir = metrics_csv.parent_path();
  const auto tasks_path = dir / kTaskRecordsFile;
  const auto servers_path = dir / kServerRecordsFile;
  if (!std::filesystem::exists(tasks_path) || !std::filesystem::exists(servers_path))
    throw Error(ErrorCode::kIo, "raw records (" + std::string(kTaskRecordsFile) + ", " + kServerRecordsFile +
                                    ") not found next to " + metrics_csv.string() + "; rerun with --records");

  // App names and extra axes from the metrics header.
  std::vector<std::string> app_names;
  std::vector<std::string> extra_axes;
  const int first_app = require_column(metrics, "share_cloud", metrics_csv.string()) + 1;
  for (std::size_t c = static_cast<std::size_t>(first_app); c < metrics.header.size(); ++c) {
    const auto& h = metrics.header[c];
    if (h.rfind("succ_", 0) == 0 && extra_axes.empty()) {
      app_names.push_back(h.substr(5));
    } else {
      extra_axes.push_back(h);
    }
  }
  const auto expected_cols = csv_columns(app_names, extra_axes);
  if (expected_cols != metrics.header) throw Error(ErrorCode::kMissingColumn, "metrics header has unexpected layout");

  std::map<std::pair<std::size_t, int>, MetricsCollector> runs;
  auto collector = [&](std::size_t config, int repeat) -> MetricsCollector& {
    auto it = runs.find({config, repeat});
    if (it == runs.end()) it = runs.emplace(std::make_pair(config, repeat), MetricsCollector(app_names.size())).first;
    return it->second;
  };

  VerifyReport report;
  {
    const CsvTable servers = read_csv(servers_path);
    const std::string f = servers_path.string();
    const int c_cfg = require_column(servers, "config", f), c_rep = require_column(servers, "repeat", f);
    const int c_tier = require_column(servers, "tier", f), c_busy = require_column(servers, "busy_s", f);
    const int c_avail = require_column(servers, "available_s", f), c_id = require_column(servers, "server", f);
    for (std::size_t i = 0; i < servers.rows.size(); ++i) {
      ServerUsage u;
      u.id = servers.rows[i][static_cast<std::size_t>(c_id)];
      u.tier = tier_from_string(servers.rows[i][static_cast<std::size_t>(c_tier)]);
      u.busy_s = servers.number(i, c_busy).value_or(0.0);
      u.available_s = servers.number(i, c_avail).value_or(0.0);
      collector(static_cast<std::size_t>(*servers.number(i, c_cfg)), static_cast<int>(*servers.number(i, c_rep)))
          .record_server(u);
    }
  }
  {
    const CsvTable tasks = read_csv(tasks_path);
    const std::string f = tasks_path.string();
    const int c_cfg = require_column(tasks, "config", f), c_rep = require_column(tasks, "repeat", f);
    const int c_app = require_column(tasks, "app", f), c_tier = require_column(tasks, "tier", f);
    const int c_net = require_column(tasks, "network_s", f), c_q = require_column(tasks, "queueing_s", f);
    const int c_p = require_column(tasks, "processing_s", f), c_tol = require_column(tasks, "tolerance_s", f);
    const int c_status = require_column(tasks, "status", f), c_succ = require_column(tasks, "success", f);
    const int c_task = require_column(tasks, "task", f);
    for (std::size_t i = 0; i < tasks.rows.size(); ++i) {
      const auto& row = tasks.rows[i];
      TaskRecord r;
      const auto& app = row[static_cast<std::size_t>(c_app)];
      const auto it = std::find(app_names.begin(), app_names.end(), app);
      if (it == app_names.end()) throw Error(ErrorCode::kParse, f + ": unknown app '" + app + "'");
      r.app = static_cast<std::uint32_t>(it - app_names.begin());
      r.tier = tier_from_string(row[static_cast<std::size_t>(c_tier)]);
      r.delays = {*tasks.number(i, c_net), *tasks.number(i, c_q), *tasks.number(i, c_p)};
      r.tolerance = *tasks.number(i, c_tol);
      r.status = row[static_cast<std::size_t>(c_status)] == "completed" ? TaskStatus::Completed
                                                                         : TaskStatus::ServerFailed;
      r.success = r.status == TaskStatus::Completed && judge_task(r.delays, r.tolerance);
      const bool recorded = row[static_cast<std::size_t>(c_succ)] == "1";
      if (recorded != r.success && report.mismatches.size() < 50)
        report.mismatches.push_back("task " + row[static_cast<std::size_t>(c_task)] + " (config " +
                                    row[static_cast<std::size_t>(c_cfg)] + ", repeat " +
                                    row[static_cast<std::size_t>(c_rep)] + "): recorded success flag disagrees");
      collector(static_cast<std::size_t>(*tasks.number(i, c_cfg)), static_cast<int>(*tasks.number(i, c_rep)))
          .record(r);
      ++report.tasks_checked;
    }
  }

  const int c_users = require_column(metrics, "users", metrics_csv.string());
  const int c_uavs = require_column(metrics, "uavs", metrics_csv.string());
  for (std::size_t i = 0; i < metrics.rows.size(); ++i) {
    std::vector<RunMetrics> repeats;
    for (const auto& [key, col] : runs)
      if (key.first == i) repeats.push_back(col.finish());
    if (repeats.empty()) {
      report.mismatches.push_back("row " + std::to_string(i) + ": no raw records for config " + std::to_string(i));
      continue;
    }
    std::vector<std::pair<std::string, double>> extras;
    for (const auto& x : extra_axes) extras.emplace_back(x, metrics.number(i, metrics.column(x)).value_or(0.0));
    const MetricsRow recomputed =
        aggregate(repeats, static_cast<int>(*metrics.number(i, c_users)), static_cast<int>(*metrics.number(i, c_uavs)),
                  std::move(extras));
    const auto cells = format_row(recomputed);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c] != metrics.rows[i][c]) {
        report.mismatches.push_back("row " + std::to_string(i) + " column " + metrics.header[c] + ": csv '" +
                                    metrics.rows[i][c] + "' vs recomputed '" + cells[c] + "'");
      }
    }
    const auto se = metrics.number(i, metrics.column("share_edge"));
    const auto su = metrics.number(i, metrics.column("share_uav"));
    const auto sc = metrics.number(i, metrics.column("share_cloud"));
    if (se && su && sc && std::abs(*se + *su + *sc - 1.0) > 3e-6)
      report.mismatches.push_back("row " + std::to_string(i) + ": offload shares do not sum to 1");
    ++report.rows_checked;
  }
  return report;
}

}  // namespace aircomp
