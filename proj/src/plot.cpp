#include "aircomp/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "aircomp/error.hpp"
#include "aircomp/reporting.hpp"

namespace aircomp {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v + 0.0);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

class Svg {
 public:
  Svg(double w, double h) : w_(w), h_(h) {}

  void line(double x1, double y1, double x2, double y2, const char* color, double width = 1.0) {
    body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
          << "\" stroke=\"" << color << "\" stroke-width=\"" << num(width) << "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const char* fill) {
    body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
          << "\" fill=\"" << fill << "\"/>\n";
  }
  void circle(double x, double y, double r, const char* fill) {
    body_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r) << "\" fill=\"" << fill
          << "\"/>\n";
  }
  void text(double x, double y, const std::string& s, const char* anchor = "middle", int size = 11) {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\"" << size
          << "\" text-anchor=\"" << anchor << "\">" << escape(s) << "</text>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const char* color) {
    body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) body_ << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
    body_ << "\"/>\n";
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w_) << "\" height=\"" << num(h_)
        << "\" viewBox=\"0 0 " << num(w_) << ' ' << num(h_) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body_.str() << "</svg>\n";
  }

 private:
  double w_, h_;
  std::ostringstream body_;
};

// Plot area inside a panel, with data-to-pixel mapping.
struct Frame {
  double left, top, width, height;
  double y_max;

  double py(double v) const { return top + height - (v / y_max) * height; }
};

double nice_ceiling(double v) {
  if (!(v > 0.0)) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * mag >= v) return m * mag;
  return 10.0 * mag;
}

void draw_frame(Svg& svg, const Frame& f, const std::string& title, const std::string& ylabel) {
  svg.line(f.left, f.top + f.height, f.left + f.width, f.top + f.height, "#000");
  svg.line(f.left, f.top, f.left, f.top + f.height, "#000");
  for (int i = 0; i <= 4; ++i) {
    const double v = f.y_max * i / 4.0;
    const double y = f.py(v);
    svg.line(f.left - 4, y, f.left, y, "#000");
    svg.line(f.left, y, f.left + f.width, y, "#ddd", 0.5);
    svg.text(f.left - 6, y + 4, label(std::round(v * 1000.0) / 1000.0), "end", 10);
  }
  svg.text(f.left + f.width / 2, f.top - 10, title, "middle", 13);
  svg.text(f.left - 40, f.top + f.height / 2, ylabel, "middle", 11);
}

struct Table {
  CsvTable csv;
  int col(const std::string& name, const std::string& figure) const {
    const int c = csv.column(name);
    if (c < 0) throw Error(ErrorCode::kMissingColumn, figure + " needs column '" + name + "'");
    return c;
  }
  std::vector<double> distinct(int c) const {
    std::vector<double> vs;
    for (std::size_t r = 0; r < csv.rows.size(); ++r)
      if (auto v = csv.number(r, c)) vs.push_back(*v);
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
  }
  std::optional<double> lookup(int users_col, double users, int uavs_col, double uavs, int value_col) const {
    for (std::size_t r = 0; r < csv.rows.size(); ++r)
      if (csv.number(r, users_col) == users && csv.number(r, uavs_col) == uavs) return csv.number(r, value_col);
    return std::nullopt;
  }
};

void line_panel(Svg& svg, const Table& t, const Frame& frame_in, const std::string& metric, const std::string& title,
                const std::string& ylabel, const std::string& figure, bool unit_range) {
  const int cu = t.col("users", figure), cv = t.col("uavs", figure), cm = t.col(metric, figure);
  const auto users = t.distinct(cu);
  const auto uavs = t.distinct(cv);
  double ymax = 0.0;
  for (std::size_t r = 0; r < t.csv.rows.size(); ++r)
    if (auto v = t.csv.number(r, cm)) ymax = std::max(ymax, *v);
  Frame f = frame_in;
  f.y_max = unit_range ? 1.0 : nice_ceiling(ymax * 1.05);
  draw_frame(svg, f, title, ylabel);

  auto px = [&](std::size_t i) {
    return users.size() <= 1 ? f.left + f.width / 2 : f.left + f.width * (0.05 + 0.9 * i / (users.size() - 1.0));
  };
  for (std::size_t i = 0; i < users.size(); ++i) svg.text(px(i), f.top + f.height + 16, label(users[i]));
  svg.text(f.left + f.width / 2, f.top + f.height + 32, "number of users");

  for (std::size_t s = 0; s < uavs.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < users.size(); ++i)
      if (auto v = t.lookup(cu, users[i], cv, uavs[s], cm)) pts.emplace_back(px(i), f.py(*v));
    if (pts.size() > 1) svg.polyline(pts, color);
    for (const auto& [x, y] : pts) svg.circle(x, y, 3, color);
    const double ly = f.top + 8 + 14 * s;
    svg.line(f.left + f.width + 10, ly, f.left + f.width + 26, ly, color, 2);
    svg.text(f.left + f.width + 30, ly + 4, label(uavs[s]) + " UAVs", "start", 10);
  }
}

void bar_group_panel(Svg& svg, const Frame& frame_in, const std::string& title, const std::string& ylabel,
                     const std::vector<std::string>& groups, const std::vector<std::string>& series,
                     const std::vector<std::vector<std::optional<double>>>& values /* [group][series] */) {
  Frame f = frame_in;
  f.y_max = 1.0;
  draw_frame(svg, f, title, ylabel);
  const double gw = f.width / std::max<std::size_t>(1, groups.size());
  const double bw = gw * 0.8 / std::max<std::size_t>(1, series.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = f.left + gw * g + gw * 0.1;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const auto& v = values[g][s];
      if (!v) continue;
      const double top = f.py(std::clamp(*v, 0.0, 1.0));
      svg.rect(gx + bw * s, top, bw * 0.95, f.top + f.height - top, kPalette[s % std::size(kPalette)]);
    }
    svg.text(f.left + gw * (g + 0.5), f.top + f.height + 16, groups[g], "middle", 10);
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double ly = f.top + 8 + 14 * s;
    svg.rect(f.left + f.width + 10, ly - 6, 12, 10, kPalette[s % std::size(kPalette)]);
    svg.text(f.left + f.width + 26, ly + 3, series[s], "start", 10);
  }
}

}  // namespace

std::vector<std::filesystem::path> render_plots(const std::filesystem::path& csv, const std::filesystem::path& out_dir) {
  Table t{read_csv(csv)};
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> out;

  // Validate every figure's columns before writing anything.
  for (const char* c : {"users", "uavs", "success_rate", "svc_time_s", "edge_util", "uav_util", "share_edge",
                        "share_uav", "share_cloud"})
    t.col(c, "plot");
  std::vector<std::pair<std::string, int>> app_cols;
  for (std::size_t c = 0; c < t.csv.header.size(); ++c)
    if (t.csv.header[c].rfind("succ_", 0) == 0) app_cols.emplace_back(t.csv.header[c].substr(5), static_cast<int>(c));
  if (app_cols.empty()) throw Error(ErrorCode::kMissingColumn, "app_success needs succ_<app> columns");

  const int cu = t.col("users", "plot"), cv = t.col("uavs", "plot");
  const auto users = t.distinct(cu);
  const auto uavs = t.distinct(cv);

  {
    Svg svg(640, 400);
    line_panel(svg, t, {70, 40, 440, 300, 1}, "success_rate", "Average task success rate", "success rate",
               "success_rate", true);
    out.push_back(out_dir / "success_rate.svg");
    svg.save(out.back());
  }
  {
    Svg svg(640, 400);
    line_panel(svg, t, {70, 40, 440, 300, 1}, "svc_time_s", "Average service time", "seconds", "service_time", false);
    out.push_back(out_dir / "service_time.svg");
    svg.save(out.back());
  }
  {
    Svg svg(1240, 400);
    line_panel(svg, t, {70, 40, 440, 300, 1}, "uav_util", "UAV utilization", "utilization", "utilization", true);
    line_panel(svg, t, {690, 40, 440, 300, 1}, "edge_util", "Edge utilization", "utilization", "utilization", true);
    out.push_back(out_dir / "utilization.svg");
    svg.save(out.back());
  }
  {
    std::vector<double> fleets;
    for (double u : uavs)
      if (u > 0) fleets.push_back(u);
    if (fleets.empty()) fleets = uavs;
    const double panel_w = 360;
    Svg svg(panel_w * fleets.size() + 40, 400);
    const int ce = t.col("share_edge", "offload_shares"), cuav = t.col("share_uav", "offload_shares"),
              cc = t.col("share_cloud", "offload_shares");
    for (std::size_t p = 0; p < fleets.size(); ++p) {
      std::vector<std::string> groups;
      std::vector<std::vector<std::optional<double>>> vals;
      for (double u : users) {
        groups.push_back(label(u));
        vals.push_back({t.lookup(cu, u, cv, fleets[p], ce), t.lookup(cu, u, cv, fleets[p], cc),
                        t.lookup(cu, u, cv, fleets[p], cuav)});
      }
      bar_group_panel(svg, {60 + panel_w * p, 40, panel_w - 130, 300, 1}, label(fleets[p]) + " UAVs", "share",
                      groups, {"edge", "cloud", "uav"}, vals);
    }
    out.push_back(out_dir / "offload_shares.svg");
    svg.save(out.back());
  }
  {
    const double panel_w = 480;
    Svg svg(panel_w * users.size() + 40, 400);
    for (std::size_t p = 0; p < users.size(); ++p) {
      std::vector<std::string> groups, series;
      for (const auto& [name, c] : app_cols) groups.push_back(name);
      for (double v : uavs) series.push_back(label(v) + " UAVs");
      std::vector<std::vector<std::optional<double>>> vals;
      for (const auto& [name, c] : app_cols) {
        std::vector<std::optional<double>> row;
        for (double v : uavs) row.push_back(t.lookup(cu, users[p], cv, v, c));
        vals.push_back(std::move(row));
      }
      bar_group_panel(svg, {60 + panel_w * p, 40, panel_w - 140, 300, 1}, label(users[p]) + " users",
                      "success rate", groups, series, vals);
    }
    out.push_back(out_dir / "app_success.svg");
    svg.save(out.back());
  }
  return out;
}

}  // namespace aircomp
