#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

namespace testing {

inline std::filesystem::path source_dir() { return AIRCOMP_SOURCE_DIR; }

inline std::filesystem::path scenario_path(const std::string& name) {
  return source_dir() / "scenarios" / (name + ".json");
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("aircomp_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

/// Small scenario: one edge at the centre of a 200x200 world, no UAVs.
inline std::string small_scenario(int users = 5, double duration = 100.0, int uavs = 0) {
  return R"({
  "name": "small",
  "world": {"x_max": 200, "y_max": 200, "grid_rows": 1, "grid_cols": 1},
  "servers": {
    "edges": [{"id": "edge_1", "x": 100, "y": 100, "radius": 100, "capacity": 1000}],
    "uav": {"fleet_size": )" + std::to_string(uavs) + R"(, "instant_flight": true}
  },
  "users": {"count": )" + std::to_string(users) + R"(},
  "sim": {"duration_s": )" + std::to_string(duration) + R"(, "repeats": 2, "root_seed": 7}
})";
}

}  // namespace testing
