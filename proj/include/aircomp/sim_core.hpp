#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace aircomp {

/// Simulation time in seconds. Always finite and non-negative.
class SimTime {
 public:
  constexpr SimTime() = default;
  explicit SimTime(double seconds);

  double seconds() const noexcept { return value_; }
  auto operator<=>(const SimTime&) const = default;

 private:
  double value_ = 0.0;
};

enum class EventKind : std::uint8_t {
  TaskArrival,
  TaskCompletion,
  UserWaypointReached,
  UavRelocationTick,
  UavArrived,
  ScenarioEvent,
  SimulationEnd,
};
inline constexpr std::size_t kEventKindCount = 7;

std::string_view to_string(EventKind kind);

struct EventRecord {
  SimTime time;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::SimulationEnd;
  std::uint32_t entity = 0;  // user, server or UAV index depending on kind
  std::uint64_t item = 0;    // task id, app index or scenario event index
};

struct RunSummary {
  std::uint64_t events_processed = 0;
  SimTime final_clock;
  bool queue_exhausted = false;
};

/// Single-threaded discrete-event engine. Events are ordered by (time, seq);
/// seq is assigned at scheduling so equal-time events dispatch FIFO.
/// Cancelled events stay in the heap and are skipped at dispatch.
class Engine {
 public:
  using Handler = std::function<void(const EventRecord&)>;

  void on(EventKind kind, Handler handler);

  /// Returns the sequence number of the new event. Throws
  /// Error(kSchedulingInPast) when `time` precedes the clock.
  std::uint64_t schedule(SimTime time, EventKind kind, std::uint32_t entity = 0,
                         std::uint64_t item = 0);
  std::uint64_t schedule(double time, EventKind kind, std::uint32_t entity = 0,
                         std::uint64_t item = 0) {
    return schedule(SimTime(time), kind, entity, item);
  }

  /// Tombstones a pending event. Returns false if it was already dispatched
  /// or cancelled.
  bool cancel(std::uint64_t seq);

  /// Dispatches every live event with time <= until, then sets the clock to
  /// `until`.
  RunSummary run(SimTime until);

  SimTime now() const noexcept { return clock_; }
  double now_s() const noexcept { return clock_.seconds(); }

  /// Event log sink; one `time,seq,kind,entity_id,detail` line per dispatch.
  void set_log(std::ostream* log) { log_ = log; }
  bool logging() const noexcept { return log_ != nullptr; }
  /// Appends detail text to the line logged for the event being dispatched.
  void annotate(std::string_view detail);

  std::uint64_t scheduled() const noexcept { return next_seq_; }
  std::uint64_t dispatched() const noexcept { return dispatched_; }
  std::uint64_t cancelled() const noexcept { return cancelled_; }
  std::uint64_t pending() const noexcept { return next_seq_ - dispatched_ - cancelled_; }

 private:
  struct Later {
    bool operator()(const EventRecord& a, const EventRecord& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };
  enum class SlotState : std::uint8_t { Pending, Done, Cancelled };

  std::priority_queue<EventRecord, std::vector<EventRecord>, Later> heap_;
  std::vector<SlotState> states_;
  std::array<Handler, kEventKindCount> handlers_{};
  SimTime clock_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
  std::uint64_t cancelled_ = 0;
  std::ostream* log_ = nullptr;
  std::string detail_;
};

struct StreamLabel {
  std::string_view purpose;
  std::uint64_t entity = 0;
  std::uint64_t repeat = 0;
};

/// Reproducible random stream keyed by (root seed, label). Built on
/// mt19937_64, whose output sequence is fixed by the standard; the
/// distributions are implemented here so draws match across platforms.
class RngStream {
 public:
  RngStream(std::uint64_t root_seed, const StreamLabel& label);

  std::uint64_t root_seed() const noexcept { return root_seed_; }
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Exponential with the given mean; strictly positive.
  double exponential(double mean);

 private:
  std::uint64_t root_seed_;
  std::mt19937_64 engine_;
};

RngStream derive_stream(std::uint64_t root_seed, const StreamLabel& label);

/// Per-run seed for a repeat index; independent of sweep axis values.
std::uint64_t derive_run_seed(std::uint64_t root_seed, std::uint64_t repeat);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace aircomp
