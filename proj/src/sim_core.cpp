#include "aircomp/sim_core.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "aircomp/error.hpp"

namespace aircomp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "ok";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kValidation: return "validation error";
    case ErrorCode::kSchedulingInPast: return "scheduling in the past";
    case ErrorCode::kOutOfBounds: return "position out of bounds";
    case ErrorCode::kServerDown: return "server down";
    case ErrorCode::kInvalidTransition: return "invalid state transition";
    case ErrorCode::kInvalidAction: return "invalid policy action";
    case ErrorCode::kMissingColumn: return "missing column";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kVerifyMismatch: return "verification mismatch";
    case ErrorCode::kInternal: return "internal error";
  }
  return "unknown error";
}

SimTime::SimTime(double seconds) : value_(seconds) {
  if (!std::isfinite(seconds) || seconds < 0.0)
    throw Error(ErrorCode::kInvalidArgument, "SimTime must be finite and non-negative");
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::TaskArrival: return "TaskArrival";
    case EventKind::TaskCompletion: return "TaskCompletion";
    case EventKind::UserWaypointReached: return "UserWaypointReached";
    case EventKind::UavRelocationTick: return "UavRelocationTick";
    case EventKind::UavArrived: return "UavArrived";
    case EventKind::ScenarioEvent: return "ScenarioEvent";
    case EventKind::SimulationEnd: return "SimulationEnd";
  }
  return "Unknown";
}

void Engine::on(EventKind kind, Handler handler) {
  handlers_[static_cast<std::size_t>(kind)] = std::move(handler);
}

std::uint64_t Engine::schedule(SimTime time, EventKind kind, std::uint32_t entity,
                               std::uint64_t item) {
  if (time < clock_) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "event %s at t=%.9g precedes clock %.9g",
                  std::string(to_string(kind)).c_str(), time.seconds(), clock_.seconds());
    throw Error(ErrorCode::kSchedulingInPast, buf);
  }
  const std::uint64_t seq = next_seq_++;
  heap_.push(EventRecord{time, seq, kind, entity, item});
  states_.push_back(SlotState::Pending);
  return seq;
}

bool Engine::cancel(std::uint64_t seq) {
  if (seq >= states_.size() || states_[seq] != SlotState::Pending) return false;
  states_[seq] = SlotState::Cancelled;
  ++cancelled_;
  return true;
}

void Engine::annotate(std::string_view detail) {
  if (!log_) return;
  if (!detail_.empty()) detail_ += ';';
  detail_ += detail;
}

RunSummary Engine::run(SimTime until) {
  RunSummary summary;
  while (!heap_.empty() && heap_.top().time <= until) {
    const EventRecord ev = heap_.top();
    heap_.pop();
    if (states_[ev.seq] == SlotState::Cancelled) continue;
    states_[ev.seq] = SlotState::Done;
    clock_ = ev.time;
    ++dispatched_;
    ++summary.events_processed;
    detail_.clear();
    if (const auto& handler = handlers_[static_cast<std::size_t>(ev.kind)]) handler(ev);
    if (log_) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%.6f,%llu,", ev.time.seconds(),
                    static_cast<unsigned long long>(ev.seq));
      *log_ << buf << to_string(ev.kind) << ',' << ev.entity << ',' << detail_ << '\n';
    }
  }
  // Drop tombstones at the head so queue_exhausted reflects live events only.
  while (!heap_.empty() && states_[heap_.top().seq] == SlotState::Cancelled) heap_.pop();
  summary.queue_exhausted = heap_.empty();
  if (clock_ < until) clock_ = until;
  summary.final_clock = clock_;
  return summary;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::uint64_t stream_seed(std::uint64_t root_seed, const StreamLabel& label) {
  std::uint64_t h = splitmix64(root_seed);
  h = fnv1a64(label.purpose, h);
  h = splitmix64(h ^ label.entity);
  h = splitmix64(h ^ (label.repeat * 0xd1b54a32d192ed03ULL));
  return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t root_seed, const StreamLabel& label)
    : root_seed_(root_seed), engine_(stream_seed(root_seed, label)) {}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double RngStream::exponential(double mean) {
  // u in (0, 1) so the draw is finite and strictly positive.
  const double u = (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  return -mean * std::log(u);
}

RngStream derive_stream(std::uint64_t root_seed, const StreamLabel& label) {
  return RngStream(root_seed, label);
}

std::uint64_t derive_run_seed(std::uint64_t root_seed, std::uint64_t repeat) {
  return splitmix64(splitmix64(root_seed) + repeat);
}

}  // namespace aircomp
