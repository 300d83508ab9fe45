#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "aircomp/topology.hpp"

namespace aircomp {

using ServerId = std::uint32_t;
using TaskId = std::uint64_t;

/// Processing delay of `load` computational units at `capacity` units/sec.
double processing_time(double load, double capacity);

struct Assignment {
  double queueing_delay = 0.0;
  double processing_delay = 0.0;
  double completion = 0.0;
};

/// Edge, UAV or cloud compute node with one non-preemptive FIFO server.
///
/// `busy_until` is the earliest idle time. Work is charged to `busy_accum`
/// when a task is enqueued; a failure refunds the work that had not run yet.
/// UAVs additionally carry an in-service flag that is false while flying.
class Server {
 public:
  Server(ServerId id, std::string name, Tier tier, std::optional<Position> position, double radius,
         double capacity, double altitude = 0.0);

  ServerId id() const noexcept { return id_; }
  const std::string& name() const noexcept { return name_; }
  Tier tier() const noexcept { return tier_; }
  const std::optional<Position>& position() const noexcept { return position_; }
  double radius() const noexcept { return radius_; }
  double altitude() const noexcept { return altitude_; }
  double capacity() const noexcept { return capacity_; }
  bool alive() const noexcept { return alive_; }
  bool in_service() const noexcept { return in_service_; }

  double busy_until() const noexcept { return busy_until_; }
  double busy_accum() const noexcept { return busy_accum_; }
  std::uint64_t tasks_served() const noexcept { return tasks_served_; }
  std::size_t queue_length() const noexcept { return queue_.size(); }

  /// max(0, busy_until - now): the wait a task arriving at `now` would see.
  double queueing_delay_at(double now) const;

  /// Appends a task. Throws Error(kServerDown) if the server is dead.
  Assignment enqueue(TaskId task, double arrival, double processing_delay);
  Assignment enqueue_load(TaskId task, double arrival, double load) {
    return enqueue(task, arrival, processing_time(load, capacity_));
  }
  /// Pops the head task when its completion event fires.
  TaskId complete_head();

  /// Marks the server dead at `t`. Returns the ids of every task queued or in
  /// service, which the caller records as failed. Throws kInvalidTransition
  /// if already dead.
  std::vector<TaskId> fail(double t);
  /// Brings a dead server back at `t`. Throws kInvalidTransition if alive.
  void restore(double t);

  void set_position(Position p) { position_ = p; }
  void set_in_service(bool v) { in_service_ = v; }

  /// Busy time clipped to the available (non-dead) part of [0, horizon],
  /// divided by that available time. Empty when the server was never up.
  std::optional<double> utilization(double horizon) const;
  /// Seconds of [0, horizon] the server was alive.
  double available_time(double horizon) const;

 private:
  struct Queued {
    TaskId task;
    double completion;
  };

  ServerId id_;
  std::string name_;
  Tier tier_;
  std::optional<Position> position_;
  double radius_;
  double capacity_;
  double altitude_;
  bool alive_ = true;
  bool in_service_ = true;

  double busy_until_ = 0.0;
  double busy_accum_ = 0.0;
  std::uint64_t tasks_served_ = 0;
  std::deque<Queued> queue_;

  double dead_accum_ = 0.0;
  double down_since_ = 0.0;
};

/// Coverage of an edge or in-service UAV. The cloud covers nobody; it is
/// reached as a fallback.
bool covered_by(Position user, const Server& server);

}  // namespace aircomp
