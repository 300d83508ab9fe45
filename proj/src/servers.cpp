#include "aircomp/servers.hpp"

#include <algorithm>
#include <cmath>

#include "aircomp/error.hpp"

namespace aircomp {

double processing_time(double load, double capacity) {
  if (!(load > 0.0) || !(capacity > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "load and capacity must be > 0");
  return load / capacity;
}

Server::Server(ServerId id, std::string name, Tier tier, std::optional<Position> position, double radius,
               double capacity, double altitude)
    : id_(id),
      name_(std::move(name)),
      tier_(tier),
      position_(position),
      radius_(radius),
      capacity_(capacity),
      altitude_(altitude) {
  if (!(capacity > 0.0)) throw Error(ErrorCode::kInvalidArgument, "server capacity must be > 0");
  if (tier != Tier::Cloud) {
    if (!(radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "server radius must be > 0");
    if (!position) throw Error(ErrorCode::kInvalidArgument, "edge and UAV servers need a position");
  }
}

double Server::queueing_delay_at(double now) const { return std::max(0.0, busy_until_ - now); }

Assignment Server::enqueue(TaskId task, double arrival, double processing_delay) {
  if (!alive_) throw Error(ErrorCode::kServerDown, "server " + name_ + " is down");
  Assignment a;
  a.queueing_delay = std::max(0.0, busy_until_ - arrival);
  a.processing_delay = processing_delay;
  a.completion = arrival + a.queueing_delay + processing_delay;
  busy_until_ = a.completion;
  busy_accum_ += processing_delay;
  queue_.push_back({task, a.completion});
  return a;
}

TaskId Server::complete_head() {
  if (queue_.empty()) throw Error(ErrorCode::kInternal, "completion on empty queue of " + name_);
  const TaskId t = queue_.front().task;
  queue_.pop_front();
  ++tasks_served_;
  return t;
}

std::vector<TaskId> Server::fail(double t) {
  if (!alive_) throw Error(ErrorCode::kInvalidTransition, "server " + name_ + " is already down");
  alive_ = false;
  down_since_ = t;
  // Unstarted and partially served work is refunded.
  if (busy_until_ > t) busy_accum_ -= busy_until_ - t;
  busy_accum_ = std::max(0.0, busy_accum_);
  busy_until_ = t;
  std::vector<TaskId> lost;
  lost.reserve(queue_.size());
  for (const auto& q : queue_) lost.push_back(q.task);
  queue_.clear();
  return lost;
}

void Server::restore(double t) {
  if (alive_) throw Error(ErrorCode::kInvalidTransition, "server " + name_ + " is already up");
  alive_ = true;
  dead_accum_ += t - down_since_;
  busy_until_ = t;
}

double Server::available_time(double horizon) const {
  double dead = dead_accum_;
  if (!alive_ && horizon > down_since_) dead += horizon - down_since_;
  return std::max(0.0, horizon - dead);
}

std::optional<double> Server::utilization(double horizon) const {
  if (!(horizon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "utilization horizon must be > 0");
  const double avail = available_time(horizon);
  if (avail <= 0.0) return std::nullopt;
  // Backlog that drains after the horizon was never processed inside it.
  const double beyond = alive_ ? std::max(0.0, busy_until_ - horizon) : 0.0;
  return std::clamp(busy_accum_ - beyond, 0.0, avail) / avail;
}

bool covered_by(Position user, const Server& server) {
  if (server.tier() == Tier::Cloud || !server.position()) return false;
  return covered_by(user, *server.position(), server.radius());
}

}  // namespace aircomp
