// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "wardsim/comms.hpp"

#include <algorithm>
#include <stdexcept>

#include "wardsim/random.hpp"

namespace wardsim {

std::string_view to_string(MessageKind k) { return k == MessageKind::Proceed ? "Proceed" : "Ack"; }

Link::Link(int latency_ticks, double drop_probability, std::uint64_t seed)
    : latency_ticks_(latency_ticks), drop_probability_(drop_probability), rng_(seed) {
  if (latency_ticks < 0) throw std::invalid_argument("link latency must be non-negative");
  if (!(drop_probability >= 0.0 && drop_probability <= 1.0)) {
    throw std::invalid_argument("drop probability must lie in [0, 1]");
  }
}

bool Link::send(const Message& msg, std::int64_t now_tick) {
  // One draw per send regardless of outcome keeps the stream aligned with the schedule.
  if (uniform01(rng_) < drop_probability_) return false;
  std::int64_t due = now_tick + latency_ticks_;
  if (auto it = last_delivery_.find(msg.sender); it != last_delivery_.end()) due = std::max(due, it->second);
  last_delivery_[msg.sender] = due;
  queue_.push_back({due, next_order_++, msg});
  return true;
}

std::vector<Message> Link::poll(std::int64_t now_tick) {
  std::vector<InFlight> due;
  std::deque<InFlight> rest;
  for (InFlight& f : queue_) (f.deliver_at <= now_tick ? due.emplace_back(f) : rest.emplace_back(f));
  queue_ = std::move(rest);
  std::sort(due.begin(), due.end(), [](const InFlight& a, const InFlight& b) { return a.order < b.order; });
  std::vector<Message> out;
  out.reserve(due.size());
  for (const InFlight& f : due) out.push_back(f.msg);
  return out;
}

}  // namespace wardsim
