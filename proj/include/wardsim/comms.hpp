// Copyright 2026 The wardsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <string_view>
#include <vector>

namespace wardsim {

enum class MessageKind { Proceed, Ack };

struct Message {
  MessageKind kind = MessageKind::Proceed;
  int sender = 0;
  std::int64_t seq = 0;
  friend bool operator==(const Message&, const Message&) = default;
};

std::string_view to_string(MessageKind k);

/// Lossy FIFO link between the two carts. Drops are decided by a seeded
/// stream; surviving messages arrive `latency_ticks` after sending but never
/// overtake an earlier message from the same sender.
class Link {
 public:
  Link(int latency_ticks, double drop_probability, std::uint64_t seed);

  /// Returns false when the message was dropped.
  bool send(const Message& msg, std::int64_t now_tick);
  /// Removes and returns every message due at or before `now_tick`, in send order.
  std::vector<Message> poll(std::int64_t now_tick);

  void set_latency(int ticks) { latency_ticks_ = ticks; }
  int latency_ticks() const { return latency_ticks_; }
  double drop_probability() const { return drop_probability_; }
  std::size_t in_flight() const { return queue_.size(); }

 private:
  struct InFlight {
    std::int64_t deliver_at;
    std::uint64_t order;
    Message msg;
  };

  int latency_ticks_;
  double drop_probability_;
  std::mt19937_64 rng_;
  std::uint64_t next_order_ = 0;
  std::deque<InFlight> queue_;
  std::map<int, std::int64_t> last_delivery_;  // per sender
};

}  // namespace wardsim
