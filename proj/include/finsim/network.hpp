// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "finsim/message.hpp"

namespace finsim {

enum class NetworkMode { PartialSynchrony, Synchrony, DelayFree };

/// Network delay model. `gst` is the slot after which every message must be
/// delivered within `delta` slots; nullopt means the stabilization time is
/// unbounded or not yet declared (adaptive adversary).
struct NetworkConfig {
  NetworkMode mode = NetworkMode::Synchrony;
  Slot delta = 1;
  std::optional<Slot> gst = 0;

  void validate() const;

  /// max(send_slot, gst) + delta, or nullopt while gst is unknown.
  std::optional<Slot> delivery_bound(Slot send_slot) const;
};

/// Discrete-event delivery queue. Every pending entry satisfies
/// send_slot <= delivery_slot <= max(send_slot, gst) + delta; the bound is
/// re-checked on every insertion and release.
class EventQueue {
 public:
  explicit EventQueue(NetworkConfig cfg);

  Slot current_slot() const { return current_; }
  const NetworkConfig& config() const { return cfg_; }

  /// Schedules a delivery. Throws ScheduleBoundError when the slot violates
  /// the delay bound, std::logic_error when send_slot is not the current slot.
  void submit(Message msg, Slot delivery_slot);

  /// Schedules a delivery for gst + delta, resolving once gst is declared.
  void submit_after_gst(Message msg);

  /// Re-times an already pending delivery (adversary capability). Returns
  /// false (rejected) when the requested slot violates the bound; the entry
  /// is left unchanged in that case.
  bool adversary_delay(const Message& msg, Slot new_delivery_slot);

  /// Fixes the global stabilization time; held messages release at gst+delta.
  void declare_gst(Slot gst);

  /// Advances to the next slot and returns its deliveries in canonical order.
  std::vector<Message> advance();

  /// Drains deliveries that became due for the current slot (fixpoint phase).
  std::vector<Message> take_due();

  std::size_t pending_count() const { return pending_.size(); }

 private:
  struct Pending {
    Message msg;
    std::optional<Slot> delivery;  // nullopt = waiting for gst
  };

  std::vector<Message> drain_current();

  NetworkConfig cfg_;
  Slot current_ = 0;
  std::vector<Pending> pending_;
};

}  // namespace finsim
