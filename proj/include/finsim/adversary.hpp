// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <random>

#include "finsim/replica.hpp"
#include "finsim/scenario.hpp"

namespace finsim {

/// Adversary strategy: chooses delivery slots for every submitted message
/// (within the partial-synchrony bound) and drives the corrupted replicas.
/// Strategies see all traffic at submission time and emit their replicas'
/// sends as fully addressed messages.
class Strategy {
 public:
  explicit Strategy(const ScenarioConfig& cfg);
  virtual ~Strategy() = default;

  /// The driver announces each slot before any phase runs.
  void begin_slot(Slot slot) { slot_ = slot; }

  /// Delivery slot for a submitted message; nullopt holds it to gst + delta.
  virtual std::optional<Slot> choose_delivery(const Message& msg) = 0;

  /// Omniscience tap over all traffic, invoked once per submission.
  virtual void observe_submit(const Message& msg) { (void)msg; }

  /// A network delivery addressed to a corrupted replica.
  virtual std::vector<Message> on_deliver(const Message& msg) {
    (void)msg;
    return {};
  }

  /// Slot-begin actions of the corrupted replicas.
  virtual std::vector<Message> on_slot() { return {}; }

  /// End-of-slot bookkeeping: phase transitions and the success check.
  /// Throws AttackFailedError when a slot budget expires unmet.
  virtual void post_slot() {}

  bool attack_succeeded() const { return success_slot_.has_value(); }
  std::optional<Slot> success_slot() const { return success_slot_; }
  const std::set<ReplicaIndex>& corrupted() const { return cfg_.strategy.corrupted; }

 protected:
  std::vector<PartyId> broadcast_recipients(ReplicaIndex sender) const;
  std::vector<Message> address(ReplicaIndex sender, std::vector<Payload> payloads,
                               const std::vector<PartyId>& recipients) const;

  ScenarioConfig cfg_;
  ProtocolParams params_;
  Slot slot_ = 0;
  std::optional<Slot> success_slot_;
};

std::unique_ptr<Strategy> make_strategy(const ScenarioConfig& cfg);

}  // namespace finsim
