// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "finsim/gadget.hpp"
#include "finsim/underlay.hpp"

namespace finsim {

/// One protocol participant: the underlay state machine plus, for SyncFin,
/// the finality gadget. Handlers return the payloads the replica broadcasts;
/// its own copies are absorbed internally, so emitted payloads transitively
/// include everything triggered by self-delivery. Behavior is a pure function
/// of the delivered messages; the per-replica seed is carried so that a
/// replayed instance is constructed exactly as the original.
class HonestReplica {
 public:
  HonestReplica(ReplicaIndex self, Protocol protocol, ProtocolParams params, std::uint64_t seed);

  std::vector<Payload> on_slot_begin(Slot slot);
  std::vector<Payload> on_message(const Message& msg);

  ReplicaIndex self() const { return underlay_.self(); }
  Protocol protocol() const { return protocol_; }
  std::uint64_t seed() const { return seed_; }
  const Underlay& underlay() const { return underlay_; }
  const FinalityGadget& gadget() const { return gadget_; }

 private:
  std::vector<Payload> absorb(std::vector<Payload> initial);
  std::vector<Payload> poll_confirmed();

  Protocol protocol_;
  Underlay underlay_;
  FinalityGadget gadget_;
  std::uint64_t seed_;
  Slot current_slot_ = 0;
  std::set<TxId> gossiped_;
  BlockHash last_polled_tip_ = kNullHash;
};

}  // namespace finsim
