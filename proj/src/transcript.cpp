// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "finsim/transcript.hpp"

namespace finsim {

void TranscriptHasher::mix_message(const Message& msg, Slot slot, std::uint64_t tag) {
  fnv_.mix(tag);
  fnv_.mix(slot);
  fnv_.mix(static_cast<std::uint64_t>(msg.sender.kind) << 32 | msg.sender.index);
  fnv_.mix(static_cast<std::uint64_t>(msg.recipient.kind) << 32 | msg.recipient.index);
  fnv_.mix(msg.send_slot);
  fnv_.mix(payload_fingerprint(*msg.payload));
}

void TranscriptHasher::on_send(const Message& msg, Slot slot) { mix_message(msg, slot, 0x5e); }

void TranscriptHasher::on_delivery(const Message& msg, Slot slot) {
  mix_message(msg, slot, 0xde);
}

std::string scan_signature_invariants(ReplicaIndex replica,
                                      const std::vector<FinalitySignature>& sigs,
                                      const BlockStore& store) {
  std::map<std::uint64_t, BlockHash> by_height;
  for (const FinalitySignature& sig : sigs) {
    auto [it, fresh] = by_height.emplace(sig.height, sig.block);
    if (!fresh && it->second != sig.block) {
      return "replica " + std::to_string(replica) + " signed two blocks at height " +
             std::to_string(sig.height);
    }
  }
  // All signed blocks must lie on a single chain.
  for (auto a = by_height.begin(); a != by_height.end(); ++a) {
    auto b = std::next(a);
    if (b == by_height.end()) break;
    if (conflicting(a->second, b->second, store)) {
      return "replica " + std::to_string(replica) + " signed conflicting blocks at heights " +
             std::to_string(a->first) + " and " + std::to_string(b->first);
    }
  }
  return {};
}

std::string scan_vote_invariant(ReplicaIndex replica, const std::vector<Vote>& votes) {
  std::map<Epoch, BlockHash> by_epoch;
  for (const Vote& v : votes) {
    auto [it, fresh] = by_epoch.emplace(v.epoch, v.block);
    if (!fresh && it->second != v.block) {
      return "replica " + std::to_string(replica) + " voted twice in epoch " +
             std::to_string(v.epoch);
    }
  }
  return {};
}

}  // namespace finsim
