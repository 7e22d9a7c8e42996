// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "finsim/replica.hpp"

#include <deque>

namespace finsim {

HonestReplica::HonestReplica(ReplicaIndex self, Protocol protocol, ProtocolParams params,
                             std::uint64_t seed)
    : protocol_(protocol), underlay_(self, params), gadget_(self), seed_(seed) {}

std::vector<Payload> HonestReplica::on_slot_begin(Slot slot) {
  current_slot_ = slot;
  return absorb(underlay_.on_slot_begin(slot));
}

std::vector<Payload> HonestReplica::on_message(const Message& msg) {
  if (const auto* tx = std::get_if<TransactionInput>(msg.payload.get())) {
    underlay_.add_transaction(tx->tx, tx->input_slot);
    std::vector<Payload> out = poll_confirmed();
    // The input's target re-broadcasts it once so every leader can include it.
    if (msg.sender.kind == PartyKind::Environment && gossiped_.insert(tx->tx).second) {
      out.push_back(*tx);
    }
    return out;
  }
  if (std::holds_alternative<FinalitySignature>(*msg.payload)) {
    return {};  // replicas record but do not act on gadget signatures
  }
  return absorb(underlay_.on_message(msg));
}

/// Feeds the replica's own emissions back into the underlay (a broadcast
/// includes oneself) and collects everything transitively produced, including
/// gadget signatures for blocks that became confirmed along the way.
std::vector<Payload> HonestReplica::absorb(std::vector<Payload> initial) {
  std::vector<Payload> out;
  std::deque<Payload> work(std::make_move_iterator(initial.begin()),
                           std::make_move_iterator(initial.end()));
  auto push = [&work](std::vector<Payload> more) {
    for (Payload& p : more) work.push_back(std::move(p));
  };
  push(poll_confirmed());
  while (!work.empty()) {
    Payload p = std::move(work.front());
    work.pop_front();
    bool self_feed = !std::holds_alternative<FinalitySignature>(p) &&
                     !std::holds_alternative<TransactionInput>(p);
    out.push_back(p);
    if (self_feed) {
      Message self_copy{PartyId::replica(self()), PartyId::replica(self()),
                        make_payload(std::move(p)), current_slot_};
      push(underlay_.on_message(self_copy));
      push(poll_confirmed());
    }
  }
  return out;
}

/// Invokes the gadget for blocks newly appearing in the underlay confirmed
/// chain, in chain order.
std::vector<Payload> HonestReplica::poll_confirmed() {
  if (protocol_ != Protocol::SyncFin) return {};
  BlockHash tip = underlay_.confirmed_tip();
  if (tip == last_polled_tip_) return {};
  last_polled_tip_ = tip;
  const BlockStore& store = underlay_.store();
  std::vector<BlockHash> fresh;  // un-invoked suffix of the new chain
  for (BlockHash cur = tip; !gadget_.has_invoked(cur); cur = store.at(cur).parent) {
    fresh.push_back(cur);
    if (cur == genesis_hash()) break;
  }
  std::vector<Payload> out;
  for (auto it = fresh.rbegin(); it != fresh.rend(); ++it) {
    if (auto sig = gadget_.on_underlay_confirmed(store.at(*it), store)) {
      out.push_back(*sig);
    }
  }
  return out;
}

}  // namespace finsim
