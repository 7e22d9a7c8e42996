// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "finsim/forensics.hpp"

#include <algorithm>

#include "finsim/errors.hpp"

namespace finsim {

Ledger rederive_ledger(const std::vector<Message>& log, const std::vector<Slot>& slots,
                       Protocol protocol, const ProtocolParams& params) {
  if (log.size() != slots.size()) {
    throw InsufficientEvidenceError("message log and slot annotations differ in length");
  }
  ClientView replay(0, protocol, params, /*keep_log=*/false);
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (i > 0 && slots[i] != slots[i - 1]) replay.end_slot(slots[i - 1]);
    replay.observe(log[i], slots[i]);
  }
  replay.end_slot(slots.empty() ? 0 : slots.back());
  return replay.ledger();
}

namespace {

void check_rederivable(const ClientView& view) {
  Ledger replayed = rederive_ledger(view.message_log(), view.message_log_slots(),
                                    view.protocol(), view.params());
  if (replayed != view.ledger()) {
    throw IrreproducibleViewError("client " + std::to_string(view.id()) +
                                  " ledger does not re-derive from its message log");
  }
}

}  // namespace

std::optional<Evidence> extract_evidence(const ClientView& a, const ClientView& b) {
  if (is_prefix(a.ledger(), b.ledger()) || is_prefix(b.ledger(), a.ledger())) {
    return std::nullopt;
  }
  check_rederivable(a);
  check_rederivable(b);
  Evidence ev;
  ev.params = a.params();
  ev.ledger_a = a.ledger();
  ev.ledger_b = b.ledger();
  ev.tip_a = a.tip();
  ev.tip_b = b.tip();
  ev.log_a = a.message_log();
  ev.log_b = b.message_log();
  ev.slots_a = a.message_log_slots();
  ev.slots_b = b.message_log_slots();
  return ev;
}

Verdict forensic(const Evidence& ev, const ProtocolParams& params) {
  Ledger da = rederive_ledger(ev.log_a, ev.slots_a, Protocol::SyncFin, params);
  Ledger db = rederive_ledger(ev.log_b, ev.slots_b, Protocol::SyncFin, params);
  if (da != ev.ledger_a || db != ev.ledger_b) {
    throw InsufficientEvidenceError("ledgers do not re-derive from the contained messages");
  }

  // Union of signatures from both logs; accuse every signer of two distinct
  // blocks at one height. Distinct same-height blocks always conflict.
  std::map<std::pair<ReplicaIndex, std::uint64_t>, std::set<BlockHash>> by_signer_height;
  std::map<std::pair<ReplicaIndex, std::uint64_t>,
           std::map<BlockHash, FinalitySignature>> sig_of;
  auto collect = [&](const std::vector<Message>& log) {
    for (const Message& m : log) {
      if (const auto* sig = std::get_if<FinalitySignature>(m.payload.get())) {
        auto key = std::make_pair(sig->signer, sig->height);
        by_signer_height[key].insert(sig->block);
        sig_of[key].emplace(sig->block, *sig);
      }
    }
  };
  collect(ev.log_a);
  collect(ev.log_b);

  Verdict verdict;
  for (const auto& [key, blocks] : by_signer_height) {
    if (blocks.size() < 2) continue;
    ReplicaIndex signer = key.first;
    if (verdict.proofs.count(signer)) continue;  // lowest height wins as the proof
    auto it = blocks.begin();
    BlockHash first = *it++;
    BlockHash second = *it;
    verdict.accused.insert(signer);
    verdict.proofs[signer] = {sig_of[key].at(first), sig_of[key].at(second)};
  }
  return verdict;
}

bool verify_verdict(const Verdict& v) {
  std::set<ReplicaIndex> proved;
  for (const auto& [replica, proof] : v.proofs) {
    if (proof.first.signer != replica || proof.second.signer != replica) return false;
    if (proof.first.height != proof.second.height) return false;
    if (proof.first.block == proof.second.block) return false;
    proved.insert(replica);
  }
  return proved == v.accused;
}

}  // namespace finsim
