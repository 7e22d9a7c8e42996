// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>

#include "finsim/client.hpp"

namespace finsim {

/// Everything two disagreeing clients exchange: their ledgers, the
/// quorum-certified tips behind them, and the full ordered message logs that
/// produced the views. Self-contained: both confirmations re-derive from the
/// contained messages alone.
struct Evidence {
  ProtocolParams params;
  Ledger ledger_a, ledger_b;
  BlockHash tip_a, tip_b;
  std::vector<Message> log_a, log_b;
  // Observation slot of each log entry, for faithful replay.
  std::vector<Slot> slots_a, slots_b;
};

struct AccusationProof {
  FinalitySignature first, second;  // same signer, same height, conflicting blocks
  bool operator==(const AccusationProof&) const = default;
};

struct Verdict {
  std::set<ReplicaIndex> accused;
  std::map<ReplicaIndex, AccusationProof> proofs;
};

/// Builds Evidence when the two views' ledgers conflict; nullopt otherwise.
/// Throws IrreproducibleViewError if a view's ledger cannot be re-derived
/// from its own message log (a simulator bug, not an adversary capability).
std::optional<Evidence> extract_evidence(const ClientView& a, const ClientView& b);

/// Identifies double-signers: every replica with two finality signatures at
/// the same height on distinct blocks anywhere in the evidence. Each
/// accusation carries its proof pair. Throws InsufficientEvidenceError when
/// the evidence fails the self-containment re-derivation check.
Verdict forensic(const Evidence& ev, const ProtocolParams& params);

/// Checks every proof pair in isolation: consistent signer, equal heights,
/// distinct blocks. Depends only on the verdict contents.
bool verify_verdict(const Verdict& v);

/// Replays an ordered message log through a fresh client view and returns
/// the resulting ledger (the re-derivation primitive).
Ledger rederive_ledger(const std::vector<Message>& log, const std::vector<Slot>& slots,
                       Protocol protocol, const ProtocolParams& params);

}  // namespace finsim
