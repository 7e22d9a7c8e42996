// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>

#include "finsim/tracker.hpp"
#include "finsim/underlay.hpp"

namespace finsim {

struct ClientSnapshot {
  Slot slot = 0;
  Ledger ledger;
  BlockHash tip;
  bool operator==(const ClientSnapshot&) const = default;
};

/// Witness of a safety violation: two client snapshots whose ledgers are not
/// prefix-related, with the quorum-certified tips behind them.
struct SafetyViolation {
  std::uint32_t client_a = 0, client_b = 0;
  Slot slot_a = 0, slot_b = 0;
  Ledger ledger_a, ledger_b;
  BlockHash tip_a, tip_b;
};

/// A client's evolving view of one execution: blocks, finality signatures,
/// underlay votes, and the ledger derived from them. For SyncFin the ledger
/// follows the maximum-height block whose full prefix carries 2f+1 distinct
/// finality signatures; for the underlay protocols the client applies the
/// underlay confirmation rule to its own view of the votes. The ledger never
/// shrinks: a confirmable tip that does not extend the current ledger is
/// ignored and flags the view locally inconsistent.
class ClientView {
 public:
  ClientView(std::uint32_t id, Protocol protocol, ProtocolParams params, bool keep_log = true);

  void observe(const Message& msg, Slot slot);
  void end_slot(Slot slot);

  /// Applies the confirmation rule to the current view (also called by
  /// end_slot). Returns the resulting ledger.
  const Ledger& confirm();

  std::uint32_t id() const { return id_; }
  Protocol protocol() const { return protocol_; }
  const ProtocolParams& params() const { return params_; }
  const Ledger& ledger() const { return ledger_; }
  BlockHash tip() const { return tip_; }
  bool inconsistent() const { return inconsistent_; }
  const std::vector<ClientSnapshot>& snapshots() const { return snapshots_; }
  const std::vector<Message>& message_log() const { return message_log_; }
  const std::vector<Slot>& message_log_slots() const { return log_slots_; }
  const BlockStore& store() const { return assembly_.store(); }
  const std::map<BlockHash, std::set<ReplicaIndex>>& signatures() const { return sigs_; }
  std::uint64_t dropped_count() const { return dropped_ + assembly_.dropped(); }

 private:
  void count_signature(const FinalitySignature& sig);
  void count_vote(const Vote& v);
  void recheck_threshold(BlockHash h);
  void absorb_marks();

  std::uint32_t id_;
  Protocol protocol_;
  ProtocolParams params_;
  bool keep_log_;

  ChainAssembly assembly_;
  std::map<BlockHash, std::set<ReplicaIndex>> sigs_;  // union across heights, for inspection
  std::map<BlockHash, std::map<std::uint64_t, std::set<ReplicaIndex>>> sig_buckets_;
  std::map<Epoch, std::map<BlockHash, std::set<ReplicaIndex>>> votes_;
  std::set<BlockHash> threshold_reached_;

  // Best confirmable tip so far. SyncFin ties resolve to the block observed
  // first; underlay mode ties resolve to the smallest hash.
  BlockHash best_candidate_;
  Ledger ledger_;
  BlockHash tip_;
  bool inconsistent_ = false;
  Slot current_slot_ = 0;
  std::vector<ClientSnapshot> snapshots_;
  std::vector<Message> message_log_;
  std::vector<Slot> log_slots_;  // observation slot of each log entry
  std::uint64_t dropped_ = 0;
};

/// Pairwise prefix check over every snapshot of every view (Definition of
/// safety: all clients, all slots).
std::optional<SafetyViolation> safety_check(const std::vector<const ClientView*>& views);
std::optional<SafetyViolation> safety_check(const std::vector<ClientView>& views);

struct LivenessRow {
  TxId tx = 0;
  Slot input_slot = 0;
  ReplicaIndex target = 0;
  std::optional<Slot> included_slot;   // first slot every client's ledger has it
  std::optional<Slot> deadline;        // max(input, gst) + t_confirm, if gst known
  bool flagged = false;                // missed the deadline (or never included)
};

struct LivenessReport {
  std::vector<LivenessRow> rows;
  Slot t_confirm = 0;
  std::optional<Slot> max_latency;     // max over included txs of slot - max(input, gst)
  std::uint64_t flagged_count = 0;
};

LivenessReport liveness_report(const std::vector<ClientView>& views,
                               const std::vector<std::tuple<Slot, TxId, ReplicaIndex>>& schedule,
                               const std::set<ReplicaIndex>& corrupted,
                               std::optional<Slot> gst, Slot t_confirm);

}  // namespace finsim
