// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>

#include "finsim/message.hpp"
#include "finsim/tracker.hpp"

namespace finsim {

enum class Protocol { MajoritySync, PSyncQuorum, SyncFin };

std::string to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);

struct ProtocolParams {
  std::uint32_t n = 0;
  std::uint32_t f = 0;
  Slot epoch_len = 1;  // 2 * delta, minimum 1
  std::uint32_t notarize_threshold = 0;

  /// floor(n/2)+1 for MajoritySync (and the SyncFin underlay), 2f+1 for
  /// PSyncQuorum.
  static ProtocolParams make(Protocol p, std::uint32_t n, std::uint32_t f, Slot delta);

  ReplicaIndex leader_of(Epoch e) const { return static_cast<ReplicaIndex>(e % n) + 1; }
  Epoch epoch_of(Slot s) const { return s / epoch_len; }
  bool epoch_start(Slot s) const { return s % epoch_len == 0; }
  std::uint32_t finality_quorum() const { return 2 * f + 1; }
};

/// Per-replica underlay state machine. Epoch leaders propose a block
/// extending the tip of a longest notarized chain; replicas vote at most once
/// per epoch for the leader's first proposal when it extends such a tip; a
/// block reaching the notarization threshold is marked notarized and its vote
/// set re-broadcast. A notarized chain containing three blocks with
/// consecutive epoch numbers confirms everything up to the second of the
/// three.
class Underlay {
 public:
  Underlay(ReplicaIndex self, ProtocolParams params);

  std::vector<Payload> on_slot_begin(Slot slot);
  std::vector<Payload> on_message(const Message& msg);

  void add_transaction(TxId tx, Slot input_slot);

  BlockHash confirmed_tip() const { return confirmed_tip_; }
  std::vector<Block> confirmed_chain() const;

  const BlockStore& store() const { return assembly_.store(); }
  bool is_notarized(BlockHash h) const { return assembly_.marked(h) && assembly_.has_block(h); }
  const std::set<Epoch>& voted_epochs() const { return voted_epochs_; }
  std::uint64_t dropped_count() const { return dropped_ + assembly_.dropped(); }
  ReplicaIndex self() const { return self_; }
  const ProtocolParams& params() const { return params_; }
  std::size_t mempool_size() const { return mempool_.size(); }

 private:
  static void append(std::vector<Payload>& out, std::vector<Payload> more);
  std::vector<Payload> on_proposal(const Proposal& p);
  std::vector<Payload> on_vote(const Vote& v);
  std::vector<Payload> on_sync(const SyncBlocks& s);
  std::vector<Payload> after_blocks_stored();
  std::vector<Payload> maybe_notarize(BlockHash h);
  void settle();
  std::vector<Payload> try_vote(Epoch e);

  ReplicaIndex self_;
  ProtocolParams params_;
  ChainAssembly assembly_;

  // epoch -> block-hash -> votes by distinct voter
  std::map<Epoch, std::map<BlockHash, std::map<ReplicaIndex, Vote>>> votes_seen_;
  std::set<Epoch> voted_epochs_;
  std::map<Epoch, BlockHash> first_proposal_;  // leader's first proposal seen
  std::set<Epoch> vote_evaluated_;             // each first proposal judged once
  std::set<BlockHash> notarized_;              // notarization announced (echo sent)
  BlockHash confirmed_tip_;

  std::set<std::pair<Slot, TxId>> mempool_;  // ordered by (input slot, tx id)
  std::set<TxId> mempool_members_;
  std::uint64_t dropped_ = 0;
};

}  // namespace finsim
