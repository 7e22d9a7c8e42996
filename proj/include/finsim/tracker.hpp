// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <set>
#include <vector>

#include "finsim/types.hpp"

namespace finsim {

/// Block arrival, orphan buffering, and threshold-chain bookkeeping shared by
/// the underlay (vote notarization) and client views (vote or signature
/// quorums). Callers count votes/signatures themselves and `mark` a hash once
/// it crosses their threshold; marking before the block content arrives is
/// fine. A block is "complete" when it and its whole ancestry are marked;
/// complete blocks carry incremental chain lengths and, optionally,
/// consecutive-epoch confirmation candidates (three adjacent blocks with
/// consecutive epoch numbers confirm up to the middle one).
class ChainAssembly {
 public:
  using Validator = std::function<bool(const Block&)>;

  explicit ChainAssembly(bool consecutive_confirm, Validator validator = nullptr);

  enum class AddResult { Added, Buffered, Duplicate, Invalid };

  AddResult add_block(const Block& b);
  void mark(BlockHash h);

  /// Hashes inserted into the store since the last drain (orphan cascades
  /// included), in insertion order.
  std::vector<BlockHash> take_newly_stored();

  /// Complete blocks since the last drain, in completion order.
  std::vector<BlockHash> take_newly_complete();

  /// New consecutive-epoch confirmation candidates (the middle block of each
  /// fresh triple), if enabled.
  std::vector<BlockHash> take_new_candidates();

  const BlockStore& store() const { return store_; }
  bool has_block(BlockHash h) const { return store_.contains(h); }
  bool marked(BlockHash h) const { return marked_.count(h) != 0; }
  bool complete(BlockHash h) const { return chain_len_.count(h) != 0; }
  std::uint64_t chain_len(BlockHash h) const;
  std::uint64_t max_complete_len() const { return max_len_; }

  /// Complete blocks at the maximum chain length.
  const std::set<BlockHash>& longest_tips() const { return longest_tips_; }

  /// Arrival rank of the first message that carried this block.
  std::uint64_t first_seen(BlockHash h) const;

  std::uint64_t dropped() const { return dropped_; }

 private:
  void complete_block(BlockHash h, std::uint64_t len);
  void scan_triples(BlockHash h);

  BlockStore store_;
  Validator validator_;
  bool consecutive_confirm_;

  std::map<BlockHash, std::vector<Block>> orphans_;  // parent -> waiting blocks
  std::set<BlockHash> orphan_hashes_;
  std::map<BlockHash, std::set<BlockHash>> children_;  // stored parent -> children
  std::set<BlockHash> marked_;
  std::map<BlockHash, std::uint64_t> chain_len_;  // complete blocks only
  std::uint64_t max_len_ = 0;
  std::set<BlockHash> longest_tips_;
  std::map<BlockHash, std::uint64_t> first_seen_;
  std::uint64_t arrivals_ = 0;
  std::uint64_t dropped_ = 0;

  std::vector<BlockHash> newly_stored_;
  std::vector<BlockHash> newly_complete_;
  std::vector<BlockHash> new_candidates_;
};

}  // namespace finsim
