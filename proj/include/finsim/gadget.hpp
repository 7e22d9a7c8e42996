// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>

#include "finsim/message.hpp"

namespace finsim {

/// The finality-signature add-on. A replica signs the first block it observes
/// confirmed by the underlay at each height, at most once per height, and
/// never signs a block that conflicts with anything it has signed or that
/// descends from a block it refused.
class FinalityGadget {
 public:
  explicit FinalityGadget(ReplicaIndex self) : self_(self) {}

  /// Called once for each block newly appearing in this replica's underlay
  /// confirmed chain, ancestors before descendants. Returns the signature to
  /// broadcast, or nullopt when the block is (or becomes) refused.
  /// Out-of-order invocation is a driver bug and throws.
  std::optional<FinalitySignature> on_underlay_confirmed(const Block& block,
                                                         const BlockStore& store);

  /// Immutable snapshot of the signed heights.
  std::map<std::uint64_t, BlockHash> signed_view() const { return signed_; }

  bool has_invoked(BlockHash h) const { return invoked_.count(h) != 0; }
  const std::set<BlockHash>& refused() const { return refused_; }
  ReplicaIndex self() const { return self_; }

 private:
  ReplicaIndex self_;
  std::map<std::uint64_t, BlockHash> signed_;  // height -> block, never rewritten
  std::set<BlockHash> refused_;
  std::set<BlockHash> invoked_;
};

}  // namespace finsim
