// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace finsim {

using Slot = std::uint64_t;
using Epoch = std::uint64_t;
using TxId = std::uint64_t;
using ReplicaIndex = std::uint32_t;  // 1-based, in [1, n]

/// Content hash of a block. Hashing is simulated: a 64-bit digest with a
/// collision check at store-insert time stands in for a cryptographic hash.
struct BlockHash {
  std::uint64_t value = 0;
  auto operator<=>(const BlockHash&) const = default;
};

/// Parent sentinel of the genesis block.
inline constexpr BlockHash kNullHash{0};

std::string to_hex(BlockHash h);

struct Block {
  BlockHash parent;            // kNullHash for genesis
  std::uint64_t height = 0;    // genesis 0, parent height + 1 otherwise
  Epoch epoch = 0;             // strictly greater than the parent's epoch
  ReplicaIndex proposer = 0;   // 0 for genesis
  std::vector<TxId> payload;
  bool operator==(const Block&) const = default;
};

BlockHash hash_block(const Block& b);
const Block& genesis_block();
BlockHash genesis_hash();

/// True iff `child` is structurally valid relative to its stored parent.
bool well_formed_child(const Block& child, const Block& parent);

/// Block storage, closed under parents: a non-genesis block can only be
/// inserted once its parent is present. Insertion detects (simulated)
/// hash collisions and aborts the execution if one ever occurs.
class BlockStore {
 public:
  BlockStore();

  /// Inserts a block; returns its hash. Re-inserting the same content is a
  /// no-op. Throws MissingAncestorError if the parent is absent and
  /// std::logic_error on malformed blocks or hash collisions.
  BlockHash insert(const Block& b);

  bool contains(BlockHash h) const { return blocks_.count(h) != 0; }
  const Block* find(BlockHash h) const;
  const Block& at(BlockHash h) const;  // throws MissingAncestorError
  std::size_t size() const { return blocks_.size(); }

 private:
  struct HashHasher {
    std::size_t operator()(BlockHash h) const { return std::hash<std::uint64_t>{}(h.value); }
  };
  std::unordered_map<BlockHash, Block, HashHasher> blocks_;
};

/// Ordered transaction sequence output by a client.
using Ledger = std::vector<TxId>;

/// True iff `a` equals the first |a| elements of `b`.
bool is_prefix(const Ledger& a, const Ledger& b);

/// Concatenates block payloads in chain order, dropping duplicate ids.
Ledger ledger_from_chain(std::span<const Block> chain);

/// Returns genesis..block in ancestor order. Throws MissingAncestorError if
/// the store is not closed for this block.
std::vector<Block> chain_of(BlockHash tip, const BlockStore& store);

/// True iff a is an ancestor of b (or a == b).
bool is_ancestor(BlockHash a, BlockHash b, const BlockStore& store);

/// Two blocks conflict iff neither is an ancestor of the other.
bool conflicting(BlockHash a, BlockHash b, const BlockStore& store);

/// Incremental FNV-1a over 64-bit words; the execution-wide digest primitive.
struct Fnv64 {
  std::uint64_t state = 1469598103934665603ull;
  void mix(std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      state ^= (word >> (8 * i)) & 0xff;
      state *= 1099511628211ull;
    }
  }
  std::uint64_t digest() const { return state; }
};

/// Deterministic seed derivation for per-replica generators.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace finsim
