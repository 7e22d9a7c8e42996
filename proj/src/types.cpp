// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "finsim/types.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <unordered_set>

#include "finsim/errors.hpp"

namespace finsim {

std::string to_hex(BlockHash h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h.value));
  return std::string(buf);
}

BlockHash hash_block(const Block& b) {
  Fnv64 fnv;
  fnv.mix(0x626c6f636bull);  // domain tag
  fnv.mix(b.parent.value);
  fnv.mix(b.height);
  fnv.mix(b.epoch);
  fnv.mix(b.proposer);
  fnv.mix(b.payload.size());
  for (TxId tx : b.payload) fnv.mix(tx);
  std::uint64_t v = fnv.digest();
  if (v == 0) v = 1;  // keep kNullHash reserved for the genesis parent
  return BlockHash{v};
}

const Block& genesis_block() {
  static const Block g{kNullHash, 0, 0, 0, {}};
  return g;
}

BlockHash genesis_hash() {
  static const BlockHash h = hash_block(genesis_block());
  return h;
}

bool well_formed_child(const Block& child, const Block& parent) {
  return child.height == parent.height + 1 && child.epoch > parent.epoch;
}

BlockStore::BlockStore() { blocks_.emplace(genesis_hash(), genesis_block()); }

BlockHash BlockStore::insert(const Block& b) {
  BlockHash h = hash_block(b);
  auto it = blocks_.find(h);
  if (it != blocks_.end()) {
    if (!(it->second == b)) {
      throw std::logic_error("block hash collision at " + to_hex(h));
    }
    return h;
  }
  if (!(b == genesis_block())) {
    auto parent = blocks_.find(b.parent);
    if (parent == blocks_.end()) {
      throw MissingAncestorError("parent " + to_hex(b.parent) + " of block " + to_hex(h));
    }
    if (!well_formed_child(b, parent->second)) {
      throw std::logic_error("malformed block " + to_hex(h));
    }
  }
  blocks_.emplace(h, b);
  return h;
}

const Block* BlockStore::find(BlockHash h) const {
  auto it = blocks_.find(h);
  return it == blocks_.end() ? nullptr : &it->second;
}

const Block& BlockStore::at(BlockHash h) const {
  const Block* b = find(h);
  if (!b) throw MissingAncestorError("block " + to_hex(h) + " not in store");
  return *b;
}

bool is_prefix(const Ledger& a, const Ledger& b) {
  if (a.size() > b.size()) return false;
  return std::equal(a.begin(), a.end(), b.begin());
}

Ledger ledger_from_chain(std::span<const Block> chain) {
  Ledger out;
  std::unordered_set<TxId> seen;
  for (const Block& b : chain) {
    for (TxId tx : b.payload) {
      if (seen.insert(tx).second) out.push_back(tx);
    }
  }
  return out;
}

std::vector<Block> chain_of(BlockHash tip, const BlockStore& store) {
  std::vector<Block> out;
  BlockHash cur = tip;
  while (true) {
    const Block& b = store.at(cur);  // throws on missing ancestor
    out.push_back(b);
    if (cur == genesis_hash()) break;
    cur = b.parent;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

bool is_ancestor(BlockHash a, BlockHash b, const BlockStore& store) {
  const Block& ba = store.at(a);
  BlockHash cur = b;
  while (true) {
    if (cur == a) return true;
    const Block& bc = store.at(cur);
    if (bc.height <= ba.height) return false;
    cur = bc.parent;
  }
}

bool conflicting(BlockHash a, BlockHash b, const BlockStore& store) {
  if (a == b) return false;
  return !is_ancestor(a, b, store) && !is_ancestor(b, a, store);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace finsim
