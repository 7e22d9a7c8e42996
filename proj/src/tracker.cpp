// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "finsim/tracker.hpp"

#include <deque>

namespace finsim {

ChainAssembly::ChainAssembly(bool consecutive_confirm, Validator validator)
    : validator_(std::move(validator)), consecutive_confirm_(consecutive_confirm) {
  // Genesis is marked and complete by definition.
  BlockHash g = genesis_hash();
  marked_.insert(g);
  chain_len_[g] = 1;
  max_len_ = 1;
  longest_tips_.insert(g);
  first_seen_[g] = 0;
}

ChainAssembly::AddResult ChainAssembly::add_block(const Block& b) {
  BlockHash h = hash_block(b);
  first_seen_.emplace(h, ++arrivals_);
  if (store_.contains(h)) return AddResult::Duplicate;
  if (orphan_hashes_.count(h)) return AddResult::Buffered;

  if (!store_.contains(b.parent)) {
    // Reject what is checkable without the parent.
    if (b.height == 0 || b.epoch == 0) {
      ++dropped_;
      return AddResult::Invalid;
    }
    orphans_[b.parent].push_back(b);
    orphan_hashes_.insert(h);
    return AddResult::Buffered;
  }

  std::deque<Block> queue{b};
  bool added_root = false;
  while (!queue.empty()) {
    Block cur = std::move(queue.front());
    queue.pop_front();
    BlockHash ch = hash_block(cur);
    const Block& parent = store_.at(cur.parent);
    bool valid = well_formed_child(cur, parent) && (!validator_ || validator_(cur));
    if (!valid) {
      ++dropped_;
      orphan_hashes_.erase(ch);
      continue;  // drop; any orphans waiting on it stay unresolvable
    }
    store_.insert(cur);
    if (ch == h) added_root = true;
    orphan_hashes_.erase(ch);
    children_[cur.parent].insert(ch);
    newly_stored_.push_back(ch);
    first_seen_.emplace(ch, ++arrivals_);
    // A mark may have arrived before the content.
    if (marked_.count(ch) && complete(cur.parent) && !complete(ch)) {
      complete_block(ch, chain_len_.at(cur.parent) + 1);
    }
    auto waiting = orphans_.find(ch);
    if (waiting != orphans_.end()) {
      for (Block& w : waiting->second) queue.push_back(std::move(w));
      orphans_.erase(waiting);
    }
  }
  return added_root ? AddResult::Added : AddResult::Invalid;
}

void ChainAssembly::mark(BlockHash h) {
  if (!marked_.insert(h).second) return;
  if (!store_.contains(h) || complete(h)) return;
  const Block& b = store_.at(h);
  if (complete(b.parent)) complete_block(h, chain_len_.at(b.parent) + 1);
}

void ChainAssembly::complete_block(BlockHash h, std::uint64_t len) {
  // Iterative cascade: completing a block may complete marked descendants.
  std::deque<std::pair<BlockHash, std::uint64_t>> queue{{h, len}};
  while (!queue.empty()) {
    auto [cur, cur_len] = queue.front();
    queue.pop_front();
    if (complete(cur)) continue;
    chain_len_[cur] = cur_len;
    newly_complete_.push_back(cur);
    if (cur_len > max_len_) {
      max_len_ = cur_len;
      longest_tips_.clear();
    }
    if (cur_len == max_len_) longest_tips_.insert(cur);
    if (consecutive_confirm_) scan_triples(cur);
    auto kids = children_.find(cur);
    if (kids != children_.end()) {
      for (BlockHash child : kids->second) {
        if (marked_.count(child) && !complete(child)) queue.push_back({child, cur_len + 1});
      }
    }
  }
}

void ChainAssembly::scan_triples(BlockHash h) {
  // Triples of chain-adjacent complete blocks with consecutive epochs,
  // with h in any of the three positions. The middle block is confirmed.
  const Block& b = store_.at(h);
  auto consecutive = [&](const Block& x, const Block& y, const Block& z) {
    return y.epoch == x.epoch + 1 && z.epoch == y.epoch + 1;
  };
  auto complete_children_of = [&](BlockHash p) {
    std::vector<BlockHash> out;
    auto it = children_.find(p);
    if (it != children_.end()) {
      for (BlockHash c : it->second) {
        if (complete(c)) out.push_back(c);
      }
    }
    return out;
  };

  if (b.height >= 2) {
    const Block& p = store_.at(b.parent);
    const Block& gp = store_.at(p.parent);
    if (complete(b.parent) && complete(p.parent) && consecutive(gp, p, b)) {
      new_candidates_.push_back(b.parent);
    }
  }
  if (b.height >= 1) {
    const Block& p = store_.at(b.parent);
    if (complete(b.parent)) {
      for (BlockHash c : complete_children_of(h)) {
        if (consecutive(p, b, store_.at(c))) new_candidates_.push_back(h);
      }
    }
  }
  for (BlockHash c : complete_children_of(h)) {
    const Block& cb = store_.at(c);
    for (BlockHash cc : complete_children_of(c)) {
      if (consecutive(b, cb, store_.at(cc))) new_candidates_.push_back(c);
    }
  }
}

std::vector<BlockHash> ChainAssembly::take_newly_stored() {
  return std::exchange(newly_stored_, {});
}

std::vector<BlockHash> ChainAssembly::take_newly_complete() {
  return std::exchange(newly_complete_, {});
}

std::vector<BlockHash> ChainAssembly::take_new_candidates() {
  return std::exchange(new_candidates_, {});
}

std::uint64_t ChainAssembly::chain_len(BlockHash h) const {
  auto it = chain_len_.find(h);
  return it == chain_len_.end() ? 0 : it->second;
}

std::uint64_t ChainAssembly::first_seen(BlockHash h) const {
  auto it = first_seen_.find(h);
  return it == first_seen_.end() ? ~0ull : it->second;
}

}  // namespace finsim
