// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "finsim/underlay.hpp"

#include <algorithm>
#include <unordered_set>

#include "finsim/errors.hpp"

namespace finsim {

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::MajoritySync: return "majority_sync";
    case Protocol::PSyncQuorum: return "psync_quorum";
    case Protocol::SyncFin: return "syncfin";
  }
  return "?";
}

Protocol protocol_from_string(const std::string& s) {
  if (s == "majority_sync") return Protocol::MajoritySync;
  if (s == "psync_quorum") return Protocol::PSyncQuorum;
  if (s == "syncfin") return Protocol::SyncFin;
  throw ConfigError("unknown protocol '" + s + "'");
}

ProtocolParams ProtocolParams::make(Protocol p, std::uint32_t n, std::uint32_t f, Slot delta) {
  ProtocolParams out;
  out.n = n;
  out.f = f;
  out.epoch_len = std::max<Slot>(2 * delta, 1);
  out.notarize_threshold = (p == Protocol::PSyncQuorum) ? 2 * f + 1 : n / 2 + 1;
  return out;
}

Underlay::Underlay(ReplicaIndex self, ProtocolParams params)
    : self_(self),
      params_(params),
      assembly_(/*consecutive_confirm=*/true,
                [params](const Block& b) {
                  return b.epoch >= 1 && b.proposer == params.leader_of(b.epoch);
                }),
      confirmed_tip_(genesis_hash()) {}

void Underlay::add_transaction(TxId tx, Slot input_slot) {
  if (mempool_members_.insert(tx).second) mempool_.insert({input_slot, tx});
}

std::vector<Payload> Underlay::on_slot_begin(Slot slot) {
  if (!params_.epoch_start(slot)) return {};
  Epoch e = params_.epoch_of(slot);
  if (e == 0) return {};  // epoch 0 belongs to genesis
  if (params_.leader_of(e) != self_) return {};

  // Extend the tip of a longest notarized chain, smallest hash on ties.
  BlockHash parent = *assembly_.longest_tips().begin();
  const Block& parent_block = assembly_.store().at(parent);

  std::unordered_set<TxId> in_chain;
  for (const Block& b : chain_of(parent, assembly_.store())) {
    in_chain.insert(b.payload.begin(), b.payload.end());
  }
  Block block;
  block.parent = parent;
  block.height = parent_block.height + 1;
  block.epoch = e;
  block.proposer = self_;
  for (const auto& [in_slot, tx] : mempool_) {
    (void)in_slot;
    if (!in_chain.count(tx)) block.payload.push_back(tx);
  }
  return {Proposal{std::move(block)}};
}

std::vector<Payload> Underlay::on_message(const Message& msg) {
  if (const auto* p = std::get_if<Proposal>(msg.payload.get())) return on_proposal(*p);
  if (const auto* v = std::get_if<Vote>(msg.payload.get())) return on_vote(*v);
  if (const auto* s = std::get_if<SyncBlocks>(msg.payload.get())) return on_sync(*s);
  return {};
}

std::vector<Payload> Underlay::on_proposal(const Proposal& p) {
  Epoch e = p.block.epoch;
  BlockHash h = hash_block(p.block);
  if (e < 1 || p.block.proposer != params_.leader_of(e)) {
    ++dropped_;
    return {};
  }
  first_proposal_.emplace(e, h);  // an equivocating second proposal is ignored
  auto res = assembly_.add_block(p.block);
  std::vector<Payload> out = after_blocks_stored();
  if (res == ChainAssembly::AddResult::Duplicate && first_proposal_.at(e) == h) {
    // Block content preceded the proposal message (notarization echo).
    append(out, try_vote(e));
  }
  return out;
}

std::vector<Payload> Underlay::on_vote(const Vote& v) {
  if (v.voter < 1 || v.voter > params_.n) {
    ++dropped_;
    return {};
  }
  auto& by_block = votes_seen_[v.epoch][v.block];
  if (!by_block.emplace(v.voter, v).second) return {};  // duplicate voter
  if (by_block.size() >= params_.notarize_threshold) return maybe_notarize(v.block);
  return {};
}

std::vector<Payload> Underlay::on_sync(const SyncBlocks& s) {
  for (const Block& b : s.blocks) assembly_.add_block(b);
  return after_blocks_stored();
}

void Underlay::append(std::vector<Payload>& out, std::vector<Payload> more) {
  out.insert(out.end(), std::make_move_iterator(more.begin()),
             std::make_move_iterator(more.end()));
}

/// Work triggered by blocks entering the store: pending notarizations and
/// deferred first-proposal vote decisions.
std::vector<Payload> Underlay::after_blocks_stored() {
  std::vector<Payload> out;
  for (BlockHash h : assembly_.take_newly_stored()) {
    const Block& b = assembly_.store().at(h);
    auto ev = votes_seen_.find(b.epoch);
    if (ev != votes_seen_.end()) {
      auto eb = ev->second.find(h);
      if (eb != ev->second.end() && eb->second.size() >= params_.notarize_threshold) {
        append(out, maybe_notarize(h));
      }
    }
    auto fp = first_proposal_.find(b.epoch);
    if (fp != first_proposal_.end() && fp->second == h) {
      append(out, try_vote(b.epoch));
    }
  }
  settle();
  return out;
}

/// Votes for the epoch's first proposal iff it extends the tip of a longest
/// notarized chain in the current view. The decision is made once, when the
/// proposal first becomes resolvable.
std::vector<Payload> Underlay::try_vote(Epoch e) {
  if (vote_evaluated_.count(e)) return {};
  BlockHash h = first_proposal_.at(e);
  if (!assembly_.has_block(h)) return {};
  vote_evaluated_.insert(e);
  if (voted_epochs_.count(e)) return {};
  const Block& b = assembly_.store().at(h);
  if (!assembly_.complete(b.parent) ||
      assembly_.chain_len(b.parent) != assembly_.max_complete_len()) {
    return {};
  }
  voted_epochs_.insert(e);
  return {Vote{self_, e, h}};
}

/// Marks a block notarized once threshold votes and content are both present;
/// announces by re-broadcasting the vote set plus the block itself.
std::vector<Payload> Underlay::maybe_notarize(BlockHash h) {
  if (!assembly_.has_block(h) || notarized_.count(h)) return {};
  notarized_.insert(h);
  const Block& b = assembly_.store().at(h);
  assembly_.mark(h);
  std::vector<Payload> out;
  for (const auto& [voter, vote] : votes_seen_[b.epoch][h]) {
    (void)voter;
    out.push_back(vote);
  }
  out.push_back(SyncBlocks{{b}});
  settle();
  return out;
}

/// Applies freshly completed chains to the confirmed tip (highest
/// consecutive-epoch candidate, smallest hash on ties).
void Underlay::settle() {
  assembly_.take_newly_complete();  // lengths already updated; drain
  for (BlockHash h : assembly_.take_new_candidates()) {
    const Block& b = assembly_.store().at(h);
    const Block& cur = assembly_.store().at(confirmed_tip_);
    if (b.height > cur.height || (b.height == cur.height && h < confirmed_tip_)) {
      confirmed_tip_ = h;
    }
  }
}

std::vector<Block> Underlay::confirmed_chain() const {
  return chain_of(confirmed_tip_, assembly_.store());
}

}  // namespace finsim
