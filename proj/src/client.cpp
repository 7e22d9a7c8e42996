// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "finsim/client.hpp"

#include <algorithm>

namespace finsim {

ClientView::ClientView(std::uint32_t id, Protocol protocol, ProtocolParams params, bool keep_log)
    : id_(id),
      protocol_(protocol),
      params_(params),
      keep_log_(keep_log),
      assembly_(/*consecutive_confirm=*/protocol != Protocol::SyncFin,
                [params](const Block& b) {
                  return b.epoch >= 1 && b.proposer == params.leader_of(b.epoch);
                }),
      best_candidate_(genesis_hash()),
      tip_(genesis_hash()) {}

void ClientView::observe(const Message& msg, Slot slot) {
  current_slot_ = slot;
  if (keep_log_) {
    message_log_.push_back(msg);
    log_slots_.push_back(slot);
  }
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Proposal>) {
          assembly_.add_block(p.block);
        } else if constexpr (std::is_same_v<T, SyncBlocks>) {
          for (const Block& b : p.blocks) assembly_.add_block(b);
        } else if constexpr (std::is_same_v<T, Vote>) {
          count_vote(p);
        } else if constexpr (std::is_same_v<T, FinalitySignature>) {
          count_signature(p);
        }
        // TransactionInput is replica-facing; clients ignore it.
      },
      *msg.payload);
  for (BlockHash h : assembly_.take_newly_stored()) recheck_threshold(h);
  absorb_marks();
}

void ClientView::count_signature(const FinalitySignature& sig) {
  if (protocol_ != Protocol::SyncFin) return;  // no gadget in the underlay protocols
  if (sig.signer < 1 || sig.signer > params_.n) {
    ++dropped_;
    return;
  }
  sigs_[sig.block].insert(sig.signer);
  sig_buckets_[sig.block][sig.height].insert(sig.signer);
  recheck_threshold(sig.block);
}

void ClientView::count_vote(const Vote& v) {
  if (protocol_ == Protocol::SyncFin) return;  // SyncFin clients confirm via signatures
  if (v.voter < 1 || v.voter > params_.n) {
    ++dropped_;
    return;
  }
  votes_[v.epoch][v.block].insert(v.voter);
  recheck_threshold(v.block);
}

/// A signature (or vote) counts toward confirming a block only when it names
/// the block's real height (epoch); mismatches are adversarial noise. The
/// check re-runs once the block content arrives.
void ClientView::recheck_threshold(BlockHash h) {
  const Block* block = assembly_.store().find(h);
  if (!block || threshold_reached_.count(h)) return;
  std::size_t count = 0;
  if (protocol_ == Protocol::SyncFin) {
    auto by_block = sig_buckets_.find(h);
    if (by_block == sig_buckets_.end()) return;
    auto bucket = by_block->second.find(block->height);
    if (bucket == by_block->second.end()) return;
    count = bucket->second.size();
    if (count < params_.finality_quorum()) return;
  } else {
    auto by_epoch = votes_.find(block->epoch);
    if (by_epoch == votes_.end()) return;
    auto bucket = by_epoch->second.find(h);
    if (bucket == by_epoch->second.end()) return;
    count = bucket->second.size();
    if (count < params_.notarize_threshold) return;
  }
  threshold_reached_.insert(h);
  assembly_.mark(h);
}

/// A signature (or vote quorum) at a height counts toward confirmation only
/// if it names the block's real height; mismatches are adversarial noise.
void ClientView::absorb_marks() {
  if (protocol_ == Protocol::SyncFin) {
    for (BlockHash h : assembly_.take_newly_complete()) {
      const Block& b = assembly_.store().at(h);
      const Block& best = assembly_.store().at(best_candidate_);
      bool better = b.height > best.height ||
                    (b.height == best.height &&
                     assembly_.first_seen(h) < assembly_.first_seen(best_candidate_));
      if (better) best_candidate_ = h;
    }
    assembly_.take_new_candidates();
  } else {
    assembly_.take_newly_complete();
    for (BlockHash h : assembly_.take_new_candidates()) {
      const Block& b = assembly_.store().at(h);
      const Block& best = assembly_.store().at(best_candidate_);
      if (b.height > best.height || (b.height == best.height && h < best_candidate_)) {
        best_candidate_ = h;
      }
    }
  }
}

const Ledger& ClientView::confirm() {
  if (best_candidate_ == tip_) return ledger_;
  Ledger fresh = ledger_from_chain(chain_of(best_candidate_, assembly_.store()));
  if (is_prefix(ledger_, fresh)) {
    ledger_ = std::move(fresh);
    tip_ = best_candidate_;
  } else {
    inconsistent_ = true;  // keep the previous ledger
  }
  return ledger_;
}

void ClientView::end_slot(Slot slot) {
  current_slot_ = slot;
  confirm();
  if (snapshots_.empty() || snapshots_.back().ledger != ledger_) {
    snapshots_.push_back({slot, ledger_, tip_});
  }
}

namespace {

bool related(const Ledger& a, const Ledger& b) { return is_prefix(a, b) || is_prefix(b, a); }

/// Earliest conflicting snapshot pair between two views, if any.
std::optional<SafetyViolation> scan_pair(const ClientView& x, const ClientView& y) {
  for (const ClientSnapshot& a : x.snapshots()) {
    for (const ClientSnapshot& b : y.snapshots()) {
      if (!related(a.ledger, b.ledger)) {
        SafetyViolation v;
        v.client_a = x.id();
        v.client_b = y.id();
        v.slot_a = a.slot;
        v.slot_b = b.slot;
        v.ledger_a = a.ledger;
        v.ledger_b = b.ledger;
        v.tip_a = a.tip;
        v.tip_b = b.tip;
        return v;
      }
    }
  }
  return std::nullopt;
}

/// Snapshots form a monotone prefix chain per client by construction.
bool monotone(const ClientView& v) {
  const auto& snaps = v.snapshots();
  for (std::size_t k = 1; k < snaps.size(); ++k) {
    if (!is_prefix(snaps[k - 1].ledger, snaps[k].ledger)) return false;
  }
  return true;
}

}  // namespace

std::optional<SafetyViolation> safety_check(const std::vector<const ClientView*>& views) {
  // With per-client monotone snapshot chains, any cross-snapshot conflict
  // implies a conflict between final ledgers (two prefixes of one sequence
  // are always prefix-related), so comparing finals is exact. Fall back to
  // the full quadratic scan if monotonicity does not hold or to find the
  // earliest witness pair once a conflict is known.
  bool all_monotone = true;
  for (const ClientView* v : views) all_monotone = all_monotone && monotone(*v);
  for (std::size_t i = 0; i < views.size(); ++i) {
    for (std::size_t j = i; j < views.size(); ++j) {
      if (all_monotone && i != j && related(views[i]->ledger(), views[j]->ledger())) continue;
      if (all_monotone && i == j) continue;
      if (auto v = scan_pair(*views[i], *views[j])) return v;
    }
  }
  return std::nullopt;
}

std::optional<SafetyViolation> safety_check(const std::vector<ClientView>& views) {
  std::vector<const ClientView*> ptrs;
  ptrs.reserve(views.size());
  for (const ClientView& v : views) ptrs.push_back(&v);
  return safety_check(ptrs);
}

LivenessReport liveness_report(const std::vector<ClientView>& views,
                               const std::vector<std::tuple<Slot, TxId, ReplicaIndex>>& schedule,
                               const std::set<ReplicaIndex>& corrupted,
                               std::optional<Slot> gst, Slot t_confirm) {
  // First slot each tx appears in a client's ledger, per client.
  std::vector<std::map<TxId, Slot>> first_inclusion(views.size());
  for (std::size_t c = 0; c < views.size(); ++c) {
    std::size_t prev_len = 0;
    for (const ClientSnapshot& snap : views[c].snapshots()) {
      for (std::size_t k = prev_len; k < snap.ledger.size(); ++k) {
        first_inclusion[c].emplace(snap.ledger[k], snap.slot);
      }
      prev_len = std::max(prev_len, snap.ledger.size());
    }
  }

  LivenessReport report;
  report.t_confirm = t_confirm;
  for (const auto& [slot, tx, target] : schedule) {
    if (corrupted.count(target)) continue;  // liveness quantifies over honest inputs
    LivenessRow row;
    row.tx = tx;
    row.input_slot = slot;
    row.target = target;
    std::optional<Slot> everywhere;
    for (std::size_t c = 0; c < views.size(); ++c) {
      auto it = first_inclusion[c].find(tx);
      if (it == first_inclusion[c].end()) {
        everywhere = std::nullopt;
        break;
      }
      everywhere = std::max(everywhere.value_or(0), it->second);
    }
    row.included_slot = everywhere;
    if (gst.has_value()) {
      row.deadline = std::max(slot, *gst) + t_confirm;
      row.flagged = !everywhere.has_value() || *everywhere > *row.deadline;
    }
    if (row.flagged) ++report.flagged_count;
    if (everywhere.has_value() && gst.has_value()) {
      Slot latency = *everywhere - std::min(*everywhere, std::max(slot, *gst));
      report.max_latency = std::max(report.max_latency.value_or(0), latency);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace finsim
