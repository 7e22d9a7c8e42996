// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "finsim/adversary.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

#include "finsim/errors.hpp"

namespace finsim {

Strategy::Strategy(const ScenarioConfig& cfg) : cfg_(cfg), params_(cfg.params()) {}

std::vector<PartyId> Strategy::broadcast_recipients(ReplicaIndex sender) const {
  std::vector<PartyId> out;
  for (ReplicaIndex r = 1; r <= cfg_.n; ++r) {
    if (r != sender) out.push_back(PartyId::replica(r));
  }
  for (std::uint32_t c = 1; c <= cfg_.clients; ++c) out.push_back(PartyId::client(c));
  return out;
}

std::vector<Message> Strategy::address(ReplicaIndex sender, std::vector<Payload> payloads,
                                       const std::vector<PartyId>& recipients) const {
  std::vector<Message> out;
  for (Payload& p : payloads) {
    PayloadPtr ptr = make_payload(std::move(p));
    for (PartyId rcpt : recipients) {
      out.push_back({PartyId::replica(sender), rcpt, ptr, slot_});
    }
  }
  return out;
}

namespace {

/// passive / crash_silent / random_delay: the corrupted replicas either
/// follow the protocol or stay silent; the scheduling knob is the whole
/// strategy.
class UniformStrategy : public Strategy {
 public:
  explicit UniformStrategy(const ScenarioConfig& cfg)
      : Strategy(cfg), rng_(mix_seed(cfg.seed, 0xad5e)) {
    if (cfg.strategy.kind != StrategyKind::CrashSilent) {
      for (ReplicaIndex r : cfg.strategy.corrupted) {
        cores_.emplace(r, HonestReplica(r, cfg.protocol, params_, mix_seed(cfg.seed, r)));
      }
    }
  }

  std::optional<Slot> choose_delivery(const Message& msg) override {
    if (cfg_.strategy.kind != StrategyKind::RandomDelay) {
      return msg.send_slot + cfg_.delta;
    }
    Slot lo = msg.send_slot;
    Slot hi = std::max(msg.send_slot, cfg_.gst.fixed) + cfg_.delta;
    return lo + rng_() % (hi - lo + 1);
  }

  std::vector<Message> on_deliver(const Message& msg) override {
    auto it = cores_.find(msg.recipient.index);
    if (it == cores_.end()) return {};  // crash-silent: inputs fall on the floor
    return address(it->first, it->second.on_message(msg), broadcast_recipients(it->first));
  }

  std::vector<Message> on_slot() override {
    std::vector<Message> out;
    for (auto& [r, core] : cores_) {
      auto msgs = address(r, core.on_slot_begin(slot_), broadcast_recipients(r));
      out.insert(out.end(), msgs.begin(), msgs.end());
    }
    return out;
  }

 private:
  std::map<ReplicaIndex, HonestReplica> cores_;
  std::mt19937_64 rng_;
};

enum class Side { A, B, Neutral };

/// split_brain / liveness_kill / forensic_trigger. Honest traffic crossing
/// the partition is held until gst + delta; replica-to-client deliveries are
/// instantaneous (delay zero is always within the bound, and it makes the
/// delay-free replay worlds land on identical client schedules). Each
/// actively deviating replica runs one protocol instance per partition side
/// and reveals each side's output only to that side; in split_brain and
/// liveness_kill those instances never touch the gadget. Corrupted instances
/// exchange state internally instead of over the network.
class PartitionStrategy : public Strategy {
 public:
  explicit PartitionStrategy(const ScenarioConfig& cfg) : Strategy(cfg) {
    for (ReplicaIndex r : cfg.strategy.partition_a) side_of_[r] = Side::A;
    for (ReplicaIndex r : cfg.strategy.partition_b) side_of_[r] = Side::B;
    forensic_ = cfg.strategy.kind == StrategyKind::ForensicTrigger;
    Protocol core_protocol =
        forensic_ ? cfg.protocol
        : cfg.protocol == Protocol::SyncFin ? Protocol::MajoritySync
                                            : cfg.protocol;
    for (ReplicaIndex r : cfg.strategy.corrupted) {
      if (forensic_ || r == cfg.strategy.active) {
        active_.insert(r);
        cores_[r].emplace(Side::A,
                          HonestReplica(r, core_protocol, params_, mix_seed(cfg.seed, r)));
        cores_[r].emplace(Side::B, HonestReplica(r, core_protocol, params_,
                                                 mix_seed(cfg.seed, r ^ 0x8000)));
      } else {
        side_of_[r] = Side::B;  // the idle replica follows the protocol inside B
        cores_[r].emplace(Side::B,
                          HonestReplica(r, core_protocol, params_, mix_seed(cfg.seed, r)));
      }
    }
  }

  std::optional<Slot> choose_delivery(const Message& msg) override {
    if (msg.recipient.is_client()) return msg.send_slot;  // instant
    if (!msg.sender.is_replica()) return msg.send_slot + cfg_.delta;  // environment
    Side s = side_of(msg.sender);
    Side r = side_of(msg.recipient);
    if (s != Side::Neutral && r != Side::Neutral && s != r) {
      return std::nullopt;  // crossing: held until gst + delta
    }
    return msg.send_slot + cfg_.delta;
  }

  void observe_submit(const Message& msg) override {
    const auto* sig = std::get_if<FinalitySignature>(msg.payload.get());
    if (!sig) return;
    if (!seen_sigs_.insert(payload_fingerprint(*msg.payload)).second) return;
    sig_blocks_[sig->height][sig->block].insert(sig->signer);
    if (!cfg_.strategy.corrupted.count(sig->signer)) {
      honest_sig_blocks_[sig->height].insert(sig->block);
    }
  }

  std::vector<Message> on_deliver(const Message& msg) override {
    auto it = cores_.find(msg.recipient.index);
    if (it == cores_.end()) return {};
    bool neutral_sender = !msg.sender.is_replica() || side_of(msg.sender) == Side::Neutral;
    for (auto& [side, core] : it->second) {
      if (neutral_sender || side_of(msg.sender) == side) {
        collect(it->first, side, core.on_message(msg));
      }
    }
    return settle();
  }

  std::vector<Message> on_slot() override {
    for (auto& [r, sides] : cores_) {
      for (auto& [side, core] : sides) collect(r, side, core.on_slot_begin(slot_));
    }
    return settle();
  }

  void post_slot() override {
    if (!success_slot_ && phase_end_reached()) success_slot_ = slot_;
    // After the stabilization time the deviation phase is over: actively
    // deviating replicas fall silent, the idle one keeps following the
    // protocol (it only ever withholds gadget signatures).
    std::optional<Slot> gst = resolved_gst();
    if (gst && slot_ >= *gst) {
      for (ReplicaIndex r : active_) muted_.insert(r);
    }
    if (cfg_.strategy.slot_budget > 0 && !success_slot_ && slot_ >= cfg_.strategy.slot_budget) {
      throw AttackFailedError(to_string(cfg_.strategy.kind) + " phase-end not reached by slot " +
                              std::to_string(slot_));
    }
  }

  std::optional<Slot> resolved_gst() const {
    if (cfg_.gst.kind == GstSpec::Kind::Fixed) return cfg_.gst.fixed;
    if (cfg_.gst.kind == GstSpec::Kind::OnAttackSuccess) return success_slot_;
    return std::nullopt;
  }

 private:
  Side side_of(PartyId p) const {
    if (p.is_client()) return p.index % 2 == 1 ? Side::A : Side::B;
    if (!p.is_replica()) return Side::Neutral;
    auto it = side_of_.find(p.index);
    return it == side_of_.end() ? Side::Neutral : it->second;
  }
  Side side_of(ReplicaIndex r) const { return side_of(PartyId::replica(r)); }

  bool is_idle(ReplicaIndex r) const {
    return cfg_.strategy.corrupted.count(r) && !active_.count(r);
  }

  /// Network recipients of one corrupted instance's output: its side's
  /// honest replicas and clients. The idle replica broadcasts like an honest
  /// one; corrupted peers are fed internally, never over the network.
  std::vector<PartyId> recipients_for(ReplicaIndex sender, Side side) const {
    std::vector<PartyId> out;
    bool everyone = is_idle(sender);
    for (ReplicaIndex r = 1; r <= cfg_.n; ++r) {
      if (r == sender || cfg_.strategy.corrupted.count(r)) continue;
      if (everyone || side_of(r) == side) out.push_back(PartyId::replica(r));
    }
    for (std::uint32_t c = 1; c <= cfg_.clients; ++c) {
      if (everyone || side_of(PartyId::client(c)) == side) out.push_back(PartyId::client(c));
    }
    return out;
  }

  void collect(ReplicaIndex sender, Side side, std::vector<Payload> payloads) {
    if (muted_.count(sender)) return;
    for (Payload& p : payloads) internal_feed_.push_back({sender, side, std::move(p)});
  }

  /// Drains buffered instance outputs to the network and to the other
  /// corrupted instances of the same side, until no instance reacts further.
  std::vector<Message> settle() {
    std::vector<Message> out;
    std::size_t guard = 0;
    while (!internal_feed_.empty()) {
      if (++guard > 100000) throw std::logic_error("adversary internal feed did not settle");
      auto [sender, side, payload] = std::move(internal_feed_.front());
      internal_feed_.pop_front();
      PayloadPtr ptr = make_payload(std::move(payload));
      for (PartyId rcpt : recipients_for(sender, side)) {
        out.push_back({PartyId::replica(sender), rcpt, ptr, slot_});
      }
      for (auto& [r, sides] : cores_) {
        if (r == sender) continue;
        auto core = sides.find(side);
        if (core == sides.end()) continue;
        Message internal{PartyId::replica(sender), PartyId::replica(r), ptr, slot_};
        collect(r, side, core->second.on_message(internal));
      }
    }
    return out;
  }

  bool phase_end_reached() const {
    switch (cfg_.strategy.kind) {
      case StrategyKind::SplitBrain: return underlay_conflict();
      case StrategyKind::LivenessKill: return underlay_conflict() && honest_double_height();
      case StrategyKind::ForensicTrigger: return quorum_conflict();
      default: return false;
    }
  }

  /// Both partition-side instances of the active replica confirmed chains
  /// that already diverge at height 1.
  bool underlay_conflict() const {
    const auto& sides = cores_.at(*active_.begin());
    auto first_block = [](const Underlay& u) -> std::optional<BlockHash> {
      std::vector<Block> chain = u.confirmed_chain();
      if (chain.size() < 2) return std::nullopt;
      return hash_block(chain[1]);
    };
    auto a = first_block(sides.at(Side::A).underlay());
    auto b = first_block(sides.at(Side::B).underlay());
    return a && b && *a != *b;
  }

  bool honest_double_height() const {
    for (const auto& [height, blocks] : honest_sig_blocks_) {
      (void)height;
      if (blocks.size() >= 2) return true;
    }
    return false;
  }

  bool quorum_conflict() const {
    for (const auto& [height, blocks] : sig_blocks_) {
      (void)height;
      std::uint32_t quorums = 0;
      for (const auto& [hash, signers] : blocks) {
        (void)hash;
        if (signers.size() >= params_.finality_quorum()) ++quorums;
      }
      if (quorums >= 2) return true;
    }
    return false;
  }

  std::map<ReplicaIndex, Side> side_of_;
  std::set<ReplicaIndex> active_;
  bool forensic_ = false;
  std::map<ReplicaIndex, std::map<Side, HonestReplica>> cores_;
  std::deque<std::tuple<ReplicaIndex, Side, Payload>> internal_feed_;
  std::set<ReplicaIndex> muted_;
  std::map<std::uint64_t, std::map<BlockHash, std::set<ReplicaIndex>>> sig_blocks_;
  std::map<std::uint64_t, std::set<BlockHash>> honest_sig_blocks_;
  std::set<std::uint64_t> seen_sigs_;
};

}  // namespace

std::unique_ptr<Strategy> make_strategy(const ScenarioConfig& cfg) {
  switch (cfg.strategy.kind) {
    case StrategyKind::Passive:
    case StrategyKind::CrashSilent:
    case StrategyKind::RandomDelay:
      return std::make_unique<UniformStrategy>(cfg);
    case StrategyKind::SplitBrain:
    case StrategyKind::LivenessKill:
    case StrategyKind::ForensicTrigger:
      return std::make_unique<PartitionStrategy>(cfg);
  }
  throw ConfigError("unhandled strategy kind");
}

}  // namespace finsim
