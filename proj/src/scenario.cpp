// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "finsim/scenario.hpp"

#include <algorithm>

#include "finsim/errors.hpp"

namespace finsim {

std::string to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::Passive: return "passive";
    case StrategyKind::CrashSilent: return "crash_silent";
    case StrategyKind::RandomDelay: return "random_delay";
    case StrategyKind::SplitBrain: return "split_brain";
    case StrategyKind::LivenessKill: return "liveness_kill";
    case StrategyKind::ForensicTrigger: return "forensic_trigger";
  }
  return "?";
}

StrategyKind strategy_from_string(const std::string& s) {
  if (s == "passive") return StrategyKind::Passive;
  if (s == "crash_silent") return StrategyKind::CrashSilent;
  if (s == "random_delay") return StrategyKind::RandomDelay;
  if (s == "split_brain") return StrategyKind::SplitBrain;
  if (s == "liveness_kill") return StrategyKind::LivenessKill;
  if (s == "forensic_trigger") return StrategyKind::ForensicTrigger;
  throw ConfigError("unknown strategy '" + s + "'");
}

namespace {

bool is_partition_strategy(StrategyKind k) {
  return k == StrategyKind::SplitBrain || k == StrategyKind::LivenessKill ||
         k == StrategyKind::ForensicTrigger;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (n < 1) throw ConfigError("n must be positive");
  if (f >= n) throw ConfigError("f must be smaller than n");
  if (protocol == Protocol::SyncFin && n != 3 * f + 1) {
    throw ConfigError("n must equal 3f+1");
  }
  if (protocol == Protocol::PSyncQuorum && n < 2 * f + 1) {
    throw ConfigError("psync_quorum requires n >= 2f+1");
  }
  if (clients < 1) throw ConfigError("at least one client required");
  if (slots < 1) throw ConfigError("slots must be positive");
  if (gst.kind == GstSpec::Kind::Fixed && slots < gst.fixed) {
    throw ConfigError("slots must cover the fixed gst");
  }

  std::uint32_t expected_corrupted =
      strategy.kind == StrategyKind::ForensicTrigger ? f + 1 : f;
  if (strategy.kind != StrategyKind::Passive && strategy.kind != StrategyKind::RandomDelay &&
      strategy.corrupted.size() != expected_corrupted) {
    throw ConfigError("strategy " + to_string(strategy.kind) + " needs exactly " +
                      std::to_string(expected_corrupted) + " corrupted replicas");
  }
  if (strategy.corrupted.size() > static_cast<std::size_t>(n)) {
    throw ConfigError("more corrupted replicas than replicas");
  }
  for (ReplicaIndex r : strategy.corrupted) {
    if (r < 1 || r > n) throw ConfigError("corrupted replica out of range");
  }
  for (const TxScheduleEntry& e : tx_schedule) {
    if (e.target < 1 || e.target > n) throw ConfigError("tx target replica out of range");
    if (e.slot >= slots) throw ConfigError("tx scheduled past the end of the run");
  }

  if (is_partition_strategy(strategy.kind)) {
    if (gst.kind == GstSpec::Kind::Fixed && gst.fixed == 0) {
      throw ConfigError("partition strategies need gst > 0 (no pre-GST phase otherwise)");
    }
    if (clients < 2) throw ConfigError("partition strategies need at least two clients");
    std::set<ReplicaIndex> a(strategy.partition_a.begin(), strategy.partition_a.end());
    std::set<ReplicaIndex> b(strategy.partition_b.begin(), strategy.partition_b.end());
    if (a.empty() || b.empty()) throw ConfigError("both partition sides must be nonempty");
    std::set<ReplicaIndex> honest;
    for (ReplicaIndex r = 1; r <= n; ++r) {
      if (!strategy.corrupted.count(r)) honest.insert(r);
    }
    std::set<ReplicaIndex> both;
    both.insert(a.begin(), a.end());
    both.insert(b.begin(), b.end());
    if (both != honest || a.size() + b.size() != honest.size()) {
      throw ConfigError("partition sides must split the honest replicas exactly");
    }
    if (strategy.kind != StrategyKind::ForensicTrigger &&
        !strategy.corrupted.count(strategy.active)) {
      throw ConfigError("the active replica must be one of the corrupted replicas");
    }
  }
}

NetworkConfig ScenarioConfig::network() const {
  NetworkConfig net;
  net.delta = delta;
  if (gst.kind == GstSpec::Kind::Fixed) {
    net.gst = gst.fixed;
    if (gst.fixed == 0) {
      net.mode = delta == 0 ? NetworkMode::DelayFree : NetworkMode::Synchrony;
    } else {
      net.mode = NetworkMode::PartialSynchrony;
    }
  } else {
    net.gst = std::nullopt;
    net.mode = NetworkMode::PartialSynchrony;
  }
  return net;
}

ReplicaIndex wrap_replica(std::uint32_t base, std::uint32_t offset, std::uint32_t n) {
  return static_cast<ReplicaIndex>((base - 1 + offset) % n + 1);
}

ScenarioConfig make_scenario(Protocol protocol, StrategyKind strategy, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.protocol = protocol;
  cfg.seed = seed;
  cfg.strategy.kind = strategy;
  std::uint32_t rot = static_cast<std::uint32_t>(seed % cfg.n);

  switch (strategy) {
    case StrategyKind::Passive:
    case StrategyKind::RandomDelay:
      for (std::uint32_t k = 0; k < cfg.f; ++k) {
        cfg.strategy.corrupted.insert(wrap_replica(6, rot + k, cfg.n));
      }
      break;
    case StrategyKind::CrashSilent:
      // Adjacent crashed leaders keep the consecutive-epoch confirmation
      // cadence short enough for the pinned confirmation bound.
      for (std::uint32_t k = 0; k < cfg.f; ++k) {
        cfg.strategy.corrupted.insert(wrap_replica(6, rot + k, cfg.n));
      }
      break;
    case StrategyKind::SplitBrain:
    case StrategyKind::LivenessKill:
      // Voter sets {A, active} and {B, idle, active} each contain a cyclic
      // run of three consecutive leader ids, so both sides confirm on their
      // own. The idle corrupted replica follows the protocol inside B.
      cfg.strategy.corrupted = {wrap_replica(6, rot, cfg.n), wrap_replica(7, rot, cfg.n)};
      cfg.strategy.active = wrap_replica(6, rot, cfg.n);
      cfg.strategy.partition_a = {wrap_replica(1, rot, cfg.n), wrap_replica(2, rot, cfg.n),
                                  wrap_replica(3, rot, cfg.n)};
      cfg.strategy.partition_b = {wrap_replica(4, rot, cfg.n), wrap_replica(5, rot, cfg.n)};
      break;
    case StrategyKind::ForensicTrigger:
      cfg.strategy.corrupted = {wrap_replica(3, rot, cfg.n), wrap_replica(4, rot, cfg.n),
                                wrap_replica(5, rot, cfg.n)};
      cfg.strategy.partition_a = {wrap_replica(1, rot, cfg.n), wrap_replica(2, rot, cfg.n)};
      cfg.strategy.partition_b = {wrap_replica(6, rot, cfg.n), wrap_replica(7, rot, cfg.n)};
      break;
  }

  switch (strategy) {
    case StrategyKind::Passive:
    case StrategyKind::CrashSilent:
      cfg.gst = GstSpec::fixed_at(0);
      cfg.slots = 400;
      break;
    case StrategyKind::RandomDelay:
      cfg.gst = GstSpec::fixed_at(100);
      cfg.slots = 400;
      break;
    case StrategyKind::SplitBrain:
      cfg.gst = GstSpec::infinite();
      cfg.slots = 60;
      break;
    case StrategyKind::LivenessKill:
      cfg.gst = GstSpec::on_attack_success();
      cfg.slots = 520;
      cfg.strategy.slot_budget = 100;
      break;
    case StrategyKind::ForensicTrigger:
      cfg.gst = GstSpec::infinite();
      cfg.slots = 60;
      break;
  }

  // Transactions to every replica, ids salted by the seed so distinct runs
  // carry distinct ledger content. Early entries give both partition sides
  // side-local payloads before any attack completes.
  Slot horizon = cfg.slots > 80 ? cfg.slots - 80 : cfg.slots / 2;
  std::uint32_t k = 0;
  for (Slot s = 0; s < horizon; s += 4) {
    ReplicaIndex target = static_cast<ReplicaIndex>(k % cfg.n + 1);
    if (strategy == StrategyKind::CrashSilent && cfg.strategy.corrupted.count(target)) {
      target = wrap_replica(target, cfg.f, cfg.n);  // crashed replicas accept no input
    }
    cfg.tx_schedule.push_back({s, 1000 + (seed % 997) * 1000 + k, target});
    ++k;
  }
  return cfg;
}

}  // namespace finsim
