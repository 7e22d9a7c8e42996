// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "finsim/network.hpp"
#include "finsim/underlay.hpp"

namespace finsim {

enum class StrategyKind {
  Passive,         // corrupted replicas behave honestly, all delays = delta
  CrashSilent,     // corrupted replicas send nothing at all
  RandomDelay,     // corrupted behave honestly; deliveries drawn uniformly in bound
  SplitBrain,      // one active corrupted replica runs the underlay per partition
  LivenessKill,    // split-brain, then all corrupted go gadget-silent forever
  ForensicTrigger  // f+1 corrupted double-sign both partitions' chains
};

std::string to_string(StrategyKind k);
StrategyKind strategy_from_string(const std::string& s);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::Passive;
  std::set<ReplicaIndex> corrupted;
  ReplicaIndex active = 0;  // the one deviating replica of split_brain/liveness_kill
  std::vector<ReplicaIndex> partition_a, partition_b;  // honest replicas only
  Slot slot_budget = 0;  // 0 = whole run; attack must succeed within this many slots
};

/// GST specification: a fixed slot, unbounded ("infinite"), or declared by
/// the strategy once its pre-GST objective is met ("on_attack_success").
struct GstSpec {
  enum class Kind { Fixed, Infinite, OnAttackSuccess } kind = Kind::Fixed;
  Slot fixed = 0;

  static GstSpec fixed_at(Slot s) { return {Kind::Fixed, s}; }
  static GstSpec infinite() { return {Kind::Infinite, 0}; }
  static GstSpec on_attack_success() { return {Kind::OnAttackSuccess, 0}; }
  bool operator==(const GstSpec&) const = default;
};

struct TxScheduleEntry {
  Slot slot = 0;
  TxId tx = 0;
  ReplicaIndex target = 0;
  bool operator==(const TxScheduleEntry&) const = default;
};

struct ScenarioConfig {
  std::uint32_t n = 7;
  std::uint32_t f = 2;
  Slot delta = 1;
  GstSpec gst = GstSpec::fixed_at(0);
  Slot slots = 400;
  Protocol protocol = Protocol::SyncFin;
  StrategyConfig strategy;
  std::vector<TxScheduleEntry> tx_schedule;
  std::uint32_t clients = 2;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError with field-level messages
  NetworkConfig network() const;
  ProtocolParams params() const { return ProtocolParams::make(protocol, n, f, delta); }
};

/// Cyclic 1-based replica id arithmetic for rotated scenario layouts.
ReplicaIndex wrap_replica(std::uint32_t base, std::uint32_t offset, std::uint32_t n);

/// Canned scenario layouts used across tests and the acceptance battery. The
/// rotation (derived from the seed) shifts every role, and the transaction
/// schedule feeds seed-dependent ids to both partition sides early.
ScenarioConfig make_scenario(Protocol protocol, StrategyKind strategy, std::uint64_t seed);

}  // namespace finsim
