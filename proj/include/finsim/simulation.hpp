// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "finsim/adversary.hpp"
#include "finsim/forensics.hpp"
#include "finsim/network.hpp"
#include "finsim/transcript.hpp"

namespace finsim {

/// Per-replica ground truth extracted at the end of a run.
struct ReplicaSummary {
  ReplicaIndex id = 0;
  bool corrupted = false;
  BlockHash confirmed_tip;                      // honest replicas only
  std::vector<BlockHash> confirmed_chain;       // hashes, genesis first
  std::map<std::uint64_t, BlockHash> signed_view;
};

struct TimelineEvent {
  Slot slot = 0;
  std::string event;
};

struct InvariantFindings {
  std::vector<std::string> problems;  // empty when every scanned invariant held
  bool ok() const { return problems.empty(); }
};

struct SimulationResult {
  ScenarioConfig config;
  std::vector<ClientView> clients;
  std::vector<ReplicaSummary> replicas;
  std::map<ReplicaIndex, std::vector<FinalitySignature>> honest_signatures;
  std::optional<SafetyViolation> violation;
  std::optional<Verdict> verdict;  // SyncFin runs with a violation
  std::vector<TimelineEvent> timeline;
  std::optional<Slot> resolved_gst;
  std::optional<Slot> attack_success_slot;
  std::uint64_t digest = 0;
  std::size_t undelivered = 0;  // pending messages at the end of the run
  InvariantFindings invariants;
  Transcript transcript;  // populated per capture level
};

/// Runs one scenario end to end. Deterministic: identical configs produce
/// identical digests. Throws ConfigError, AttackFailedError,
/// ScheduleBoundError, UnauthorizedSenderError.
SimulationResult run_simulation(const ScenarioConfig& cfg,
                                CaptureLevel capture = CaptureLevel::DigestOnly);

/// Authorization check behind the simulated signature scheme: honest senders
/// (and the environment) may only originate payload objects tagged with
/// their own identity; the adversary may originate objects tagged by
/// corrupted replicas; anything already seen on the wire may be relayed.
/// Throws UnauthorizedSenderError. The registry is the set of fingerprints
/// seen so far.
void authorize_submit(const Message& msg, const std::set<ReplicaIndex>& corrupted,
                      std::set<std::uint64_t>& minted);

}  // namespace finsim
