// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "finsim/simulation.hpp"

namespace finsim {

/// One delay-free counterfactual world: all replicas except `honest_index`
/// are corrupted and emulate the base execution's delivery schedule.
struct WorldSpec {
  const Transcript* base = nullptr;
  ReplicaIndex honest_index = 0;
};

/// Records the base (world-0) execution: a partially synchronous run of a
/// non-final protocol whose clients end up with conflicting ledgers.
/// Rejects configurations that cannot produce one (SyncFin, passive, f = 0)
/// and throws AttackFailedError when the run yields no violation.
Transcript record_world0(const ScenarioConfig& cfg);

/// Replays the base execution in a delay-free network where only
/// `honest_index` runs real protocol code. Every other replica releases its
/// recorded sends so that messages destined to the honest replica and to the
/// clients arrive exactly at their recorded slots. Throws DivergenceError if
/// the honest replica's emissions ever differ from the recorded sent log.
Transcript replay_world(const WorldSpec& spec, const ScenarioConfig& cfg);

/// Element-wise equality of replica i's received/sent logs and of all client
/// observation logs between the two transcripts.
bool check_indistinguishable(const Transcript& t0, const Transcript& ti, ReplicaIndex i);

struct WorldRow {
  ReplicaIndex honest = 0;
  std::set<ReplicaIndex> corrupted;
  bool indistinguishable = false;
  bool violation = false;
  std::set<ReplicaIndex> exemplar_overlap;  // exemplar verdict ∩ {honest}
};

struct WorldsReport {
  std::uint64_t base_digest = 0;
  std::optional<SafetyViolation> base_violation;
  std::vector<WorldRow> rows;
  /// A verdict computable from the (identical) client observations alone:
  /// the vote-equivocators. Constant across worlds by construction.
  std::set<ReplicaIndex> exemplar_verdict;
  /// Exhaustively checked: every (f+1)-subset of [n] intersects [n-f], so a
  /// verdict large enough for accountable safety must accuse the honest
  /// replica of some world.
  bool any_large_verdict_hits_honest = false;
};

/// Records world 0 and replays all n-f worlds.
WorldsReport run_worlds(const ScenarioConfig& cfg);

/// The reference world-0 scenario (bare underlay + split_brain).
ScenarioConfig worlds_reference_scenario(std::uint64_t seed);

}  // namespace finsim
