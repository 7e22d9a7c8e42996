// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "finsim/errors.hpp"
#include "finsim/simulation.hpp"

using namespace finsim;

namespace {

/// Per-side vote counts implied by a partition layout, checked before any
/// scenario is trusted to realize an attack.
struct VoteCountOracle {
  std::size_t side_a = 0;
  std::size_t side_b = 0;
};

VoteCountOracle side_votes(const ScenarioConfig& cfg) {
  VoteCountOracle counts;
  counts.side_a = cfg.strategy.partition_a.size();
  counts.side_b = cfg.strategy.partition_b.size();
  if (cfg.strategy.kind == StrategyKind::ForensicTrigger) {
    counts.side_a += cfg.strategy.corrupted.size();  // all corrupted vote on both sides
    counts.side_b += cfg.strategy.corrupted.size();
  } else {
    counts.side_a += 1;  // the active replica votes on both sides
    counts.side_b += 1 + (cfg.strategy.corrupted.size() - 1);  // plus the idle replicas in B
  }
  return counts;
}

}  // namespace

TEST_CASE("vote-count oracle: the canned layouts clear their thresholds") {
  // split_brain, n=7: 3 honest + 1 adversary per side = 4 = floor(7/2)+1
  ScenarioConfig split = make_scenario(Protocol::MajoritySync, StrategyKind::SplitBrain, 1);
  auto counts = side_votes(split);
  CHECK(counts.side_a == 4);
  CHECK(counts.side_b == 4);
  CHECK(counts.side_a >= split.params().notarize_threshold);

  // forensic_trigger, n=7: honest 2/2, 3 corrupted double-signers: 2 + 3 = 5 = 2f+1
  ScenarioConfig forensic = make_scenario(Protocol::SyncFin, StrategyKind::ForensicTrigger, 1);
  auto fcounts = side_votes(forensic);
  CHECK(fcounts.side_a == 5);
  CHECK(fcounts.side_b == 5);
  CHECK(fcounts.side_a >= forensic.params().finality_quorum());

  // liveness_kill: honest signature ceiling after the fork is 3 < 5
  ScenarioConfig lk = make_scenario(Protocol::SyncFin, StrategyKind::LivenessKill, 1);
  std::size_t max_honest_side =
      std::max(lk.strategy.partition_a.size(), lk.strategy.partition_b.size());
  CHECK(max_honest_side == 3);
  CHECK(max_honest_side < lk.params().finality_quorum());
}

TEST_CASE("partition strategy delay rules") {
  ScenarioConfig cfg = make_scenario(Protocol::MajoritySync, StrategyKind::SplitBrain, 0);
  cfg.gst = GstSpec::fixed_at(200);
  cfg.slots = 250;
  auto strategy = make_strategy(cfg);
  strategy->begin_slot(4);
  ReplicaIndex a1 = cfg.strategy.partition_a[0];
  ReplicaIndex a2 = cfg.strategy.partition_a[1];
  ReplicaIndex b1 = cfg.strategy.partition_b[0];
  auto vote = make_payload(Vote{a1, 1, genesis_hash()});

  // crossing honest message: held for gst + delta (the queue computes 201)
  Message crossing{PartyId::replica(a1), PartyId::replica(b1), vote, 4};
  CHECK_FALSE(strategy->choose_delivery(crossing).has_value());
  EventQueue q(cfg.network());
  while (q.current_slot() < 4) (void)q.advance();
  Message held = crossing;
  q.submit_after_gst(held);
  Slot delivered = 0;
  while (q.pending_count() > 0) {
    if (!q.advance().empty()) delivered = q.current_slot();
  }
  CHECK(delivered == 201);

  // intra-partition: send + delta
  Message intra{PartyId::replica(a1), PartyId::replica(a2), vote, 4};
  CHECK(strategy->choose_delivery(intra) == Slot{5});

  // replica-to-client deliveries are instantaneous
  Message to_client{PartyId::replica(a1), PartyId::client(2), vote, 4};
  CHECK(strategy->choose_delivery(to_client) == Slot{4});
}

TEST_CASE("passive strategy delivers everything at +delta") {
  ScenarioConfig cfg = make_scenario(Protocol::SyncFin, StrategyKind::Passive, 0);
  auto strategy = make_strategy(cfg);
  strategy->begin_slot(3);
  Message m{PartyId::replica(1), PartyId::replica(2),
            make_payload(Vote{1, 1, genesis_hash()}), 3};
  CHECK(strategy->choose_delivery(m) == Slot{3 + cfg.delta});
}

TEST_CASE("passive syncfin run: no violation, ledgers grow, invariants hold") {
  ScenarioConfig cfg = make_scenario(Protocol::SyncFin, StrategyKind::Passive, 3);
  SimulationResult result = run_simulation(cfg);
  CHECK_FALSE(result.violation.has_value());
  CHECK(result.invariants.ok());
  CHECK(result.undelivered == 0);  // no message loss under synchrony
  for (const ClientView& v : result.clients) {
    CHECK(v.ledger().size() > 50);
    CHECK_FALSE(v.inconsistent());
  }
}

TEST_CASE("crash-silent run stays safe and live") {
  ScenarioConfig cfg = make_scenario(Protocol::SyncFin, StrategyKind::CrashSilent, 5);
  SimulationResult result = run_simulation(cfg);
  CHECK_FALSE(result.violation.has_value());
  CHECK(result.invariants.ok());
  for (const ClientView& v : result.clients) CHECK(v.ledger().size() > 50);
}

TEST_CASE("split_brain: one deviating replica forks the underlay before gst") {
  ScenarioConfig cfg = make_scenario(Protocol::MajoritySync, StrategyKind::SplitBrain, 2);
  SimulationResult result = run_simulation(cfg);
  REQUIRE(result.attack_success_slot.has_value());

  // two honest replicas hold conflicting underlay-confirmed blocks at a
  // common height
  bool conflict_found = false;
  for (const ReplicaSummary& a : result.replicas) {
    for (const ReplicaSummary& b : result.replicas) {
      if (a.corrupted || b.corrupted || a.id == b.id) continue;
      std::size_t common = std::min(a.confirmed_chain.size(), b.confirmed_chain.size());
      for (std::size_t h = 0; h < common; ++h) {
        if (!(a.confirmed_chain[h] == b.confirmed_chain[h])) conflict_found = true;
      }
    }
  }
  CHECK(conflict_found);

  // client-level safety violation (clients confirm underlay blocks directly)
  CHECK(result.violation.has_value());
  CHECK(result.invariants.ok());  // honest replicas never equivocate
}

TEST_CASE("liveness_kill: syncfin halts after gst while invariants hold") {
  ScenarioConfig cfg = make_scenario(Protocol::SyncFin, StrategyKind::LivenessKill, 4);
  SimulationResult result = run_simulation(cfg);
  REQUIRE(result.attack_success_slot.has_value());
  REQUIRE(result.resolved_gst.has_value());
  Slot gst = *result.resolved_gst;
  CHECK(cfg.slots - gst >= 400);  // at least 200 epochs after gst

  CHECK_FALSE(result.violation.has_value());  // safety is never violated
  CHECK(result.invariants.ok());

  for (const ClientView& v : result.clients) {
    // the ledger never grows after gst (here: never grows at all)
    for (const ClientSnapshot& snap : v.snapshots()) {
      if (snap.slot > gst) CHECK(snap.ledger.empty());
    }
    // no post-fork block ever accumulates a 2f+1 signature quorum
    for (const auto& [block, signers] : v.signatures()) {
      if (!(block == genesis_hash())) {
        CHECK(signers.size() < cfg.params().finality_quorum());
        CHECK(signers.size() <= 3);
      }
    }
  }
}

TEST_CASE("forensic_trigger: f+1 double-signers break safety and are all accused") {
  ScenarioConfig cfg = make_scenario(Protocol::SyncFin, StrategyKind::ForensicTrigger, 6);
  SimulationResult result = run_simulation(cfg, CaptureLevel::ClientLogs);
  REQUIRE(result.attack_success_slot.has_value());
  REQUIRE(result.violation.has_value());
  REQUIRE(result.verdict.has_value());
  CHECK(result.verdict->accused == cfg.strategy.corrupted);
  CHECK(result.verdict->accused.size() == cfg.f + 1);
  CHECK(verify_verdict(*result.verdict));
  CHECK(result.invariants.ok());  // honest replicas stay clean

  const SafetyViolation& v = *result.violation;
  CHECK(v.ledger_a != v.ledger_b);
}

TEST_CASE("attack budget: an impossible attack fails with a diagnostic") {
  ScenarioConfig cfg = make_scenario(Protocol::PSyncQuorum, StrategyKind::SplitBrain, 1);
  cfg.strategy.slot_budget = 40;  // psync_quorum never notarizes pre-gst
  CHECK_THROWS_AS((void)run_simulation(cfg), AttackFailedError);
}

TEST_CASE("psync_quorum under partition delays: no conflicting confirmations") {
  ScenarioConfig cfg = make_scenario(Protocol::PSyncQuorum, StrategyKind::SplitBrain, 7);
  cfg.strategy.slot_budget = 0;
  cfg.gst = GstSpec::fixed_at(100);
  cfg.slots = 400;
  SimulationResult result = run_simulation(cfg);
  CHECK_FALSE(result.violation.has_value());
  CHECK(result.invariants.ok());
  // liveness resumes after gst
  for (const ClientView& v : result.clients) CHECK(v.ledger().size() > 10);
}

TEST_CASE("unauthorized senders are rejected") {
  std::set<ReplicaIndex> corrupted{6, 7};
  std::set<std::uint64_t> minted;
  Message honest_forgery{PartyId::replica(1), PartyId::replica(2),
                         make_payload(Vote{3, 1, genesis_hash()}), 0};
  CHECK_THROWS_AS(authorize_submit(honest_forgery, corrupted, minted), UnauthorizedSenderError);

  Message adversary_forgery{PartyId::replica(6), PartyId::replica(2),
                            make_payload(Vote{3, 1, genesis_hash()}), 0};
  CHECK_THROWS_AS(authorize_submit(adversary_forgery, corrupted, minted),
                  UnauthorizedSenderError);

  Message own_vote{PartyId::replica(3), PartyId::replica(2),
                   make_payload(Vote{3, 1, genesis_hash()}), 0};
  CHECK_NOTHROW(authorize_submit(own_vote, corrupted, minted));
  // once minted, anyone may relay it
  Message relay{PartyId::replica(1), PartyId::replica(2),
                make_payload(Vote{3, 1, genesis_hash()}), 0};
  CHECK_NOTHROW(authorize_submit(relay, corrupted, minted));

  Message corrupted_own{PartyId::replica(6), PartyId::replica(2),
                        make_payload(Vote{7, 1, genesis_hash()}), 0};
  CHECK_NOTHROW(authorize_submit(corrupted_own, corrupted, minted));

  Message fake_tx{PartyId::replica(6), PartyId::replica(2),
                  make_payload(TransactionInput{99, 0}), 0};
  CHECK_THROWS_AS(authorize_submit(fake_tx, corrupted, minted), UnauthorizedSenderError);
}

TEST_CASE("determinism: identical configs produce identical digests") {
  for (StrategyKind kind : {StrategyKind::Passive, StrategyKind::RandomDelay,
                            StrategyKind::SplitBrain, StrategyKind::ForensicTrigger}) {
    Protocol protocol =
        kind == StrategyKind::SplitBrain ? Protocol::MajoritySync : Protocol::SyncFin;
    ScenarioConfig cfg = make_scenario(protocol, kind, 11);
    SimulationResult a = run_simulation(cfg);
    SimulationResult b = run_simulation(cfg);
    CHECK(a.digest == b.digest);
    ScenarioConfig other = make_scenario(protocol, kind, 12);
    SimulationResult c = run_simulation(other);
    CHECK(a.digest != c.digest);
  }
}
