// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "finsim/classify.hpp"

namespace finsim {

namespace {

constexpr Slot kLivenessGate = 24;  // 12 epochs at delta = 1

struct Outcome {
  bool violated = false;
  bool live = true;  // no flagged post-gst transactions
  std::optional<Verdict> verdict;
};

Outcome run_cell(ScenarioConfig cfg, CaptureLevel capture) {
  SimulationResult result = run_simulation(cfg, capture);
  Outcome out;
  out.violated = result.violation.has_value();
  out.verdict = result.verdict;

  std::vector<std::tuple<Slot, TxId, ReplicaIndex>> schedule;
  for (const TxScheduleEntry& e : cfg.tx_schedule) schedule.emplace_back(e.slot, e.tx, e.target);
  LivenessReport liveness = liveness_report(result.clients, schedule,
                                            cfg.strategy.corrupted, result.resolved_gst,
                                            kLivenessGate);
  Slot gst = result.resolved_gst.value_or(0);
  for (const LivenessRow& row : liveness.rows) {
    if (row.input_slot >= gst && row.flagged) out.live = false;
  }
  return out;
}

ScenarioConfig battery_config(Protocol protocol, StrategyKind strategy, std::uint64_t seed) {
  ScenarioConfig cfg = make_scenario(protocol, strategy, seed);
  cfg.strategy.slot_budget = 0;  // best effort: outcomes are measured, not required
  return cfg;
}

}  // namespace

ClassificationMatrix classify(std::uint64_t seed, std::uint32_t seeds_per_cell) {
  ClassificationMatrix matrix;
  const Protocol protocols[] = {Protocol::MajoritySync, Protocol::PSyncQuorum, Protocol::SyncFin};

  for (Protocol p : protocols) {
    ProtocolClassification row;
    row.protocol = to_string(p);
    row.synch_safe = true;
    row.synch_live = true;
    row.final_ = true;
    bool psync_safe = true;
    bool psync_live = true;

    for (std::uint32_t k = 0; k < seeds_per_cell; ++k) {
      std::uint64_t s = seed + k;
      // Synchrony battery (gst = 0).
      for (StrategyKind strat : {StrategyKind::Passive, StrategyKind::CrashSilent}) {
        Outcome o = run_cell(battery_config(p, strat, s), CaptureLevel::DigestOnly);
        row.synch_safe = row.synch_safe && !o.violated;
        row.synch_live = row.synch_live && o.live;
      }
      // Adversarial partial-synchrony battery with at most f corrupted.
      for (StrategyKind strat :
           {StrategyKind::RandomDelay, StrategyKind::SplitBrain, StrategyKind::LivenessKill}) {
        ScenarioConfig cfg = battery_config(p, strat, s);
        if (strat != StrategyKind::RandomDelay) {
          cfg.gst = GstSpec::fixed_at(100);  // liveness after gst is measurable
          cfg.slots = 400;
        }
        Outcome o = run_cell(cfg, CaptureLevel::DigestOnly);
        row.final_ = row.final_ && !o.violated;
        psync_safe = psync_safe && !o.violated;
        psync_live = psync_live && o.live;
      }
      // Accountability probe: f+1 corrupted double-signers.
      if (p == Protocol::SyncFin) {
        Outcome o =
            run_cell(battery_config(p, StrategyKind::ForensicTrigger, s), CaptureLevel::ClientLogs);
        bool ok = o.violated && o.verdict.has_value() &&
                  o.verdict->accused.size() >= static_cast<std::size_t>(ProtocolParams::make(
                                                   p, 7, 2, 1).f + 1) &&
                  verify_verdict(*o.verdict);
        row.accountable_safe = k == 0 ? ok : (row.accountable_safe && ok);
      }
    }
    row.live_after_gst = psync_safe && psync_live;
    matrix.rows.push_back(std::move(row));
  }

  // External reference points from the literature, documented, not run.
  ProtocolClassification pbft{"pbft", true, true, true, true, true, true, false};
  ProtocolClassification hotstuff_null{"hotstuff_null", true, true, true, true, false, true,
                                       false};
  ProtocolClassification nakamoto{"nakamoto", true, false, false, false, false, false, true};
  matrix.rows.push_back(pbft);
  matrix.rows.push_back(hotstuff_null);
  matrix.rows.push_back(nakamoto);
  return matrix;
}

ClassificationMatrix expected_classification() {
  ClassificationMatrix m;
  m.rows.push_back({"majority_sync", false, true, true, false, false, false, false});
  m.rows.push_back({"psync_quorum", false, true, true, true, false, true, false});
  m.rows.push_back({"syncfin", false, true, true, true, true, false, false});
  return m;
}

Json to_json(const ClassificationMatrix& m) {
  Json rows = Json::array();
  for (const ProtocolClassification& row : m.rows) {
    rows.push_back(Json{{"protocol", row.protocol},
                        {"reference_only", row.reference_only},
                        {"synch_safe", row.synch_safe},
                        {"synch_live", row.synch_live},
                        {"final", row.final_},
                        {"accountable_safe", row.accountable_safe},
                        {"live_after_gst", row.live_after_gst},
                        {"secure_dynamic_participation", row.dynamic_participation}});
  }
  return Json{{"schema_version", kSchemaVersion}, {"rows", rows}};
}

}  // namespace finsim
