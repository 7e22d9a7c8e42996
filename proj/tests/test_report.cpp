// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "finsim/errors.hpp"
#include "finsim/report.hpp"

using namespace finsim;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("scenario config validation messages") {
  ScenarioConfig cfg = make_scenario(Protocol::SyncFin, StrategyKind::Passive, 1);
  cfg.n = 6;  // 6 != 3f+1
  try {
    cfg.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("n must equal 3f+1") != std::string::npos);
  }

  ScenarioConfig bad_target = make_scenario(Protocol::SyncFin, StrategyKind::Passive, 1);
  bad_target.tx_schedule.push_back({0, 1, 9});
  CHECK_THROWS_AS(bad_target.validate(), ConfigError);

  ScenarioConfig short_run = make_scenario(Protocol::SyncFin, StrategyKind::Passive, 1);
  short_run.gst = GstSpec::fixed_at(500);
  CHECK_THROWS_AS(short_run.validate(), ConfigError);

  ScenarioConfig no_pregst = make_scenario(Protocol::MajoritySync, StrategyKind::SplitBrain, 1);
  no_pregst.gst = GstSpec::fixed_at(0);
  CHECK_THROWS_AS(no_pregst.validate(), ConfigError);
}

TEST_CASE("config round-trips through json") {
  for (StrategyKind kind :
       {StrategyKind::Passive, StrategyKind::SplitBrain, StrategyKind::ForensicTrigger}) {
    Protocol protocol =
        kind == StrategyKind::SplitBrain ? Protocol::MajoritySync : Protocol::SyncFin;
    ScenarioConfig cfg = make_scenario(protocol, kind, 17);
    Json j = to_json(cfg);
    validate_config_json(j);
    ScenarioConfig back = config_from_json(j);
    CHECK(to_json(back) == j);
    CHECK(back.gst == cfg.gst);
    CHECK(back.tx_schedule == cfg.tx_schedule);
    CHECK(back.strategy.corrupted == cfg.strategy.corrupted);
  }
}

TEST_CASE("gst json forms") {
  ScenarioConfig cfg = make_scenario(Protocol::SyncFin, StrategyKind::LivenessKill, 1);
  CHECK(to_json(cfg)["gst"] == "on_attack_success");
  cfg.gst = GstSpec::infinite();
  CHECK(to_json(cfg)["gst"] == "infinite");
  cfg.gst = GstSpec::fixed_at(7);
  CHECK(to_json(cfg)["gst"] == 7);
}

TEST_CASE("run report serializes, validates, and is reproducible") {
  ScenarioConfig cfg = make_scenario(Protocol::SyncFin, StrategyKind::Passive, 21);
  RunReport report = make_run_report(run_simulation(cfg), 20);
  Json j = to_json(report);
  validate_run_report_json(j);
  CHECK(j["safety_violation"].is_null());
  CHECK(j["liveness"]["flagged_count"] == 0);

  RunReport again = make_run_report(run_simulation(cfg), 20);
  CHECK(to_json(again) == j);  // byte-identical on re-run
  CHECK(report.exit_code() == 0);
}

TEST_CASE("violating run carries evidence, verdict, and exit hint 2") {
  ScenarioConfig cfg = make_scenario(Protocol::SyncFin, StrategyKind::ForensicTrigger, 23);
  RunReport report =
      make_run_report(run_simulation(cfg, CaptureLevel::ClientLogs), 20);
  CHECK(report.exit_code() == 2);
  Json j = to_json(report);
  validate_run_report_json(j);
  CHECK_FALSE(j["safety_violation"].is_null());
  CHECK_FALSE(j["verdict"].is_null());
  CHECK(j["verdict"]["accused"].size() == 3);
}

TEST_CASE("evidence files round-trip and drive the forensic pipeline") {
  ScenarioConfig cfg = make_scenario(Protocol::SyncFin, StrategyKind::ForensicTrigger, 29);
  SimulationResult result = run_simulation(cfg, CaptureLevel::ClientLogs);
  REQUIRE(result.violation.has_value());
  const ClientView* a = nullptr;
  const ClientView* b = nullptr;
  for (const ClientView& v : result.clients) {
    if (v.id() == result.violation->client_a) a = &v;
    if (v.id() == result.violation->client_b) b = &v;
  }
  REQUIRE(a);
  REQUIRE(b);
  auto ev = extract_evidence(*a, *b);
  REQUIRE(ev.has_value());

  auto path = temp_file("finsim_evidence_test.json");
  write_json_file(path, to_json(*ev));
  Evidence loaded = evidence_from_json(read_json_file(path));
  Verdict verdict = forensic(loaded, loaded.params);
  CHECK(verdict.accused == cfg.strategy.corrupted);
  CHECK(verify_verdict(verdict));

  // verdict json round-trip preserves verifiability
  Verdict reloaded = verdict_from_json(to_json(verdict));
  CHECK(reloaded.accused == verdict.accused);
  CHECK(verify_verdict(reloaded));
  std::filesystem::remove(path);
}

TEST_CASE("parse errors: truncated and malformed files") {
  auto path = temp_file("finsim_truncated.json");
  {
    std::ofstream out(path);
    out << "{\"schema_version\": 1, \"n\": 7, ";  // truncated
  }
  CHECK_THROWS_AS((void)read_json_file(path), ParseError);
  std::filesystem::remove(path);

  Json not_evidence = Json{{"schema_version", 1}, {"n", 7}};
  CHECK_THROWS_AS((void)evidence_from_json(not_evidence), ParseError);
  Json wrong_version = Json{{"schema_version", 99}};
  CHECK_THROWS_AS(validate_config_json(wrong_version), ParseError);
}

TEST_CASE("message json round-trip over every payload kind") {
  Block b;
  b.parent = genesis_hash();
  b.height = 1;
  b.epoch = 1;
  b.proposer = 2;
  b.payload = {4, 5};
  std::vector<Payload> payloads{Proposal{b}, Vote{1, 2, genesis_hash()},
                                FinalitySignature{3, 4, hash_block(b)}, TransactionInput{9, 2},
                                SyncBlocks{{b}}};
  for (const Payload& p : payloads) {
    Message m{PartyId::replica(1), PartyId::client(2), make_payload(p), 5};
    Message back = message_from_json(to_json(m));
    CHECK(back == m);
  }
}

TEST_CASE("seed sweep merges deterministically in seed order") {
  ScenarioConfig cfg = make_scenario(Protocol::SyncFin, StrategyKind::Passive, 100);
  cfg.slots = 60;  // keep the sweep cheap
  std::vector<TxScheduleEntry> schedule;
  for (const TxScheduleEntry& e : cfg.tx_schedule) {
    if (e.slot < 30) schedule.push_back(e);
  }
  cfg.tx_schedule = schedule;
  auto reports = run_sweep(cfg, 4, 20, 2);
  REQUIRE(reports.size() == 4);
  for (std::size_t k = 0; k < reports.size(); ++k) {
    CHECK(reports[k].config.seed == 100 + k);
    CHECK_FALSE(reports[k].result.violation.has_value());
  }
  auto again = run_sweep(cfg, 4, 20, 4);
  for (std::size_t k = 0; k < reports.size(); ++k) {
    CHECK(reports[k].result.digest == again[k].result.digest);
  }
}
