// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "finsim/report.hpp"

#include <atomic>
#include <fstream>
#include <future>
#include <thread>

#include "finsim/errors.hpp"

namespace finsim {

namespace {

Json hash_json(BlockHash h) { return to_hex(h); }

BlockHash hash_from_json(const Json& j) {
  if (!j.is_string()) throw ParseError("block hash must be a hex string");
  return BlockHash{std::stoull(j.get<std::string>(), nullptr, 16)};
}

Json party_json(PartyId p) { return to_string(p); }

PartyId party_from_json(const Json& j) {
  std::string s = j.get<std::string>();
  if (s == "env") return PartyId::environment();
  if (s.size() < 2 || (s[0] != 'r' && s[0] != 'c')) throw ParseError("bad party id '" + s + "'");
  auto index = static_cast<std::uint32_t>(std::stoul(s.substr(1)));
  return s[0] == 'r' ? PartyId::replica(index) : PartyId::client(index);
}

Json block_json(const Block& b) {
  return Json{{"parent", hash_json(b.parent)},
              {"height", b.height},
              {"epoch", b.epoch},
              {"proposer", b.proposer},
              {"payload", b.payload}};
}

Block block_from_json(const Json& j) {
  Block b;
  b.parent = hash_from_json(j.at("parent"));
  b.height = j.at("height").get<std::uint64_t>();
  b.epoch = j.at("epoch").get<Epoch>();
  b.proposer = j.at("proposer").get<ReplicaIndex>();
  b.payload = j.at("payload").get<std::vector<TxId>>();
  return b;
}

Json payload_json(const Payload& p) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Proposal>) {
          return Json{{"type", "proposal"}, {"block", block_json(v.block)}};
        } else if constexpr (std::is_same_v<T, Vote>) {
          return Json{{"type", "vote"},
                      {"voter", v.voter},
                      {"epoch", v.epoch},
                      {"block", hash_json(v.block)}};
        } else if constexpr (std::is_same_v<T, FinalitySignature>) {
          return Json{{"type", "finality_signature"},
                      {"signer", v.signer},
                      {"height", v.height},
                      {"block", hash_json(v.block)}};
        } else if constexpr (std::is_same_v<T, TransactionInput>) {
          return Json{{"type", "tx_input"}, {"tx", v.tx}, {"input_slot", v.input_slot}};
        } else {
          Json blocks = Json::array();
          for (const Block& b : v.blocks) blocks.push_back(block_json(b));
          return Json{{"type", "sync"}, {"blocks", blocks}};
        }
      },
      p);
}

Payload payload_from_json(const Json& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "proposal") return Proposal{block_from_json(j.at("block"))};
  if (type == "vote") {
    return Vote{j.at("voter").get<ReplicaIndex>(), j.at("epoch").get<Epoch>(),
                hash_from_json(j.at("block"))};
  }
  if (type == "finality_signature") {
    return FinalitySignature{j.at("signer").get<ReplicaIndex>(),
                             j.at("height").get<std::uint64_t>(), hash_from_json(j.at("block"))};
  }
  if (type == "tx_input") {
    return TransactionInput{j.at("tx").get<TxId>(), j.at("input_slot").get<Slot>()};
  }
  if (type == "sync") {
    SyncBlocks s;
    for (const Json& b : j.at("blocks")) s.blocks.push_back(block_from_json(b));
    return s;
  }
  throw ParseError("unknown payload type '" + type + "'");
}

Json sig_json(const FinalitySignature& s) {
  return Json{{"signer", s.signer}, {"height", s.height}, {"block", hash_json(s.block)}};
}

FinalitySignature sig_from_json(const Json& j) {
  return FinalitySignature{j.at("signer").get<ReplicaIndex>(),
                           j.at("height").get<std::uint64_t>(), hash_from_json(j.at("block"))};
}

Json gst_json(const GstSpec& gst) {
  switch (gst.kind) {
    case GstSpec::Kind::Fixed: return gst.fixed;
    case GstSpec::Kind::Infinite: return "infinite";
    case GstSpec::Kind::OnAttackSuccess: return "on_attack_success";
  }
  return nullptr;
}

GstSpec gst_from_json(const Json& j) {
  if (j.is_number_unsigned() || j.is_number_integer()) {
    return GstSpec::fixed_at(j.get<Slot>());
  }
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "infinite") return GstSpec::infinite();
    if (s == "on_attack_success") return GstSpec::on_attack_success();
  }
  throw ParseError("gst must be a slot number, \"infinite\", or \"on_attack_success\"");
}

Json violation_json(const SafetyViolation& v) {
  return Json{{"client_a", v.client_a}, {"slot_a", v.slot_a},   {"ledger_a", v.ledger_a},
              {"tip_a", hash_json(v.tip_a)},                    {"client_b", v.client_b},
              {"slot_b", v.slot_b},     {"ledger_b", v.ledger_b}, {"tip_b", hash_json(v.tip_b)}};
}

Json snapshots_json(const std::vector<ClientSnapshot>& snaps) {
  Json out = Json::array();
  for (const ClientSnapshot& s : snaps) {
    out.push_back(Json{{"slot", s.slot}, {"ledger", s.ledger}, {"tip", hash_json(s.tip)}});
  }
  return out;
}

void require_fields(const Json& j, std::initializer_list<const char*> fields,
                    const std::string& what) {
  if (!j.is_object()) throw ParseError(what + " must be an object");
  for (const char* f : fields) {
    if (!j.contains(f)) throw ParseError(what + " is missing field '" + std::string(f) + "'");
  }
}

}  // namespace

Json to_json(const ScenarioConfig& cfg) {
  Json strategy{{"name", to_string(cfg.strategy.kind)},
                {"corrupted", cfg.strategy.corrupted},
                {"active", cfg.strategy.active},
                {"partition_a", cfg.strategy.partition_a},
                {"partition_b", cfg.strategy.partition_b},
                {"slot_budget", cfg.strategy.slot_budget}};
  Json schedule = Json::array();
  for (const TxScheduleEntry& e : cfg.tx_schedule) {
    schedule.push_back(Json{{"slot", e.slot}, {"tx", e.tx}, {"target", e.target}});
  }
  return Json{{"schema_version", kSchemaVersion},
              {"n", cfg.n},
              {"f", cfg.f},
              {"delta", cfg.delta},
              {"gst", gst_json(cfg.gst)},
              {"slots", cfg.slots},
              {"protocol", to_string(cfg.protocol)},
              {"strategy", strategy},
              {"tx_schedule", schedule},
              {"clients", cfg.clients},
              {"seed", cfg.seed}};
}

void validate_config_json(const Json& j) {
  require_fields(j, {"schema_version", "n", "f", "delta", "gst", "slots", "protocol", "strategy",
                     "clients", "seed"},
                 "config");
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw ParseError("unsupported config schema_version");
  }
  require_fields(j.at("strategy"), {"name", "corrupted"}, "config.strategy");
}

ScenarioConfig config_from_json(const Json& j) {
  validate_config_json(j);
  ScenarioConfig cfg;
  cfg.n = j.at("n").get<std::uint32_t>();
  cfg.f = j.at("f").get<std::uint32_t>();
  cfg.delta = j.at("delta").get<Slot>();
  cfg.gst = gst_from_json(j.at("gst"));
  cfg.slots = j.at("slots").get<Slot>();
  cfg.protocol = protocol_from_string(j.at("protocol").get<std::string>());
  const Json& s = j.at("strategy");
  cfg.strategy.kind = strategy_from_string(s.at("name").get<std::string>());
  cfg.strategy.corrupted = s.at("corrupted").get<std::set<ReplicaIndex>>();
  if (s.contains("active")) cfg.strategy.active = s.at("active").get<ReplicaIndex>();
  if (s.contains("partition_a")) {
    cfg.strategy.partition_a = s.at("partition_a").get<std::vector<ReplicaIndex>>();
  }
  if (s.contains("partition_b")) {
    cfg.strategy.partition_b = s.at("partition_b").get<std::vector<ReplicaIndex>>();
  }
  if (s.contains("slot_budget")) cfg.strategy.slot_budget = s.at("slot_budget").get<Slot>();
  if (j.contains("tx_schedule")) {
    for (const Json& e : j.at("tx_schedule")) {
      cfg.tx_schedule.push_back({e.at("slot").get<Slot>(), e.at("tx").get<TxId>(),
                                 e.at("target").get<ReplicaIndex>()});
    }
  }
  cfg.clients = j.at("clients").get<std::uint32_t>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

Json to_json(const Message& m) {
  return Json{{"sender", party_json(m.sender)},
              {"recipient", party_json(m.recipient)},
              {"send_slot", m.send_slot},
              {"payload", payload_json(*m.payload)}};
}

Message message_from_json(const Json& j) {
  Message m;
  m.sender = party_from_json(j.at("sender"));
  m.recipient = party_from_json(j.at("recipient"));
  m.send_slot = j.at("send_slot").get<Slot>();
  m.payload = make_payload(payload_from_json(j.at("payload")));
  return m;
}

RunReport make_run_report(SimulationResult result, Slot t_confirm) {
  RunReport report;
  report.config = result.config;
  std::vector<std::tuple<Slot, TxId, ReplicaIndex>> schedule;
  for (const TxScheduleEntry& e : result.config.tx_schedule) {
    schedule.emplace_back(e.slot, e.tx, e.target);
  }
  report.liveness = liveness_report(result.clients, schedule, result.config.strategy.corrupted,
                                    result.resolved_gst, t_confirm);
  report.result = std::move(result);
  return report;
}

Json to_json(const RunReport& report) {
  const SimulationResult& r = report.result;
  Json clients = Json::array();
  for (const ClientView& v : r.clients) {
    clients.push_back(Json{{"id", v.id()},
                           {"final_ledger", v.ledger()},
                           {"inconsistent", v.inconsistent()},
                           {"snapshots", snapshots_json(v.snapshots())}});
  }
  Json liveness_rows = Json::array();
  for (const LivenessRow& row : report.liveness.rows) {
    liveness_rows.push_back(Json{
        {"tx", row.tx},
        {"input_slot", row.input_slot},
        {"target", row.target},
        {"included_slot", row.included_slot ? Json(*row.included_slot) : Json(nullptr)},
        {"deadline", row.deadline ? Json(*row.deadline) : Json(nullptr)},
        {"flagged", row.flagged}});
  }
  Json timeline = Json::array();
  for (const TimelineEvent& e : r.timeline) {
    timeline.push_back(Json{{"slot", e.slot}, {"event", e.event}});
  }
  return Json{
      {"schema_version", kSchemaVersion},
      {"config", to_json(report.config)},
      {"clients", clients},
      {"safety_violation", r.violation ? violation_json(*r.violation) : Json(nullptr)},
      {"liveness",
       Json{{"t_confirm", report.liveness.t_confirm},
            {"max_latency",
             report.liveness.max_latency ? Json(*report.liveness.max_latency) : Json(nullptr)},
            {"flagged_count", report.liveness.flagged_count},
            {"rows", liveness_rows}}},
      {"verdict", r.verdict ? to_json(*r.verdict) : Json(nullptr)},
      {"timeline", timeline},
      {"resolved_gst", r.resolved_gst ? Json(*r.resolved_gst) : Json(nullptr)},
      {"attack_success_slot",
       r.attack_success_slot ? Json(*r.attack_success_slot) : Json(nullptr)},
      {"invariant_problems", r.invariants.problems},
      {"undelivered", r.undelivered},
      {"transcript_digest", to_hex(BlockHash{r.digest})}};
}

void validate_run_report_json(const Json& j) {
  require_fields(j,
                 {"schema_version", "config", "clients", "safety_violation", "liveness", "verdict",
                  "timeline", "resolved_gst", "invariant_problems", "transcript_digest"},
                 "run report");
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw ParseError("unsupported report schema_version");
  }
  validate_config_json(j.at("config"));
  for (const Json& c : j.at("clients")) {
    require_fields(c, {"id", "final_ledger", "inconsistent", "snapshots"}, "report client");
  }
  require_fields(j.at("liveness"), {"t_confirm", "max_latency", "flagged_count", "rows"},
                 "report liveness");
}

Json to_json(const Evidence& ev) {
  auto log_json = [](const std::vector<Message>& log, const std::vector<Slot>& slots) {
    Json out = Json::array();
    for (std::size_t i = 0; i < log.size(); ++i) {
      Json entry = to_json(log[i]);
      entry["observed_slot"] = slots[i];
      out.push_back(std::move(entry));
    }
    return out;
  };
  return Json{{"schema_version", kSchemaVersion},
              {"n", ev.params.n},
              {"f", ev.params.f},
              {"epoch_len", ev.params.epoch_len},
              {"notarize_threshold", ev.params.notarize_threshold},
              {"ledger_a", ev.ledger_a},
              {"ledger_b", ev.ledger_b},
              {"tip_a", hash_json(ev.tip_a)},
              {"tip_b", hash_json(ev.tip_b)},
              {"log_a", log_json(ev.log_a, ev.slots_a)},
              {"log_b", log_json(ev.log_b, ev.slots_b)}};
}

void validate_evidence_json(const Json& j) {
  require_fields(j,
                 {"schema_version", "n", "f", "epoch_len", "notarize_threshold", "ledger_a",
                  "ledger_b", "tip_a", "tip_b", "log_a", "log_b"},
                 "evidence");
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw ParseError("unsupported evidence schema_version");
  }
}

Evidence evidence_from_json(const Json& j) {
  validate_evidence_json(j);
  Evidence ev;
  ev.params.n = j.at("n").get<std::uint32_t>();
  ev.params.f = j.at("f").get<std::uint32_t>();
  ev.params.epoch_len = j.at("epoch_len").get<Slot>();
  ev.params.notarize_threshold = j.at("notarize_threshold").get<std::uint32_t>();
  ev.ledger_a = j.at("ledger_a").get<Ledger>();
  ev.ledger_b = j.at("ledger_b").get<Ledger>();
  ev.tip_a = hash_from_json(j.at("tip_a"));
  ev.tip_b = hash_from_json(j.at("tip_b"));
  auto load_log = [](const Json& arr, std::vector<Message>& log, std::vector<Slot>& slots) {
    for (const Json& e : arr) {
      log.push_back(message_from_json(e));
      slots.push_back(e.at("observed_slot").get<Slot>());
    }
  };
  load_log(j.at("log_a"), ev.log_a, ev.slots_a);
  load_log(j.at("log_b"), ev.log_b, ev.slots_b);
  return ev;
}

Json to_json(const Verdict& v) {
  Json proofs = Json::array();
  for (const auto& [replica, proof] : v.proofs) {
    proofs.push_back(Json{{"replica", replica},
                          {"first", sig_json(proof.first)},
                          {"second", sig_json(proof.second)}});
  }
  return Json{{"schema_version", kSchemaVersion},
              {"accused", v.accused},
              {"proofs", proofs}};
}

Verdict verdict_from_json(const Json& j) {
  require_fields(j, {"schema_version", "accused", "proofs"}, "verdict");
  Verdict v;
  v.accused = j.at("accused").get<std::set<ReplicaIndex>>();
  for (const Json& p : j.at("proofs")) {
    v.proofs[p.at("replica").get<ReplicaIndex>()] = {sig_from_json(p.at("first")),
                                                     sig_from_json(p.at("second"))};
  }
  return v;
}

Json to_json(const WorldsReport& report) {
  Json rows = Json::array();
  for (const WorldRow& row : report.rows) {
    rows.push_back(Json{{"world", row.honest},
                        {"honest", row.honest},
                        {"corrupted", row.corrupted},
                        {"indistinguishable", row.indistinguishable},
                        {"violation", row.violation},
                        {"exemplar_overlap", row.exemplar_overlap}});
  }
  return Json{{"schema_version", kSchemaVersion},
              {"base_digest", to_hex(BlockHash{report.base_digest})},
              {"base_violation",
               report.base_violation ? violation_json(*report.base_violation) : Json(nullptr)},
              {"worlds", rows},
              {"exemplar_verdict", report.exemplar_verdict},
              {"any_large_verdict_hits_honest", report.any_large_verdict_hits_honest}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

std::vector<RunReport> run_sweep(const ScenarioConfig& cfg, std::uint32_t runs, Slot t_confirm,
                                 unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<RunReport> reports(runs);
  std::vector<std::future<void>> workers;
  std::atomic<std::uint32_t> next{0};
  for (unsigned w = 0; w < std::min<unsigned>(threads, runs); ++w) {
    workers.push_back(std::async(std::launch::async, [&]() {
      while (true) {
        std::uint32_t k = next.fetch_add(1);
        if (k >= runs) return;
        ScenarioConfig run_cfg = cfg;
        run_cfg.seed = cfg.seed + k;
        reports[k] = make_run_report(run_simulation(run_cfg, CaptureLevel::DigestOnly), t_confirm);
      }
    }));
  }
  for (auto& w : workers) w.get();  // propagates the first worker exception
  return reports;
}

}  // namespace finsim
