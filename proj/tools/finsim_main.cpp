// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
//
// finsim: deterministic consensus simulator.
//
// Subcommands:
//   run       simulate one scenario (or a seed sweep) and write run reports
//   classify  run the fixed scenario battery and emit the protocol matrix
//   forensic  run the forensic algorithm on an evidence file
//   worlds    record the base execution and replay the delay-free worlds
//
// Exit codes: 0 clean, 2 violation detected (or verdict below f+1),
// 3 config/parse error, 4 attack failed / insufficient evidence.

#include <CLI11.hpp>
#include <iostream>

#include "finsim/classify.hpp"
#include "finsim/errors.hpp"
#include "finsim/report.hpp"

namespace {

using namespace finsim;

constexpr Slot kReportTconfirm = 20;  // 10 epochs at delta = 1

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out_dir, std::uint32_t runs) {
  ScenarioConfig cfg = config_from_json(read_json_file(config_path));
  if (seed) cfg.seed = *seed;
  cfg.validate();
  std::filesystem::create_directories(out_dir);

  std::vector<RunReport> reports;
  if (runs <= 1) {
    reports.push_back(make_run_report(
        run_simulation(cfg, cfg.protocol == Protocol::SyncFin ? CaptureLevel::ClientLogs
                                                              : CaptureLevel::DigestOnly),
        kReportTconfirm));
  } else {
    reports = run_sweep(cfg, runs, kReportTconfirm);
  }

  int exit_code = 0;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    Json j = to_json(reports[k]);
    validate_run_report_json(j);
    std::filesystem::path path =
        std::filesystem::path(out_dir) /
        ("report_seed" + std::to_string(reports[k].config.seed) + ".json");
    write_json_file(path, j);
    const SimulationResult& r = reports[k].result;
    std::cout << "seed " << reports[k].config.seed << ": "
              << (r.violation ? "VIOLATION" : "clean") << ", digest "
              << to_hex(BlockHash{r.digest}) << ", flagged_tx "
              << reports[k].liveness.flagged_count << " -> " << path.string() << "\n";
    exit_code = std::max(exit_code, reports[k].exit_code());
    if (r.verdict && k == 0) {
      write_json_file(std::filesystem::path(out_dir) / "verdict.json", to_json(*r.verdict));
    }
    if (r.violation && r.config.protocol == Protocol::SyncFin && k == 0 &&
        !r.clients.empty()) {
      const ClientView* a = nullptr;
      const ClientView* b = nullptr;
      for (const ClientView& v : r.clients) {
        if (v.id() == r.violation->client_a) a = &v;
        if (v.id() == r.violation->client_b) b = &v;
      }
      if (a && b) {
        if (auto ev = extract_evidence(*a, *b)) {
          write_json_file(std::filesystem::path(out_dir) / "evidence.json", to_json(*ev));
        }
      }
    }
  }
  return exit_code;
}

int cmd_classify(std::uint64_t seed, std::uint32_t seeds_per_cell, const std::string& out_dir) {
  ClassificationMatrix matrix = classify(seed, seeds_per_cell);
  std::filesystem::create_directories(out_dir);
  write_json_file(std::filesystem::path(out_dir) / "classification.json", to_json(matrix));
  for (const ProtocolClassification& row : matrix.rows) {
    std::cout << row.protocol << (row.reference_only ? " (reference)" : "")
              << ": synch_safe=" << row.synch_safe << " synch_live=" << row.synch_live
              << " final=" << row.final_ << " accountable_safe=" << row.accountable_safe
              << " live_after_gst=" << row.live_after_gst << "\n";
  }
  ClassificationMatrix expected = expected_classification();
  for (const ProtocolClassification& want : expected.rows) {
    for (const ProtocolClassification& got : matrix.rows) {
      if (got.protocol == want.protocol && !(got == want)) {
        std::cout << "unexpected classification for " << got.protocol << "\n";
        return 2;
      }
    }
  }
  return 0;
}

int cmd_forensic(const std::string& evidence_path, const std::string& out_path) {
  Evidence ev = evidence_from_json(read_json_file(evidence_path));
  if (is_prefix(ev.ledger_a, ev.ledger_b) || is_prefix(ev.ledger_b, ev.ledger_a)) {
    throw ParseError("no conflict: the evidence ledgers are prefix-consistent");
  }
  Verdict verdict = forensic(ev, ev.params);
  write_json_file(out_path, to_json(verdict));
  std::cout << "accused " << verdict.accused.size() << " replica(s):";
  for (ReplicaIndex r : verdict.accused) std::cout << " " << r;
  std::cout << " -> " << out_path << "\n";
  bool enough = verdict.accused.size() >= static_cast<std::size_t>(ev.params.f + 1);
  return enough ? 0 : 2;
}

int cmd_worlds(const std::string& config_path, std::optional<std::uint64_t> seed,
               std::optional<std::uint64_t> replay_seed, const std::string& out_path) {
  ScenarioConfig cfg =
      config_path.empty() ? worlds_reference_scenario(seed.value_or(1))
                          : config_from_json(read_json_file(config_path));
  if (seed) cfg.seed = *seed;
  cfg.validate();
  if (replay_seed && *replay_seed != cfg.seed) {
    // Deliberately mismatched replay: surfaces the divergence error path.
    Transcript base = record_world0(cfg);
    ScenarioConfig perturbed = cfg;
    perturbed.seed = *replay_seed;
    ReplicaIndex honest = 1;
    while (base.corrupted.count(honest)) ++honest;
    replay_world({&base, honest}, perturbed);  // throws DivergenceError
    return 0;
  }
  WorldsReport report = run_worlds(cfg);
  write_json_file(out_path, to_json(report));
  bool all_ok = true;
  for (const WorldRow& row : report.rows) {
    std::cout << "world " << row.honest << ": honest=r" << row.honest
              << " indistinguishable=" << (row.indistinguishable ? "true" : "false")
              << " violation=" << (row.violation ? "true" : "false") << "\n";
    all_ok = all_ok && row.indistinguishable && row.violation;
  }
  std::cout << (all_ok ? "all worlds indistinguishable" : "worlds disagree") << " -> " << out_path
            << "\n";
  return all_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finsim: deterministic consensus simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string evidence_path;
  std::string out_dir = "out";
  std::string out_path;
  std::uint32_t runs = 1;
  std::uint32_t seeds_per_cell = 3;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replay_seed;

  CLI::App* run = app.add_subcommand("run", "simulate one scenario");
  run->add_option("--config", config_path, "scenario config JSON")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--runs", runs, "seed sweep length");

  CLI::App* cls = app.add_subcommand("classify", "run the protocol classification battery");
  cls->add_option("--seed", seed, "base seed");
  cls->add_option("--seeds-per-cell", seeds_per_cell, "seeds per battery cell");
  cls->add_option("--out", out_dir, "output directory");

  CLI::App* forensic_cmd = app.add_subcommand("forensic", "run the forensic algorithm");
  forensic_cmd->add_option("--evidence", evidence_path, "evidence JSON file")->required();
  forensic_cmd->add_option("--out", out_path, "verdict output path")
      ->default_val("verdict.json");

  CLI::App* worlds_cmd = app.add_subcommand("worlds", "record and replay the proof worlds");
  worlds_cmd->add_option("--config", config_path, "world-0 scenario config (default: reference)");
  worlds_cmd->add_option("--seed", seed, "override the config seed");
  worlds_cmd->add_option("--replay-seed", replay_seed,
                         "replay under a different seed (divergence check)");
  worlds_cmd->add_option("--out", out_path, "report output path")
      ->default_val("worlds.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, seed, out_dir, runs);
    if (cls->parsed()) return cmd_classify(seed.value_or(1), seeds_per_cell, out_dir);
    if (forensic_cmd->parsed()) return cmd_forensic(evidence_path, out_path);
    if (worlds_cmd->parsed()) return cmd_worlds(config_path, seed, replay_seed, out_path);
  } catch (const finsim::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const finsim::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const finsim::AttackFailedError& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const finsim::InsufficientEvidenceError& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const finsim::DivergenceError& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
