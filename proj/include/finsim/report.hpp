// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include <json.hpp>

#include "finsim/simulation.hpp"
#include "finsim/worlds.hpp"

namespace finsim {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Report of one scenario run: config echo, client snapshots, safety and
/// liveness results, verdicts, the attack timeline, and the transcript
/// digest. Re-running the config reproduces an identical digest.
struct RunReport {
  ScenarioConfig config;
  SimulationResult result;  // clients/transcript trimmed per capture level
  LivenessReport liveness;

  int exit_code() const { return result.violation.has_value() ? 2 : 0; }
};

RunReport make_run_report(SimulationResult result, Slot t_confirm);

// --- JSON encodings (canonical: fixed key order, hashes as 16-hex strings).
Json to_json(const ScenarioConfig& cfg);
ScenarioConfig config_from_json(const Json& j);

Json to_json(const Message& m);
Message message_from_json(const Json& j);

Json to_json(const RunReport& report);
Json to_json(const Evidence& ev);
Evidence evidence_from_json(const Json& j);
Json to_json(const Verdict& v);
Verdict verdict_from_json(const Json& j);
Json to_json(const WorldsReport& report);

/// Structural schema checks; throw ParseError with the offending field.
void validate_config_json(const Json& j);
void validate_run_report_json(const Json& j);
void validate_evidence_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

/// Deterministic seed sweep: runs seeds seed..seed+runs-1 of the same config
/// across worker threads and returns the reports in seed order.
std::vector<RunReport> run_sweep(const ScenarioConfig& cfg, std::uint32_t runs, Slot t_confirm,
                                 unsigned threads = 0);

}  // namespace finsim
