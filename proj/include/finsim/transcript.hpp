// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>

#include "finsim/client.hpp"
#include "finsim/message.hpp"

namespace finsim {

enum class CaptureLevel {
  DigestOnly,  // streaming digest, snapshots, invariant scans
  ClientLogs,  // + ordered client observation logs (forensics)
  Full         // + per-replica received/sent logs (record & replay)
};

struct LogEntry {
  Slot slot = 0;
  Message msg;
  bool operator==(const LogEntry&) const = default;
};

struct ReplicaLog {
  std::vector<LogEntry> received;
  std::vector<LogEntry> sent;
};

/// The complete ordered record of one execution: per-replica received and
/// sent logs, per-client observation logs, the ground-truth corruption set,
/// and the final client snapshots. Replaying any honest replica's received
/// log through its protocol code reproduces its sent log exactly.
struct Transcript {
  std::map<ReplicaIndex, ReplicaLog> replicas;
  std::map<std::uint32_t, std::vector<LogEntry>> clients;
  std::set<ReplicaIndex> corrupted;
  std::map<std::uint32_t, std::vector<ClientSnapshot>> client_snapshots;
  std::uint64_t seed = 0;
  std::uint64_t digest = 0;
};

/// Order-sensitive digest over the event stream; the canonical identity of
/// an execution, independent of what the transcript retains.
class TranscriptHasher {
 public:
  void on_send(const Message& msg, Slot slot);
  void on_delivery(const Message& msg, Slot slot);
  std::uint64_t digest() const { return fnv_.digest(); }

 private:
  void mix_message(const Message& msg, Slot slot, std::uint64_t tag);
  Fnv64 fnv_;
};

/// One-per-height and chain-consistency scan over an honest replica's
/// emitted finality signatures. Returns a diagnostic, empty when clean.
std::string scan_signature_invariants(ReplicaIndex replica,
                                      const std::vector<FinalitySignature>& sigs,
                                      const BlockStore& store);

/// Honest single-vote-per-epoch scan.
std::string scan_vote_invariant(ReplicaIndex replica, const std::vector<Vote>& votes);

}  // namespace finsim
