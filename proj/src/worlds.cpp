// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "finsim/worlds.hpp"

#include <algorithm>

#include "finsim/errors.hpp"

namespace finsim {

namespace {

std::optional<SafetyViolation> violation_from_snapshots(
    const std::map<std::uint32_t, std::vector<ClientSnapshot>>& snapshots) {
  for (auto a = snapshots.begin(); a != snapshots.end(); ++a) {
    for (auto b = a; b != snapshots.end(); ++b) {
      for (const ClientSnapshot& x : a->second) {
        for (const ClientSnapshot& y : b->second) {
          if (!is_prefix(x.ledger, y.ledger) && !is_prefix(y.ledger, x.ledger)) {
            SafetyViolation v;
            v.client_a = a->first;
            v.client_b = b->first;
            v.slot_a = x.slot;
            v.slot_b = y.slot;
            v.ledger_a = x.ledger;
            v.ledger_b = y.ledger;
            v.tip_a = x.tip;
            v.tip_b = y.tip;
            return v;
          }
        }
      }
    }
  }
  return std::nullopt;
}

void check_world0_preconditions(const ScenarioConfig& cfg) {
  if (cfg.protocol == Protocol::SyncFin) {
    throw ConfigError(
        "worlds: precondition unmet: the recorded protocol must be a bare non-final underlay");
  }
  if (cfg.strategy.kind == StrategyKind::Passive ||
      cfg.strategy.kind == StrategyKind::CrashSilent ||
      cfg.strategy.kind == StrategyKind::RandomDelay) {
    throw ConfigError("worlds: precondition unmet: the " + to_string(cfg.strategy.kind) +
                      " strategy cannot produce a client-level conflict");
  }
  if (cfg.f == 0) throw ConfigError("worlds: f = 0 leaves no adversary to emulate");
}

}  // namespace

Transcript record_world0(const ScenarioConfig& cfg) {
  check_world0_preconditions(cfg);
  SimulationResult result = run_simulation(cfg, CaptureLevel::Full);
  if (!result.violation.has_value()) {
    throw AttackFailedError("world 0 run produced no safety violation");
  }
  return std::move(result.transcript);
}

Transcript replay_world(const WorldSpec& spec, const ScenarioConfig& cfg) {
  if (!spec.base) throw std::logic_error("replay_world: missing base transcript");
  const Transcript& base = *spec.base;
  if (cfg.seed != base.seed) {
    throw DivergenceError("replay scenario seed " + std::to_string(cfg.seed) +
                          " differs from the recorded world-0 seed " + std::to_string(base.seed));
  }
  ReplicaIndex i = spec.honest_index;
  if (i < 1 || i > cfg.n || base.corrupted.count(i)) {
    throw ConfigError("replay_world: honest_index must be a replica honest in world 0");
  }

  // Release schedule: every recorded delivery to replica i and to the
  // clients is re-sent by its original sender so that it lands, under
  // instant delivery, exactly at its recorded slot. Messages from i itself
  // are regenerated live by the real protocol code.
  std::map<Slot, std::vector<Message>> releases;
  auto base_log = base.replicas.find(i);
  if (base_log != base.replicas.end()) {
    for (const LogEntry& e : base_log->second.received) releases[e.slot].push_back(e.msg);
  }
  for (const auto& [client, log] : base.clients) {
    (void)client;
    for (const LogEntry& e : log) {
      if (!(e.msg.sender == PartyId::replica(i))) releases[e.slot].push_back(e.msg);
    }
  }

  // The honest replica is constructed exactly as in world 0, with its
  // world-0 per-replica seed.
  ProtocolParams params = cfg.params();
  HonestReplica replica(i, cfg.protocol, params, mix_seed(cfg.seed, i));
  std::vector<ClientView> clients;
  for (std::uint32_t c = 1; c <= cfg.clients; ++c) {
    clients.emplace_back(c, cfg.protocol, params, /*keep_log=*/true);
  }

  Transcript out;
  out.seed = cfg.seed;
  for (ReplicaIndex r = 1; r <= cfg.n; ++r) {
    if (r != i) out.corrupted.insert(r);
  }
  TranscriptHasher hasher;

  // Recorded sent log of i, grouped by slot, for the divergence check.
  std::map<Slot, std::vector<Message>> expected_sent;
  if (base_log != base.replicas.end()) {
    for (const LogEntry& e : base_log->second.sent) expected_sent[e.slot].push_back(e.msg);
  }

  for (Slot s = 0; s < cfg.slots; ++s) {
    std::vector<std::vector<Message>> client_inbox(cfg.clients);
    std::vector<Message> to_honest;
    auto rel = releases.find(s);
    if (rel != releases.end()) {
      for (const Message& m : rel->second) {
        hasher.on_send(m, s);
        if (m.sender.is_replica()) out.replicas[m.sender.index].sent.push_back({s, m});
        if (m.recipient.is_client()) {
          client_inbox[m.recipient.index - 1].push_back(m);
        } else {
          to_honest.push_back(m);
        }
      }
    }
    canonical_sort(to_honest);

    std::vector<Payload> emissions;
    for (const Message& m : to_honest) {
      hasher.on_delivery(m, s);
      out.replicas[i].received.push_back({s, m});
      auto more = replica.on_message(m);
      emissions.insert(emissions.end(), std::make_move_iterator(more.begin()),
                       std::make_move_iterator(more.end()));
    }
    {
      auto more = replica.on_slot_begin(s);
      emissions.insert(emissions.end(), std::make_move_iterator(more.begin()),
                       std::make_move_iterator(more.end()));
    }

    // Expand i's emissions to broadcast messages and verify them against the
    // recorded sent log before instant delivery.
    std::vector<Message> live;
    for (Payload& p : emissions) {
      PayloadPtr ptr = make_payload(std::move(p));
      for (ReplicaIndex r = 1; r <= cfg.n; ++r) {
        if (r != i) live.push_back({PartyId::replica(i), PartyId::replica(r), ptr, s});
      }
      for (std::uint32_t c = 1; c <= cfg.clients; ++c) {
        live.push_back({PartyId::replica(i), PartyId::client(c), ptr, s});
      }
    }
    std::vector<Message> expected = expected_sent.count(s) ? expected_sent[s] : std::vector<Message>{};
    canonical_sort(live);
    canonical_sort(expected);
    if (live.size() != expected.size() ||
        !std::equal(live.begin(), live.end(), expected.begin())) {
      throw DivergenceError("replica " + std::to_string(i) + " diverged from world 0 at slot " +
                            std::to_string(s));
    }
    for (const Message& m : live) {
      hasher.on_send(m, s);
      out.replicas[i].sent.push_back({s, m});
      if (m.recipient.is_client()) {
        client_inbox[m.recipient.index - 1].push_back(m);
      } else {
        // Instant delivery to a replay adversary; it reacts per script only.
        hasher.on_delivery(m, s);
        out.replicas[m.recipient.index].received.push_back({s, m});
      }
    }

    for (std::uint32_t c = 0; c < cfg.clients; ++c) {
      canonical_sort(client_inbox[c]);
      for (const Message& m : client_inbox[c]) {
        hasher.on_delivery(m, s);
        out.clients[c + 1].push_back({s, m});
        clients[c].observe(m, s);
      }
      clients[c].end_slot(s);
    }
  }

  for (const ClientView& v : clients) out.client_snapshots[v.id()] = v.snapshots();
  out.digest = hasher.digest();
  return out;
}

bool check_indistinguishable(const Transcript& t0, const Transcript& ti, ReplicaIndex i) {
  auto a = t0.replicas.find(i);
  auto b = ti.replicas.find(i);
  static const ReplicaLog empty_log;
  const ReplicaLog& la = a == t0.replicas.end() ? empty_log : a->second;
  const ReplicaLog& lb = b == ti.replicas.end() ? empty_log : b->second;
  if (!(la.received == lb.received) || !(la.sent == lb.sent)) return false;
  return t0.clients == ti.clients;
}

WorldsReport run_worlds(const ScenarioConfig& cfg) {
  cfg.validate();
  check_world0_preconditions(cfg);

  WorldsReport report;
  Transcript base = record_world0(cfg);
  report.base_digest = base.digest;
  report.base_violation = violation_from_snapshots(base.client_snapshots);

  // A verdict computable from the clients' (identical) observations: scan
  // the union of their logs for vote equivocations.
  std::map<std::pair<ReplicaIndex, Epoch>, std::set<BlockHash>> votes;
  for (const auto& [client, log] : base.clients) {
    (void)client;
    for (const LogEntry& e : log) {
      if (const auto* v = std::get_if<Vote>(e.msg.payload.get())) {
        votes[{v->voter, v->epoch}].insert(v->block);
      }
    }
  }
  for (const auto& [key, blocks] : votes) {
    if (blocks.size() >= 2) report.exemplar_verdict.insert(key.first);
  }

  std::vector<ReplicaIndex> honest;
  for (ReplicaIndex r = 1; r <= cfg.n; ++r) {
    if (!base.corrupted.count(r)) honest.push_back(r);
  }

  for (ReplicaIndex i : honest) {
    WorldRow row;
    row.honest = i;
    Transcript ti = replay_world({&base, i}, cfg);
    row.corrupted = ti.corrupted;
    row.indistinguishable = check_indistinguishable(base, ti, i);
    row.violation = violation_from_snapshots(ti.client_snapshots).has_value();
    if (report.exemplar_verdict.count(i)) row.exemplar_overlap.insert(i);
    report.rows.push_back(std::move(row));
  }

  // Pigeonhole over verdict sets: every (f+1)-subset of [n] intersects the
  // honest set of some world (|honest| = n-f, so it intersects every
  // (f+1)-subset). Checked exhaustively.
  report.any_large_verdict_hits_honest = true;
  std::vector<ReplicaIndex> all(cfg.n);
  for (ReplicaIndex r = 1; r <= cfg.n; ++r) all[r - 1] = r;
  std::vector<bool> pick(cfg.n, false);
  std::fill(pick.begin(), pick.begin() + cfg.f + 1, true);
  do {
    bool hits_honest = false;
    for (std::uint32_t k = 0; k < cfg.n; ++k) {
      if (pick[k] && !base.corrupted.count(all[k])) hits_honest = true;
    }
    if (!hits_honest) report.any_large_verdict_hits_honest = false;
  } while (std::prev_permutation(pick.begin(), pick.end()));

  return report;
}

ScenarioConfig worlds_reference_scenario(std::uint64_t seed) {
  ScenarioConfig cfg = make_scenario(Protocol::MajoritySync, StrategyKind::SplitBrain, seed);
  cfg.slots = 40;
  cfg.strategy.slot_budget = 36;
  // World-i indexing follows the convention that the last f replicas are the
  // world-0 adversary.
  std::uint32_t n = cfg.n;
  cfg.strategy.corrupted = {6, 7};
  cfg.strategy.active = 6;
  cfg.strategy.partition_a = {1, 2, 3};
  cfg.strategy.partition_b = {4, 5};
  (void)n;
  ScenarioConfig base = cfg;
  base.tx_schedule.clear();
  std::uint32_t k = 0;
  for (Slot s = 0; s < 20; s += 2) {
    base.tx_schedule.push_back({s, 500 + (seed % 997) * 100 + k, static_cast<ReplicaIndex>(k % 5 + 1)});
    ++k;
  }
  return base;
}

}  // namespace finsim
