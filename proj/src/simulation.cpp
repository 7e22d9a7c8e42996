// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "finsim/simulation.hpp"

#include <algorithm>

#include "finsim/errors.hpp"

namespace finsim {

namespace {

/// The authenticated objects carried by a payload: (owner-tag, fingerprint).
/// Owner 0 stands for the environment.
std::vector<std::pair<ReplicaIndex, std::uint64_t>> authenticated_objects(const Payload& p) {
  std::vector<std::pair<ReplicaIndex, std::uint64_t>> out;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Proposal>) {
          out.push_back({v.block.proposer, hash_block(v.block).value});
        } else if constexpr (std::is_same_v<T, Vote>) {
          out.push_back({v.voter, payload_fingerprint(Payload{v})});
        } else if constexpr (std::is_same_v<T, FinalitySignature>) {
          out.push_back({v.signer, payload_fingerprint(Payload{v})});
        } else if constexpr (std::is_same_v<T, TransactionInput>) {
          out.push_back({0, payload_fingerprint(Payload{v})});
        } else if constexpr (std::is_same_v<T, SyncBlocks>) {
          for (const Block& b : v.blocks) out.push_back({b.proposer, hash_block(b).value});
        }
      },
      p);
  return out;
}

}  // namespace

void authorize_submit(const Message& msg, const std::set<ReplicaIndex>& corrupted,
                      std::set<std::uint64_t>& minted) {
  bool adversarial = msg.sender.is_replica() && corrupted.count(msg.sender.index) != 0;
  for (auto [owner, fp] : authenticated_objects(*msg.payload)) {
    if (minted.count(fp)) continue;  // relay of something already on the wire
    bool may_mint;
    if (owner == 0) {
      may_mint = msg.sender.kind == PartyKind::Environment;
    } else if (adversarial) {
      may_mint = corrupted.count(owner) != 0;
    } else {
      may_mint = msg.sender.is_replica() && msg.sender.index == owner;
    }
    if (!may_mint) {
      throw UnauthorizedSenderError(to_string(msg.sender) + " cannot originate an object tagged " +
                                    (owner == 0 ? std::string("env") : std::to_string(owner)));
    }
    minted.insert(fp);
  }
}

namespace {

struct Driver {
  explicit Driver(const ScenarioConfig& cfg, CaptureLevel capture)
      : cfg(cfg),
        capture(capture),
        params(cfg.params()),
        queue(cfg.network()),
        strategy(make_strategy(cfg)) {
    cfg.validate();
    for (ReplicaIndex r = 1; r <= cfg.n; ++r) {
      if (!cfg.strategy.corrupted.count(r)) {
        honest.emplace(r, HonestReplica(r, cfg.protocol, params, mix_seed(cfg.seed, r)));
      }
    }
    bool keep_client_logs = capture != CaptureLevel::DigestOnly;
    for (std::uint32_t c = 1; c <= cfg.clients; ++c) {
      clients.emplace_back(c, cfg.protocol, params, keep_client_logs);
    }
    client_inbox.resize(cfg.clients);
    schedule = cfg.tx_schedule;
    std::stable_sort(schedule.begin(), schedule.end(),
                     [](const TxScheduleEntry& a, const TxScheduleEntry& b) {
                       return std::tie(a.slot, a.tx, a.target) < std::tie(b.slot, b.tx, b.target);
                     });
  }

  SimulationResult run() {
    for (Slot s = 0; s < cfg.slots; ++s) run_slot(s);
    return finish();
  }

  void run_slot(Slot s) {
    strategy->begin_slot(s);
    std::vector<Message> due = s == 0 ? queue.take_due() : queue.advance();
    std::vector<Message> outbox;
    std::size_t processed = 0;
    const std::size_t cap = 10ull * cfg.n * cfg.n + 64;

    process_deliveries(due, s, outbox);
    processed += due.size();

    // Slot-begin handlers run once, between the first delivery batch and the
    // send phase.
    for (auto& [r, replica] : honest) {
      append_broadcasts(outbox, r, replica.on_slot_begin(s), s);
    }
    append(outbox, strategy->on_slot());
    while (next_tx < schedule.size() && schedule[next_tx].slot == s) {
      const TxScheduleEntry& e = schedule[next_tx++];
      outbox.push_back({PartyId::environment(), PartyId::replica(e.target),
                        make_payload(TransactionInput{e.tx, e.slot}), s});
    }

    // Send phase plus the intra-slot fixpoint: instant deliveries may
    // trigger further same-slot sends (delay-free semantics).
    while (true) {
      submit_all(outbox, s);
      outbox.clear();
      std::vector<Message> more = queue.take_due();
      if (more.empty()) break;
      processed += more.size();
      if (processed > cap) {
        throw std::logic_error("intra-slot message cap exceeded at slot " + std::to_string(s));
      }
      process_deliveries(more, s, outbox);
    }

    // Clients observe their slot batch in canonical order, then confirm.
    for (std::uint32_t c = 0; c < cfg.clients; ++c) {
      canonical_sort(client_inbox[c]);
      for (const Message& m : client_inbox[c]) {
        hasher.on_delivery(m, s);
        if (capture != CaptureLevel::DigestOnly) {
          transcript.clients[c + 1].push_back({s, m});
        }
        clients[c].observe(m, s);
      }
      client_inbox[c].clear();
      clients[c].end_slot(s);
    }

    strategy->post_slot();
    if (cfg.gst.kind == GstSpec::Kind::OnAttackSuccess && strategy->attack_succeeded() &&
        !gst_declared) {
      gst_declared = true;
      queue.declare_gst(*strategy->success_slot());
      timeline.push_back({*strategy->success_slot(), "gst_declared"});
    }
    if (strategy->attack_succeeded() && !success_logged) {
      success_logged = true;
      timeline.push_back({*strategy->success_slot(), "attack_success"});
    }
  }

  void process_deliveries(const std::vector<Message>& batch, Slot s,
                          std::vector<Message>& outbox) {
    for (const Message& m : batch) {
      if (m.recipient.is_client()) {
        client_inbox[m.recipient.index - 1].push_back(m);
        continue;  // hashed at the client flush, in observation order
      }
      hasher.on_delivery(m, s);
      ReplicaIndex r = m.recipient.index;
      if (capture == CaptureLevel::Full) transcript.replicas[r].received.push_back({s, m});
      auto it = honest.find(r);
      if (it != honest.end()) {
        append_broadcasts(outbox, r, it->second.on_message(m), s);
      } else {
        append(outbox, strategy->on_deliver(m));
      }
    }
  }

  /// Expands an honest replica's payloads into broadcast messages. Clients
  /// observe each replica's first-hand protocol messages; relayed traffic
  /// (vote echoes, block sync) is replica-to-replica gossip only.
  void append_broadcasts(std::vector<Message>& outbox, ReplicaIndex sender,
                         std::vector<Payload> payloads, Slot s) {
    for (Payload& p : payloads) {
      bool first_hand = payload_author(p) == sender;
      PayloadPtr ptr = make_payload(std::move(p));
      for (ReplicaIndex r = 1; r <= cfg.n; ++r) {
        if (r != sender) outbox.push_back({PartyId::replica(sender), PartyId::replica(r), ptr, s});
      }
      if (!first_hand) continue;
      for (std::uint32_t c = 1; c <= cfg.clients; ++c) {
        outbox.push_back({PartyId::replica(sender), PartyId::client(c), ptr, s});
      }
    }
  }

  static void append(std::vector<Message>& out, std::vector<Message> more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()),
               std::make_move_iterator(more.end()));
  }

  void submit_all(const std::vector<Message>& outbox, Slot s) {
    for (const Message& m : outbox) {
      authorize_submit(m, cfg.strategy.corrupted, minted);
      strategy->observe_submit(m);
      record_send(m, s);
      std::optional<Slot> delivery = strategy->choose_delivery(m);
      if (delivery.has_value()) {
        queue.submit(m, *delivery);
      } else {
        queue.submit_after_gst(m);
      }
    }
  }

  void record_send(const Message& m, Slot s) {
    hasher.on_send(m, s);
    if (m.sender.is_replica()) {
      if (capture == CaptureLevel::Full) transcript.replicas[m.sender.index].sent.push_back({s, m});
      if (const auto* sig = std::get_if<FinalitySignature>(m.payload.get())) {
        if (!cfg.strategy.corrupted.count(m.sender.index) && sig->signer == m.sender.index) {
          auto& sigs = honest_signatures[m.sender.index];
          if (sigs.empty() || !(sigs.back() == *sig)) sigs.push_back(*sig);
        }
      }
      if (const auto* vote = std::get_if<Vote>(m.payload.get())) {
        if (!cfg.strategy.corrupted.count(m.sender.index) && vote->voter == m.sender.index) {
          auto& votes = honest_votes[m.sender.index];
          if (votes.empty() || !(votes.back() == *vote)) votes.push_back(*vote);
        }
      }
    }
  }

  SimulationResult finish() {
    SimulationResult result;
    result.config = cfg;
    result.timeline = std::move(timeline);
    result.attack_success_slot = strategy->success_slot();
    result.resolved_gst = queue.config().gst;
    result.undelivered = queue.pending_count();
    result.digest = hasher.digest();

    for (ReplicaIndex r = 1; r <= cfg.n; ++r) {
      ReplicaSummary summary;
      summary.id = r;
      summary.corrupted = cfg.strategy.corrupted.count(r) != 0;
      auto it = honest.find(r);
      if (it != honest.end()) {
        summary.confirmed_tip = it->second.underlay().confirmed_tip();
        for (const Block& b : it->second.underlay().confirmed_chain()) {
          summary.confirmed_chain.push_back(hash_block(b));
        }
        summary.signed_view = it->second.gadget().signed_view();
      }
      result.replicas.push_back(std::move(summary));
    }

    // Invariant scans over every honest replica's emitted messages.
    for (const auto& [r, sigs] : honest_signatures) {
      std::string problem =
          scan_signature_invariants(r, sigs, honest.at(r).underlay().store());
      if (!problem.empty()) result.invariants.problems.push_back(problem);
    }
    for (const auto& [r, votes] : honest_votes) {
      std::string problem = scan_vote_invariant(r, votes);
      if (!problem.empty()) result.invariants.problems.push_back(problem);
    }
    result.honest_signatures = std::move(honest_signatures);

    result.violation = safety_check(clients);
    if (result.violation && cfg.protocol == Protocol::SyncFin &&
        capture != CaptureLevel::DigestOnly) {
      const ClientView* a = nullptr;
      const ClientView* b = nullptr;
      for (const ClientView& v : clients) {
        if (v.id() == result.violation->client_a) a = &v;
        if (v.id() == result.violation->client_b) b = &v;
      }
      if (a && b) {
        if (auto evidence = extract_evidence(*a, *b)) {
          result.verdict = forensic(*evidence, params);
        }
      }
    }

    transcript.seed = cfg.seed;
    transcript.corrupted = cfg.strategy.corrupted;
    transcript.digest = result.digest;
    for (const ClientView& v : clients) {
      transcript.client_snapshots[v.id()] = v.snapshots();
    }
    result.transcript = std::move(transcript);
    result.clients = std::move(clients);
    return result;
  }

  ScenarioConfig cfg;
  CaptureLevel capture;
  ProtocolParams params;
  EventQueue queue;
  std::unique_ptr<Strategy> strategy;
  std::map<ReplicaIndex, HonestReplica> honest;
  std::vector<ClientView> clients;
  std::vector<std::vector<Message>> client_inbox;
  std::vector<TxScheduleEntry> schedule;
  std::size_t next_tx = 0;
  std::set<std::uint64_t> minted;
  TranscriptHasher hasher;
  Transcript transcript;
  std::vector<TimelineEvent> timeline;
  std::map<ReplicaIndex, std::vector<FinalitySignature>> honest_signatures;
  std::map<ReplicaIndex, std::vector<Vote>> honest_votes;
  bool gst_declared = false;
  bool success_logged = false;
};

}  // namespace

SimulationResult run_simulation(const ScenarioConfig& cfg, CaptureLevel capture) {
  cfg.validate();
  Driver driver(cfg, capture);
  return driver.run();
}

}  // namespace finsim
