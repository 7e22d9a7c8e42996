// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "finsim/client.hpp"

using namespace finsim;

namespace {

ProtocolParams params7() { return ProtocolParams::make(Protocol::SyncFin, 7, 2, 1); }

Message from_replica(ReplicaIndex r, Payload p, Slot slot = 0) {
  return {PartyId::replica(r), PartyId::client(1), make_payload(std::move(p)), slot};
}

Block make_child(const Block& parent, Epoch epoch, const ProtocolParams& params,
                 std::vector<TxId> payload = {}) {
  Block b;
  b.parent = hash_block(parent);
  b.height = parent.height + 1;
  b.epoch = epoch;
  b.proposer = params.leader_of(epoch);
  b.payload = std::move(payload);
  return b;
}

void sign_by(ClientView& view, const Block& b, std::initializer_list<ReplicaIndex> signers,
             Slot slot = 0) {
  for (ReplicaIndex r : signers) {
    view.observe(from_replica(r, FinalitySignature{r, b.height, hash_block(b)}, slot), slot);
  }
}

void quorum_genesis(ClientView& view) {
  for (ReplicaIndex r = 1; r <= 5; ++r) {
    view.observe(from_replica(r, FinalitySignature{r, 0, genesis_hash()}), 0);
  }
}

}  // namespace

TEST_CASE("observe: blocks, signatures, duplicates, buffering") {
  ClientView view(1, Protocol::SyncFin, params7());
  Block b1 = make_child(genesis_block(), 1, params7(), {5});

  // block then signature
  view.observe(from_replica(2, Proposal{b1}), 0);
  view.observe(from_replica(3, FinalitySignature{3, 1, hash_block(b1)}), 0);
  CHECK(view.signatures().at(hash_block(b1)).size() == 1);

  // duplicate signature from the same signer leaves the set unchanged
  view.observe(from_replica(3, FinalitySignature{3, 1, hash_block(b1)}), 0);
  CHECK(view.signatures().at(hash_block(b1)).size() == 1);

  // signature for an unknown block is buffered by hash and counted now
  Block b2 = make_child(b1, 2, params7());
  view.observe(from_replica(3, FinalitySignature{3, 2, hash_block(b2)}), 1);
  CHECK(view.signatures().count(hash_block(b2)) == 1);
  view.observe(from_replica(2, Proposal{b2}), 1);
  CHECK(view.store().contains(hash_block(b2)));
}

TEST_CASE("confirm: quorum on the block and its whole prefix") {
  ProtocolParams params = params7();
  ClientView view(1, Protocol::SyncFin, params);
  quorum_genesis(view);
  Block b1 = make_child(genesis_block(), 1, params, {5});
  view.observe(from_replica(2, Proposal{b1}), 0);

  // four signers are not a quorum (2f+1 = 5)
  sign_by(view, b1, {1, 2, 3, 4});
  view.end_slot(0);
  CHECK(view.ledger().empty());

  // the fifth signer confirms the block (prefix = genesis already certified)
  sign_by(view, b1, {5});
  view.end_slot(1);
  CHECK(view.ledger() == Ledger{5});
  CHECK(view.tip() == hash_block(b1));

  // a taller block without a certified prefix does not confirm
  Block b2 = make_child(b1, 2, params, {6});
  Block b3 = make_child(b2, 3, params, {7});
  view.observe(from_replica(2, Proposal{b2}), 2);
  view.observe(from_replica(2, Proposal{b3}), 2);
  sign_by(view, b3, {1, 2, 3, 4, 5});
  view.end_slot(2);
  CHECK(view.ledger() == Ledger{5});  // hole at height 2
  sign_by(view, b2, {1, 2, 3, 4, 5});
  view.end_slot(3);
  CHECK(view.ledger() == Ledger{5, 6, 7});
}

TEST_CASE("two conflicting certified tips: first observed wins, flag raised") {
  ProtocolParams params = params7();
  ClientView view(1, Protocol::SyncFin, params);
  quorum_genesis(view);
  Block x = make_child(genesis_block(), 1, params, {1});
  Block y = make_child(genesis_block(), 2, params, {2});
  view.observe(from_replica(2, Proposal{x}), 0);
  view.observe(from_replica(3, Proposal{y}), 0);
  sign_by(view, x, {1, 2, 3, 4, 5});
  view.end_slot(0);
  CHECK(view.ledger() == Ledger{1});
  CHECK_FALSE(view.inconsistent());

  sign_by(view, y, {3, 4, 5, 6, 7}, 1);
  view.end_slot(1);
  CHECK(view.ledger() == Ledger{1});  // first observed kept
  CHECK_FALSE(view.inconsistent());   // same height: the tip never moved

  // a taller conflicting quorum chain forces the monotonicity guard
  Block y2 = make_child(y, 3, params, {3});
  view.observe(from_replica(4, Proposal{y2}), 2);
  sign_by(view, y2, {3, 4, 5, 6, 7}, 2);
  view.end_slot(2);
  CHECK(view.ledger() == Ledger{1});  // kept
  CHECK(view.inconsistent());         // and flagged
}

TEST_CASE("signatures naming the wrong height do not certify") {
  ProtocolParams params = params7();
  ClientView view(1, Protocol::SyncFin, params);
  quorum_genesis(view);
  Block b1 = make_child(genesis_block(), 1, params, {5});
  view.observe(from_replica(2, Proposal{b1}), 0);
  for (ReplicaIndex r = 1; r <= 5; ++r) {
    view.observe(from_replica(r, FinalitySignature{r, 4, hash_block(b1)}), 0);
  }
  view.end_slot(0);
  CHECK(view.ledger().empty());
}

TEST_CASE("underlay-mode client confirms from its own vote view") {
  ProtocolParams params = ProtocolParams::make(Protocol::MajoritySync, 7, 2, 1);
  ClientView view(1, Protocol::MajoritySync, params);
  Block b1 = make_child(genesis_block(), 1, params, {11});
  Block b2 = make_child(b1, 2, params, {12});
  Block b3 = make_child(b2, 3, params, {13});
  for (const Block* b : {&b1, &b2, &b3}) {
    view.observe(from_replica(b->proposer, Proposal{*b}), 0);
    for (ReplicaIndex v = 1; v <= 4; ++v) {
      view.observe(from_replica(v, Vote{v, b->epoch, hash_block(*b)}), 0);
    }
  }
  view.end_slot(0);
  CHECK(view.ledger() == Ledger{11, 12});  // up to the second of the triple
}

TEST_CASE("safety_check over snapshots") {
  ProtocolParams params = params7();

  SUBCASE("single client, single snapshot: no violation") {
    ClientView view(1, Protocol::SyncFin, params);
    view.end_slot(0);
    CHECK_FALSE(safety_check(std::vector<const ClientView*>{&view}).has_value());
  }

  SUBCASE("conflicting ledgers across clients are a witness") {
    ClientView a(1, Protocol::SyncFin, params);
    ClientView b(2, Protocol::SyncFin, params);
    quorum_genesis(a);
    quorum_genesis(b);
    Block x = make_child(genesis_block(), 1, params, {1});
    Block y = make_child(genesis_block(), 2, params, {2});
    a.observe(from_replica(2, Proposal{x}), 0);
    b.observe(from_replica(3, Proposal{y}), 0);
    sign_by(a, x, {1, 2, 3, 4, 5});
    sign_by(b, y, {3, 4, 5, 6, 7});
    a.end_slot(0);
    b.end_slot(0);
    auto violation = safety_check(std::vector<const ClientView*>{&a, &b});
    REQUIRE(violation.has_value());
    CHECK(violation->ledger_a == Ledger{1});
    CHECK(violation->ledger_b == Ledger{2});
    CHECK(violation->tip_a == hash_block(x));
    CHECK(violation->tip_b == hash_block(y));
  }

  SUBCASE("prefix-related ledgers are not a violation") {
    ClientView a(1, Protocol::SyncFin, params);
    ClientView b(2, Protocol::SyncFin, params);
    quorum_genesis(a);
    quorum_genesis(b);
    Block x = make_child(genesis_block(), 1, params, {1});
    Block x2 = make_child(x, 2, params, {2});
    for (ClientView* v : {&a, &b}) {
      v->observe(from_replica(2, Proposal{x}), 0);
      sign_by(*v, x, {1, 2, 3, 4, 5});
    }
    b.observe(from_replica(3, Proposal{x2}), 0);
    sign_by(b, x2, {1, 2, 3, 4, 5});
    a.end_slot(0);
    b.end_slot(0);
    CHECK_FALSE(safety_check(std::vector<const ClientView*>{&a, &b}).has_value());
  }
}

TEST_CASE("liveness report flags transactions missing their deadline") {
  ProtocolParams params = params7();
  ClientView view(1, Protocol::SyncFin, params);
  quorum_genesis(view);
  Block b1 = make_child(genesis_block(), 1, params, {100});
  view.observe(from_replica(2, Proposal{b1}), 6);
  sign_by(view, b1, {1, 2, 3, 4, 5}, 6);
  view.end_slot(6);
  std::vector<ClientView> views;
  views.push_back(std::move(view));

  SUBCASE("on-time inclusion") {
    auto report = liveness_report(views, {{0, 100, 1}}, {}, Slot{0}, 10);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].included_slot == Slot{6});
    CHECK_FALSE(report.rows[0].flagged);
    CHECK(report.max_latency == Slot{6});
  }

  SUBCASE("missing and late transactions are flagged") {
    auto report = liveness_report(views, {{0, 100, 1}, {0, 999, 1}}, {}, Slot{0}, 3);
    CHECK(report.flagged_count == 2);  // 100 late (6 > 3), 999 never included
  }

  SUBCASE("transactions to corrupted replicas are excluded") {
    auto report = liveness_report(views, {{0, 999, 6}}, {6}, Slot{0}, 3);
    CHECK(report.rows.empty());
  }

  SUBCASE("empty schedule gives an empty report") {
    auto report = liveness_report(views, {}, {}, Slot{0}, 10);
    CHECK(report.rows.empty());
    CHECK(report.flagged_count == 0);
  }
}
