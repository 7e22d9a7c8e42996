// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "finsim/underlay.hpp"

using namespace finsim;

namespace {

constexpr ReplicaIndex kSelf = 1;

ProtocolParams majority_params() { return ProtocolParams::make(Protocol::MajoritySync, 7, 2, 1); }

Message deliver(ReplicaIndex from, Payload p, Slot slot = 0) {
  return {PartyId::replica(from), PartyId::replica(kSelf), make_payload(std::move(p)), slot};
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

// Drives a block to notarization in `u`'s view by delivering threshold votes.
void notarize(Underlay& u, const Block& b) {
  (void)u.on_message(deliver(b.proposer, Proposal{b}));
  for (ReplicaIndex v = 1; v <= u.params().notarize_threshold; ++v) {
    (void)u.on_message(deliver(v, Vote{v, b.epoch, hash_block(b)}));
  }
  REQUIRE(u.is_notarized(hash_block(b)));
}

}  // namespace

TEST_CASE("protocol params: thresholds and epoch length") {
  ProtocolParams maj = majority_params();
  CHECK(maj.notarize_threshold == 4);  // floor(7/2) + 1
  CHECK(maj.epoch_len == 2);
  ProtocolParams psync = ProtocolParams::make(Protocol::PSyncQuorum, 7, 2, 1);
  CHECK(psync.notarize_threshold == 5);  // 2f + 1
  ProtocolParams zero_delta = ProtocolParams::make(Protocol::MajoritySync, 4, 1, 0);
  CHECK(zero_delta.epoch_len == 1);  // minimum 1
}

TEST_CASE("round-robin leader rule") {
  ProtocolParams p = majority_params();
  CHECK(p.leader_of(3) == 4);  // 3 mod 7 + 1
  CHECK(p.leader_of(7) == 1);
  CHECK(p.leader_of(0) == 1);
}

TEST_CASE("leader proposes at its epoch boundary, others do not") {
  ProtocolParams params = majority_params();
  Underlay leader(2, params);  // leader of epoch 1
  Underlay bystander(3, params);
  leader.add_transaction(42, 0);

  CHECK(leader.on_slot_begin(1).empty());  // not an epoch boundary
  auto out = leader.on_slot_begin(2);      // epoch 1
  REQUIRE(out.size() == 1);
  const auto& prop = std::get<Proposal>(out[0]);
  CHECK(prop.block.epoch == 1);
  CHECK(prop.block.proposer == 2);
  CHECK(prop.block.payload == std::vector<TxId>{42});

  CHECK(bystander.on_slot_begin(2).empty());  // non-leader
  Underlay idle_leader(2, params);
  auto empty_payload = idle_leader.on_slot_begin(2);  // empty mempool is fine
  REQUIRE(empty_payload.size() == 1);
  CHECK(std::get<Proposal>(empty_payload[0]).block.payload.empty());
}

TEST_CASE("epoch 0 never proposes") {
  ProtocolParams params = majority_params();
  Underlay r1(1, params);  // leader of epoch 0 by the round-robin formula
  CHECK(r1.on_slot_begin(0).empty());
}

TEST_CASE("voting: first proposal from the leader, one vote per epoch") {
  ProtocolParams params = majority_params();
  Underlay u(kSelf, params);
  Block b = make_child(genesis_block(), 1, params);
  auto out = u.on_message(deliver(2, Proposal{b}));
  REQUIRE(out.size() == 1);
  CHECK(std::get<Vote>(out[0]).epoch == 1);
  CHECK(std::get<Vote>(out[0]).voter == kSelf);

  // an equivocating second proposal in the same epoch gets no second vote
  Block b2 = make_child(genesis_block(), 1, params, {7});
  CHECK(u.on_message(deliver(2, Proposal{b2})).empty());
  CHECK(u.voted_epochs().count(1) == 1);
}

TEST_CASE("proposals not extending a longest notarized chain get no vote") {
  ProtocolParams params = majority_params();
  Underlay u(kSelf, params);
  Block b1 = make_child(genesis_block(), 1, params);
  notarize(u, b1);
  // epoch-2 proposal extending genesis instead of the longest chain
  Block stale = make_child(genesis_block(), 2, params);
  CHECK(u.on_message(deliver(stale.proposer, Proposal{stale})).empty());
  CHECK(u.voted_epochs().count(2) == 0);
}

TEST_CASE("notarization threshold and echo") {
  ProtocolParams params = majority_params();
  Underlay u(kSelf, params);
  Block b = make_child(genesis_block(), 2, params);  // self is not the voter here
  (void)u.on_message(deliver(b.proposer, Proposal{b}));
  BlockHash h = hash_block(b);
  for (ReplicaIndex v = 2; v <= 4; ++v) {
    (void)u.on_message(deliver(v, Vote{v, 2, h}));
  }
  CHECK_FALSE(u.is_notarized(h));  // 3 distinct votes < 4
  auto out = u.on_message(deliver(5, Vote{5, 2, h}));
  CHECK(u.is_notarized(h));  // 4th distinct vote notarizes
  // echo: the vote set plus the block itself
  std::size_t votes = 0, syncs = 0;
  for (const Payload& p : out) {
    votes += std::holds_alternative<Vote>(p);
    syncs += std::holds_alternative<SyncBlocks>(p);
  }
  CHECK(votes == 4);
  CHECK(syncs == 1);
  // duplicate vote does not re-echo
  CHECK(u.on_message(deliver(5, Vote{5, 2, h})).empty());
}

TEST_CASE("confirmation: three consecutive epochs confirm the middle block") {
  ProtocolParams params = majority_params();

  SUBCASE("fresh replica confirms only genesis") {
    Underlay u(kSelf, params);
    auto chain = u.confirmed_chain();
    REQUIRE(chain.size() == 1);
    CHECK(chain[0] == genesis_block());
  }

  SUBCASE("epochs (3,4,5) confirm up to the epoch-4 block") {
    Underlay u(kSelf, params);
    Block b3 = make_child(genesis_block(), 3, params);
    Block b4 = make_child(b3, 4, params);
    Block b5 = make_child(b4, 5, params);
    notarize(u, b3);
    notarize(u, b4);
    CHECK(u.confirmed_tip() == genesis_hash());
    notarize(u, b5);
    CHECK(u.confirmed_tip() == hash_block(b4));
    CHECK(u.confirmed_chain().size() == 3);
  }

  SUBCASE("epochs (3,5,6) confirm nothing new") {
    Underlay u(kSelf, params);
    Block b3 = make_child(genesis_block(), 3, params);
    Block b5 = make_child(b3, 5, params);
    Block b6 = make_child(b5, 6, params);
    notarize(u, b3);
    notarize(u, b5);
    notarize(u, b6);
    CHECK(u.confirmed_tip() == genesis_hash());  // gap at 3 -> 5
  }
}

TEST_CASE("malformed payloads are dropped and counted") {
  ProtocolParams params = majority_params();
  Underlay u(kSelf, params);
  Block wrong_leader = make_child(genesis_block(), 1, params);
  wrong_leader.proposer = 5;  // epoch 1 belongs to replica 2
  (void)u.on_message(deliver(5, Proposal{wrong_leader}));
  CHECK(u.dropped_count() == 1);
  (void)u.on_message(deliver(9, Vote{9, 1, genesis_hash()}));  // voter out of range
  CHECK(u.dropped_count() == 2);
  Block bad_epoch = make_child(genesis_block(), 1, params);
  bad_epoch.epoch = 0;
  (void)u.on_message(deliver(2, SyncBlocks{{bad_epoch}}));
  CHECK(u.dropped_count() == 3);
}

TEST_CASE("mempool orders by input slot then tx id and drops chain duplicates") {
  ProtocolParams params = majority_params();
  Underlay u(2, params);
  u.add_transaction(30, 5);
  u.add_transaction(20, 1);
  u.add_transaction(10, 5);
  auto out = u.on_slot_begin(2);
  REQUIRE(out.size() == 1);
  CHECK(std::get<Proposal>(out[0]).block.payload == std::vector<TxId>{20, 10, 30});
}
