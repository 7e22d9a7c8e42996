// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "finsim/errors.hpp"
#include "finsim/network.hpp"

using namespace finsim;

namespace {

Message msg_from(ReplicaIndex sender, ReplicaIndex recipient, Slot send_slot, Epoch epoch = 1) {
  return {PartyId::replica(sender), PartyId::replica(recipient),
          make_payload(Vote{sender, epoch, genesis_hash()}), send_slot};
}

EventQueue queue_at(NetworkConfig cfg, Slot slot) {
  EventQueue q(cfg);
  while (q.current_slot() < slot) (void)q.advance();
  return q;
}

}  // namespace

TEST_CASE("network config invariants") {
  NetworkConfig sync{NetworkMode::Synchrony, 2, 0};
  CHECK_NOTHROW(sync.validate());
  NetworkConfig bad_sync{NetworkMode::Synchrony, 2, 5};
  CHECK_THROWS_AS(bad_sync.validate(), ConfigError);
  NetworkConfig bad_delay_free{NetworkMode::DelayFree, 1, 0};
  CHECK_THROWS_AS(bad_delay_free.validate(), ConfigError);
}

TEST_CASE("passive default delay is delta") {
  // honest broadcast at slot 3, delta = 2 -> delivered at slot 5
  EventQueue q = queue_at({NetworkMode::Synchrony, 2, 0}, 3);
  q.submit(msg_from(1, 2, 3), 5);
  (void)q.advance();  // slot 4
  CHECK(q.advance().size() == 1);  // slot 5
}

TEST_CASE("maximal adversary delay lands at max(send, gst) + delta") {
  // send at slot 5, gst = 100, delta = 2 -> bound 102
  NetworkConfig cfg{NetworkMode::PartialSynchrony, 2, 100};
  EventQueue q = queue_at(cfg, 5);
  q.submit_after_gst(msg_from(1, 2, 5));
  Slot delivered = 0;
  while (q.pending_count() > 0) {
    auto due = q.advance();
    if (!due.empty()) delivered = q.current_slot();
  }
  CHECK(delivered == 102);
}

TEST_CASE("delay-free submissions arrive in the same slot") {
  EventQueue q = queue_at({NetworkMode::DelayFree, 0, 0}, 7);
  q.submit(msg_from(1, 2, 7), 7);
  CHECK(q.take_due().size() == 1);
}

TEST_CASE("adversary_delay accepts exactly the bound and rejects beyond") {
  NetworkConfig cfg{NetworkMode::PartialSynchrony, 3, 50};
  EventQueue q = queue_at(cfg, 10);
  Message m = msg_from(1, 2, 10);
  q.submit(m, 11);
  CHECK(q.adversary_delay(m, 53));        // max(10, 50) + 3
  CHECK_FALSE(q.adversary_delay(m, 54));  // exceeds the bound

  EventQueue post = queue_at(cfg, 60);
  Message late = msg_from(1, 2, 60);
  post.submit(late, 61);
  CHECK_FALSE(post.adversary_delay(late, 64));  // exceeds send + delta post-gst
  CHECK(post.adversary_delay(late, 63));
}

TEST_CASE("submit rejects deliveries outside the bound") {
  NetworkConfig cfg{NetworkMode::PartialSynchrony, 3, 50};
  EventQueue q = queue_at(cfg, 10);
  CHECK_THROWS_AS(q.submit(msg_from(1, 2, 10), 54), ScheduleBoundError);
  CHECK_THROWS_AS(q.submit(msg_from(1, 2, 10), 9), ScheduleBoundError);
  CHECK_NOTHROW(q.submit(msg_from(1, 2, 10), 53));
}

TEST_CASE("advance returns deliveries sorted by sender") {
  EventQueue q(NetworkConfig{NetworkMode::Synchrony, 1, 0});
  CHECK(q.advance().empty());  // empty queue
  // two messages due the same slot from replicas 2 and 1 -> delivered (1, 2)
  EventQueue q2 = queue_at({NetworkMode::Synchrony, 1, 0}, 4);
  q2.submit(msg_from(2, 3, 4), 5);
  q2.submit(msg_from(1, 3, 4), 5);
  auto due = q2.advance();
  REQUIRE(due.size() == 2);
  CHECK(due[0].sender.index == 1);
  CHECK(due[1].sender.index == 2);
}

TEST_CASE("a future delivery is not released early") {
  EventQueue q = queue_at({NetworkMode::Synchrony, 2, 0}, 3);
  q.submit(msg_from(1, 2, 3), 5);
  CHECK(q.advance().empty());      // slot 4
  CHECK(q.take_due().empty());
  CHECK(q.advance().size() == 1);  // slot 5
  CHECK(q.pending_count() == 0);
}

TEST_CASE("declared gst releases held messages") {
  NetworkConfig cfg{NetworkMode::PartialSynchrony, 1, std::nullopt};
  EventQueue q(cfg);
  q.submit_after_gst(msg_from(1, 2, 0));
  (void)q.advance();  // slot 1: still held
  CHECK(q.pending_count() == 1);
  q.declare_gst(1);
  (void)q.advance();  // slot 2 = gst + delta
  CHECK(q.take_due().empty());
  CHECK(q.pending_count() == 0u);
}
