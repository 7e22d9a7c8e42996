// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "finsim/types.hpp"

namespace finsim {

enum class PartyKind : std::uint8_t { Replica = 0, Client = 1, Environment = 2 };

struct PartyId {
  PartyKind kind = PartyKind::Environment;
  std::uint32_t index = 0;  // replica/client index; 0 for the environment

  static PartyId replica(ReplicaIndex i) { return {PartyKind::Replica, i}; }
  static PartyId client(std::uint32_t i) { return {PartyKind::Client, i}; }
  static PartyId environment() { return {PartyKind::Environment, 0}; }

  bool is_replica() const { return kind == PartyKind::Replica; }
  bool is_client() const { return kind == PartyKind::Client; }
  auto operator<=>(const PartyId&) const = default;
};

std::string to_string(PartyId id);

struct Proposal {
  Block block;
  bool operator==(const Proposal&) const = default;
};

struct Vote {
  ReplicaIndex voter = 0;
  Epoch epoch = 0;
  BlockHash block;
  bool operator==(const Vote&) const = default;
};

struct FinalitySignature {
  ReplicaIndex signer = 0;
  std::uint64_t height = 0;
  BlockHash block;
  bool operator==(const FinalitySignature&) const = default;
};

struct TransactionInput {
  TxId tx = 0;
  Slot input_slot = 0;  // slot the environment issued it; fixes mempool order
  bool operator==(const TransactionInput&) const = default;
};

struct SyncBlocks {
  std::vector<Block> blocks;
  bool operator==(const SyncBlocks&) const = default;
};

using Payload = std::variant<Proposal, Vote, FinalitySignature, TransactionInput, SyncBlocks>;
using PayloadPtr = std::shared_ptr<const Payload>;

PayloadPtr make_payload(Payload p);

/// The replica whose identity tag the payload carries (the simulated
/// signature owner). Transaction inputs are environment-authored: nullopt.
std::optional<ReplicaIndex> payload_author(const Payload& p);

/// Content fingerprint used by the mint registry and the transcript digest.
std::uint64_t payload_fingerprint(const Payload& p);

/// Total canonical order on payloads: variant rank, then content.
int payload_cmp(const Payload& a, const Payload& b);

struct Message {
  PartyId sender;
  PartyId recipient;
  PayloadPtr payload;
  Slot send_slot = 0;
};

bool operator==(const Message& a, const Message& b);

/// Canonical delivery order: sender, then payload, then send slot, recipient.
bool canonical_less(const Message& a, const Message& b);
void canonical_sort(std::vector<Message>& msgs);

}  // namespace finsim
