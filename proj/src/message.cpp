// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "finsim/message.hpp"

#include <algorithm>
#include <tuple>

namespace finsim {

std::string to_string(PartyId id) {
  switch (id.kind) {
    case PartyKind::Replica: return "r" + std::to_string(id.index);
    case PartyKind::Client: return "c" + std::to_string(id.index);
    case PartyKind::Environment: return "env";
  }
  return "?";
}

PayloadPtr make_payload(Payload p) { return std::make_shared<const Payload>(std::move(p)); }

std::optional<ReplicaIndex> payload_author(const Payload& p) {
  if (const auto* prop = std::get_if<Proposal>(&p)) return prop->block.proposer;
  if (const auto* vote = std::get_if<Vote>(&p)) return vote->voter;
  if (const auto* sig = std::get_if<FinalitySignature>(&p)) return sig->signer;
  return std::nullopt;  // TransactionInput, SyncBlocks carry no single tag
}

std::uint64_t payload_fingerprint(const Payload& p) {
  Fnv64 fnv;
  fnv.mix(p.index());
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Proposal>) {
          fnv.mix(hash_block(v.block).value);
        } else if constexpr (std::is_same_v<T, Vote>) {
          fnv.mix(v.voter);
          fnv.mix(v.epoch);
          fnv.mix(v.block.value);
        } else if constexpr (std::is_same_v<T, FinalitySignature>) {
          fnv.mix(v.signer);
          fnv.mix(v.height);
          fnv.mix(v.block.value);
        } else if constexpr (std::is_same_v<T, TransactionInput>) {
          fnv.mix(v.tx);
          fnv.mix(v.input_slot);
        } else if constexpr (std::is_same_v<T, SyncBlocks>) {
          fnv.mix(v.blocks.size());
          for (const Block& b : v.blocks) fnv.mix(hash_block(b).value);
        }
      },
      p);
  return fnv.digest();
}

namespace {

template <typename T>
int cmp3(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

int cmp_hash(BlockHash a, BlockHash b) { return cmp3(a.value, b.value); }

}  // namespace

int payload_cmp(const Payload& a, const Payload& b) {
  if (int c = cmp3(a.index(), b.index())) return c;
  switch (a.index()) {
    case 0: {
      const auto& x = std::get<Proposal>(a);
      const auto& y = std::get<Proposal>(b);
      return cmp_hash(hash_block(x.block), hash_block(y.block));
    }
    case 1: {
      const auto& x = std::get<Vote>(a);
      const auto& y = std::get<Vote>(b);
      if (int c = cmp3(x.epoch, y.epoch)) return c;
      if (int c = cmp_hash(x.block, y.block)) return c;
      return cmp3(x.voter, y.voter);
    }
    case 2: {
      const auto& x = std::get<FinalitySignature>(a);
      const auto& y = std::get<FinalitySignature>(b);
      if (int c = cmp3(x.height, y.height)) return c;
      if (int c = cmp_hash(x.block, y.block)) return c;
      return cmp3(x.signer, y.signer);
    }
    case 3: {
      const auto& x = std::get<TransactionInput>(a);
      const auto& y = std::get<TransactionInput>(b);
      if (int c = cmp3(x.input_slot, y.input_slot)) return c;
      return cmp3(x.tx, y.tx);
    }
    case 4: {
      const auto& x = std::get<SyncBlocks>(a);
      const auto& y = std::get<SyncBlocks>(b);
      if (int c = cmp3(x.blocks.size(), y.blocks.size())) return c;
      for (std::size_t i = 0; i < x.blocks.size(); ++i) {
        if (int c = cmp_hash(hash_block(x.blocks[i]), hash_block(y.blocks[i]))) return c;
      }
      return 0;
    }
  }
  return 0;
}

bool operator==(const Message& a, const Message& b) {
  return a.sender == b.sender && a.recipient == b.recipient && a.send_slot == b.send_slot &&
         *a.payload == *b.payload;
}

bool canonical_less(const Message& a, const Message& b) {
  if (a.sender != b.sender) return a.sender < b.sender;
  if (int c = payload_cmp(*a.payload, *b.payload)) return c < 0;
  if (a.send_slot != b.send_slot) return a.send_slot < b.send_slot;
  return a.recipient < b.recipient;
}

void canonical_sort(std::vector<Message>& msgs) {
  std::stable_sort(msgs.begin(), msgs.end(), canonical_less);
}

}  // namespace finsim
