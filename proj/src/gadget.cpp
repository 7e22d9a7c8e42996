// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "finsim/gadget.hpp"

#include <stdexcept>

namespace finsim {

std::optional<FinalitySignature> FinalityGadget::on_underlay_confirmed(const Block& block,
                                                                       const BlockStore& store) {
  BlockHash h = hash_block(block);
  if (h != genesis_hash() && !invoked_.count(block.parent)) {
    throw std::logic_error("gadget invoked for " + to_hex(h) + " before its parent");
  }
  if (invoked_.count(h)) {
    throw std::logic_error("gadget invoked twice for " + to_hex(h));
  }
  invoked_.insert(h);

  auto at_height = signed_.find(block.height);
  bool height_free = at_height == signed_.end();
  if (!height_free && at_height->second == h) return std::nullopt;  // already signed, no-op

  bool prefix_consistent = true;
  bool ancestor_refused = false;
  for (BlockHash cur = block.parent; cur != kNullHash;) {
    const Block& a = store.at(cur);
    if (refused_.count(cur)) ancestor_refused = true;
    auto it = signed_.find(a.height);
    if (it != signed_.end() && it->second != cur) prefix_consistent = false;
    cur = a.parent;
  }

  if (!height_free || !prefix_consistent || ancestor_refused) {
    refused_.insert(h);
    return std::nullopt;
  }
  signed_[block.height] = h;
  return FinalitySignature{self_, block.height, h};
}

}  // namespace finsim
