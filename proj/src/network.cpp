// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#include "finsim/network.hpp"

#include <algorithm>

#include "finsim/errors.hpp"

namespace finsim {

void NetworkConfig::validate() const {
  switch (mode) {
    case NetworkMode::Synchrony:
      if (gst != std::optional<Slot>{0}) throw ConfigError("synchrony requires gst = 0");
      break;
    case NetworkMode::DelayFree:
      if (gst != std::optional<Slot>{0} || delta != 0) {
        throw ConfigError("delay_free requires gst = 0 and delta = 0");
      }
      break;
    case NetworkMode::PartialSynchrony:
      break;
  }
}

std::optional<Slot> NetworkConfig::delivery_bound(Slot send_slot) const {
  if (!gst.has_value()) return std::nullopt;
  return std::max(send_slot, *gst) + delta;
}

EventQueue::EventQueue(NetworkConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void EventQueue::submit(Message msg, Slot delivery_slot) {
  if (msg.send_slot != current_) {
    throw std::logic_error("submit: send_slot " + std::to_string(msg.send_slot) +
                           " is not the current slot " + std::to_string(current_));
  }
  if (delivery_slot < msg.send_slot) {
    throw ScheduleBoundError("delivery " + std::to_string(delivery_slot) + " before send " +
                             std::to_string(msg.send_slot));
  }
  auto bound = cfg_.delivery_bound(msg.send_slot);
  if (bound && delivery_slot > *bound) {
    throw ScheduleBoundError("delivery " + std::to_string(delivery_slot) + " exceeds bound " +
                             std::to_string(*bound) + " for send " +
                             std::to_string(msg.send_slot));
  }
  pending_.push_back({std::move(msg), delivery_slot});
}

void EventQueue::submit_after_gst(Message msg) {
  if (msg.send_slot != current_) {
    throw std::logic_error("submit_after_gst: send_slot is not the current slot");
  }
  if (cfg_.gst.has_value()) {
    Slot slot = std::max(msg.send_slot, *cfg_.gst) + cfg_.delta;
    pending_.push_back({std::move(msg), slot});
  } else {
    pending_.push_back({std::move(msg), std::nullopt});
  }
}

bool EventQueue::adversary_delay(const Message& msg, Slot new_delivery_slot) {
  if (new_delivery_slot < msg.send_slot) return false;
  auto bound = cfg_.delivery_bound(msg.send_slot);
  if (bound && new_delivery_slot > *bound) return false;
  for (auto& p : pending_) {
    if (p.msg == msg) {
      p.delivery = new_delivery_slot;
      return true;
    }
  }
  return false;  // no such pending entry
}

void EventQueue::declare_gst(Slot gst) {
  if (cfg_.gst.has_value()) throw std::logic_error("gst already declared");
  cfg_.gst = gst;
  for (auto& p : pending_) {
    if (!p.delivery.has_value()) {
      p.delivery = std::max(p.msg.send_slot, gst) + cfg_.delta;
    }
  }
}

std::vector<Message> EventQueue::drain_current() {
  std::vector<Message> due;
  auto keep = pending_.begin();
  for (auto it = pending_.begin(); it != pending_.end(); ++it) {
    if (it->delivery.has_value() && *it->delivery <= current_) {
      // Release-time re-check of the delivery-bound invariant.
      auto bound = cfg_.delivery_bound(it->msg.send_slot);
      if (bound && *it->delivery > *bound) {
        throw ScheduleBoundError("pending entry past bound at release");
      }
      due.push_back(std::move(it->msg));
    } else {
      if (keep != it) *keep = std::move(*it);
      ++keep;
    }
  }
  pending_.erase(keep, pending_.end());
  canonical_sort(due);
  return due;
}

std::vector<Message> EventQueue::advance() {
  ++current_;
  return drain_current();
}

std::vector<Message> EventQueue::take_due() { return drain_current(); }

}  // namespace finsim
