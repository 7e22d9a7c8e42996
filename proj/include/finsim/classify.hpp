// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "finsim/report.hpp"

namespace finsim {

/// Empirical membership of one protocol in the classification sets.
/// `live_after_gst` means secure under partial synchrony: the adversarial
/// battery kept safety and restored liveness after the stabilization time.
struct ProtocolClassification {
  std::string protocol;
  bool reference_only = false;  // documented external reference point, not run
  bool synch_safe = false;
  bool synch_live = false;
  bool final_ = false;
  bool accountable_safe = false;
  bool live_after_gst = false;
  bool dynamic_participation = false;  // reference rows only
  bool operator==(const ProtocolClassification&) const = default;
};

struct ClassificationMatrix {
  std::vector<ProtocolClassification> rows;
};

/// Runs the fixed scenario battery over the three implemented protocols and
/// appends the documented reference points (PBFT, HotStuff-null, Nakamoto).
ClassificationMatrix classify(std::uint64_t seed = 1, std::uint32_t seeds_per_cell = 3);

/// The expected matrix for the implemented protocols.
ClassificationMatrix expected_classification();

Json to_json(const ClassificationMatrix& m);

}  // namespace finsim
