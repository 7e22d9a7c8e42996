// Copyright (c) 2026 The finsim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace finsim {

/// Invalid scenario/network configuration. Carries a field-level message.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error("config error: " + msg) {}
};

/// A chain walk hit a block whose ancestry is not present in the store.
class MissingAncestorError : public std::runtime_error {
 public:
  explicit MissingAncestorError(const std::string& msg)
      : std::runtime_error("missing ancestor: " + msg) {}
};

/// An honest context tried to originate a payload under another identity.
class UnauthorizedSenderError : public std::runtime_error {
 public:
  explicit UnauthorizedSenderError(const std::string& msg)
      : std::runtime_error("unauthorized sender: " + msg) {}
};

/// An adversary strategy requested a delivery slot outside the
/// partial-synchrony bound. Always a strategy bug; the simulation aborts.
class ScheduleBoundError : public std::runtime_error {
 public:
  explicit ScheduleBoundError(const std::string& msg)
      : std::runtime_error("delivery bound violated: " + msg) {}
};

/// An attack strategy did not reach its phase-end condition in budget.
class AttackFailedError : public std::runtime_error {
 public:
  explicit AttackFailedError(const std::string& msg)
      : std::runtime_error("attack failed: " + msg) {}
};

/// A replayed replica emitted messages that differ from the recorded base.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& msg)
      : std::runtime_error("replay divergence: " + msg) {}
};

/// A client view's ledger cannot be re-derived from its own message log.
class IrreproducibleViewError : public std::runtime_error {
 public:
  explicit IrreproducibleViewError(const std::string& msg)
      : std::runtime_error("irreproducible view: " + msg) {}
};

/// Evidence failed the self-containment (re-derivation) check.
class InsufficientEvidenceError : public std::runtime_error {
 public:
  explicit InsufficientEvidenceError(const std::string& msg)
      : std::runtime_error("insufficient evidence: " + msg) {}
};

/// File could not be parsed as the expected format.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error("parse error: " + msg) {}
};

}  // namespace finsim
