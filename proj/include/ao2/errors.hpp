#pragma once

#include <stdexcept>
#include <string>

namespace ao2 {

// Violated precondition (dimension mismatch, wrong node kind, stepping a
// finished episode, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Unknown node id.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Inference requested on a pool that has no interior node yet.
class NoSchema : public std::runtime_error {
 public:
  NoSchema() : std::runtime_error("pool has no interior node") {}
};

// No action leaf reachable from the matched node.
class NoAction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration value or unknown environment name.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ao2
