#pragma once

#include <stdexcept>
#include <string>

namespace mecsched {

// Bad user-facing configuration (maps to CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition of the state machine.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A metric was requested that is undefined for the run (e.g. zero arrivals).
class MetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace mecsched
