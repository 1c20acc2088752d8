#pragma once

#include <stdexcept>
#include <string>

namespace idsbench {

/// Malformed input text (plan, priority, mapping, log, capture).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input parsed but violates a domain invariant, or a required input is missing.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Test infrastructure failed: IDS never ready, clock skew, replay behind schedule.
class InfrastructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace idsbench
