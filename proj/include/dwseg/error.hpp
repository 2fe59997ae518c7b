#pragma once

#include <stdexcept>
#include <string>

namespace dwseg {

// Bad parameters, mismatched dimensions, empty inputs.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable, undecodable or unwritable files. The message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant failed at runtime (e.g. the scheduler saw the
// cluster count grow between rounds).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidInput(what);
}

}  // namespace dwseg
