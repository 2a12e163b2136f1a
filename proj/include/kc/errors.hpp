#pragma once

#include <stdexcept>
#include <string>

namespace kc {

/// Base class for all library errors. Failure *reports* (hamiltonize,
/// pipeline stages) are values, not exceptions; exceptions are reserved
/// for contract violations and malformed input.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition or argument constraint was violated.
class parameter_error : public error {
public:
  using error::error;
};

/// Malformed text input; carries the 1-based line number.
class parse_error : public error {
public:
  parse_error(std::string msg, int line)
      : error("line " + std::to_string(line) + ": " + std::move(msg)),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

/// An exact/enumerative mode was requested beyond its size limit.
class capacity_error : public error {
public:
  using error::error;
};

/// Sets that must be disjoint intersect.
class overlap_error : public error {
public:
  using error::error;
};

/// A growth recurrence cannot make progress (g <= 1).
class nonprogress_error : public error {
public:
  using error::error;
};

/// A requested structure cannot exist; the message names the obstruction.
class infeasible_error : public error {
public:
  using error::error;
};

} // namespace kc
