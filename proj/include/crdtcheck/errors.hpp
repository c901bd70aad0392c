#pragma once

#include <stdexcept>
#include <string>

namespace crdtcheck {

/// Base class for all checker errors; everything thrown on purpose derives from this.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Broadcast rejected: the operation fails the datatype's validity predicate.
struct InvalidMessage : Error {
  using Error::Error;
};

/// Action addressed to a node in the failed set.
struct NodeFailed : Error {
  using Error::Error;
};

/// A scripted action remains but no action is enabled.
struct Deadlock : Error {
  using Error::Error;
};

/// A scripted action's preconditions do not hold (names the offending record).
struct IllegalAction : Error {
  using Error::Error;
};

/// Message id not present in any history.
struct UnknownMessage : Error {
  using Error::Error;
};

/// Malformed trace, log, or oracle input (carries a line or record position).
struct ParseError : Error {
  using Error::Error;
};

/// Scenario or peer configuration out of range or inconsistent.
struct ConfigError : Error {
  using Error::Error;
};

/// Oracle enumeration refused: message set larger than the configured bound.
struct BoundExceeded : Error {
  using Error::Error;
};

/// Convergence comparison of two sequences that are not the same message set.
struct SetMismatch : Error {
  using Error::Error;
};

/// Malformed wire frame (truncated prefix, empty or undecodable payload).
struct FrameError : Error {
  using Error::Error;
};

/// Listener could not bind its port.
struct BindError : Error {
  using Error::Error;
};

}  // namespace crdtcheck
