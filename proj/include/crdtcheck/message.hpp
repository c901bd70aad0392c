#pragma once

#include <compare>

#include "crdtcheck/lamport.hpp"
#include "crdtcheck/vector_clock.hpp"

namespace crdtcheck {

/// A broadcast operation in flight: unique id, datatype operation payload, and the
/// sender's causal clock snapshot (own component already bumped).
template <typename Op>
struct Message {
  LamportId id;
  Op op;
  VectorClock clock;

  friend bool operator==(const Message&, const Message&) = default;
  friend auto operator<=>(const Message&, const Message&) = default;
};

enum class EventKind { broadcast, deliver };

/// One entry of a node's history.
template <typename Op>
struct Event {
  EventKind kind = EventKind::broadcast;
  Message<Op> message;

  friend bool operator==(const Event&, const Event&) = default;
  friend auto operator<=>(const Event&, const Event&) = default;
};

}  // namespace crdtcheck
