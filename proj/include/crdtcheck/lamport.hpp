#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>

namespace crdtcheck {

/// Globally unique message identifier: a logical counter paired with the index of the
/// originating node. Ordered lexicographically, counter first, so the total order on
/// ids extends causal order (a node's counter is bumped past every id it has seen
/// before it broadcasts again).
struct LamportId {
  std::uint64_t counter = 0;
  std::uint32_t node = 0;

  friend auto operator<=>(const LamportId&, const LamportId&) = default;
};

/// Three-way compare, exposed as a named function for call sites that want to be
/// explicit about the tiebreak (counter first, node second).
inline std::strong_ordering lamport_compare(const LamportId& a, const LamportId& b) {
  return a <=> b;
}

inline std::string to_string(const LamportId& id) {
  return std::to_string(id.counter) + "@" + std::to_string(id.node);
}

inline std::ostream& operator<<(std::ostream& os, const LamportId& id) {
  return os << to_string(id);
}

}  // namespace crdtcheck
