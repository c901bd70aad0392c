#pragma once

#include <compare>
#include <cstdint>
#include <map>

namespace crdtcheck {

/// Map from node index to per-node event count. Entries absent from the map are
/// implicitly zero, and zero entries are never stored, so equal clocks compare equal
/// structurally.
struct VectorClock {
  std::map<std::uint32_t, std::uint64_t> entries;

  std::uint64_t at(std::uint32_t node) const {
    auto it = entries.find(node);
    return it == entries.end() ? 0 : it->second;
  }

  void bump(std::uint32_t node) { ++entries[node]; }

  friend bool operator==(const VectorClock&, const VectorClock&) = default;
  friend auto operator<=>(const VectorClock&, const VectorClock&) = default;
};

/// Component-wise maximum (least upper bound).
inline VectorClock vc_merge(const VectorClock& a, const VectorClock& b) {
  VectorClock out = a;
  for (const auto& [node, count] : b.entries) {
    auto& slot = out.entries[node];
    if (count > slot) slot = count;
  }
  return out;
}

/// Component-wise order: every entry of a is <= the matching entry of b.
inline bool vc_leq(const VectorClock& a, const VectorClock& b) {
  for (const auto& [node, count] : a.entries) {
    if (count > b.at(node)) return false;
  }
  return true;
}

/// Causal-broadcast readiness: a message stamped with `msg` by `sender` may be
/// delivered at a node whose clock is `local` once the stamp's sender component is
/// exactly the next one expected and every other component is already covered.
inline bool causally_ready(const VectorClock& msg, std::uint32_t sender,
                           const VectorClock& local) {
  if (msg.at(sender) != local.at(sender) + 1) return false;
  for (const auto& [node, count] : msg.entries) {
    if (node != sender && count > local.at(node)) return false;
  }
  return true;
}

}  // namespace crdtcheck
