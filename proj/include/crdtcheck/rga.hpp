#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "crdtcheck/lamport.hpp"
#include "crdtcheck/message.hpp"

namespace crdtcheck {

/// One cell of the replicated sequence. Deleted cells stay in place as tombstones so
/// concurrent inserts can still anchor to them.
struct RgaElt {
  LamportId id;
  std::string value;
  bool deleted = false;

  friend bool operator==(const RgaElt&, const RgaElt&) = default;
  friend auto operator<=>(const RgaElt&, const RgaElt&) = default;
};

struct RgaState {
  std::vector<RgaElt> elements;

  bool contains(const LamportId& id) const {
    for (const auto& e : elements) {
      if (e.id == id) return true;
    }
    return false;
  }

  friend bool operator==(const RgaState&, const RgaState&) = default;
  friend auto operator<=>(const RgaState&, const RgaState&) = default;
};

enum class RgaOpKind { insert, erase };

struct RgaOp {
  RgaOpKind kind = RgaOpKind::insert;
  RgaElt element;                   // insert: the new cell (deleted = false)
  std::optional<LamportId> after;   // insert: anchor id, or none for the head
  LamportId target;                 // erase: id of the cell to tombstone

  static RgaOp insert(const RgaElt& element, std::optional<LamportId> after) {
    RgaOp op;
    op.kind = RgaOpKind::insert;
    op.element = element;
    op.after = after;
    return op;
  }

  static RgaOp erase(const LamportId& target) {
    RgaOp op;
    op.kind = RgaOpKind::erase;
    op.target = target;
    return op;
  }

  friend bool operator==(const RgaOp&, const RgaOp&) = default;
  friend auto operator<=>(const RgaOp&, const RgaOp&) = default;
};

/// Places e before the first element whose id is smaller, appending if there is
/// none. Runs of concurrent inserts at one anchor therefore end up in descending id
/// order, which is what makes the placement order-insensitive. e's id must not
/// already occur in xs.
inline std::vector<RgaElt> insert_body(std::vector<RgaElt> xs, const RgaElt& e) {
  auto it = std::find_if(xs.begin(), xs.end(),
                         [&](const RgaElt& x) { return x.id < e.id; });
  xs.insert(it, e);
  return xs;
}

/// Insert at the head (no anchor) or into the remainder following the anchor cell.
/// Fails when the anchor id is absent.
inline std::optional<std::vector<RgaElt>> rga_insert(
    const std::vector<RgaElt>& xs, const RgaElt& e,
    const std::optional<LamportId>& after) {
  if (!after) return insert_body(xs, e);
  auto anchor = std::find_if(xs.begin(), xs.end(),
                             [&](const RgaElt& x) { return x.id == *after; });
  if (anchor == xs.end()) return std::nullopt;
  std::vector<RgaElt> out(xs.begin(), anchor + 1);
  std::vector<RgaElt> body =
      insert_body(std::vector<RgaElt>(anchor + 1, xs.end()), e);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

/// Tombstones the cell with the given id, keeping it in place. Fails when absent;
/// re-flagging an already deleted cell is a no-op by design.
inline std::optional<std::vector<RgaElt>> rga_delete(std::vector<RgaElt> xs,
                                                     const LamportId& id) {
  auto it = std::find_if(xs.begin(), xs.end(),
                         [&](const RgaElt& x) { return x.id == id; });
  if (it == xs.end()) return std::nullopt;
  it->deleted = true;
  return xs;
}

/// The visible text: values of live cells, in sequence order.
inline std::string rga_read(const RgaState& s) {
  std::string out;
  for (const auto& e : s.elements) {
    if (!e.deleted) out += e.value;
  }
  return out;
}

struct Rga {
  using Op = RgaOp;
  using State = RgaState;

  static constexpr const char* name = "rga";

  static State initial() { return {}; }

  static std::optional<State> interpret(const Op& op, const State& s) {
    std::optional<std::vector<RgaElt>> elements =
        op.kind == RgaOpKind::insert ? rga_insert(s.elements, op.element, op.after)
                                     : rga_delete(s.elements, op.target);
    if (!elements) return std::nullopt;
    return RgaState{std::move(*elements)};
  }

  /// Inserts must carry their message's id as the element id and anchor at a cell
  /// the broadcaster has; erases must target a cell the broadcaster has.
  static bool valid(const State& s, const Message<Op>& msg) {
    if (msg.op.kind == RgaOpKind::insert) {
      if (msg.op.element.id != msg.id) return false;
      return !msg.op.after || s.contains(*msg.op.after);
    }
    return s.contains(msg.op.target);
  }
};

}  // namespace crdtcheck
