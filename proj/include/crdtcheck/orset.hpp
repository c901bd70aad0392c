#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crdtcheck/lamport.hpp"
#include "crdtcheck/message.hpp"

namespace crdtcheck {

enum class OrSetOpKind { add, rem };

/// Observed-remove set operation. An Add is tagged with the id of the message that
/// carries it; a Rem names the exact tag set its broadcaster had observed for the
/// element, which is what gives concurrent adds the upper hand.
struct OrSetOp {
  OrSetOpKind kind = OrSetOpKind::add;
  std::string elem;
  LamportId id;                // add: the carrying message's id
  std::set<LamportId> ids;     // rem: tags observed by the broadcaster

  static OrSetOp add(const LamportId& id, std::string elem) {
    OrSetOp op;
    op.kind = OrSetOpKind::add;
    op.elem = std::move(elem);
    op.id = id;
    return op;
  }

  static OrSetOp rem(std::set<LamportId> ids, std::string elem) {
    OrSetOp op;
    op.kind = OrSetOpKind::rem;
    op.elem = std::move(elem);
    op.ids = std::move(ids);
    return op;
  }

  friend bool operator==(const OrSetOp&, const OrSetOp&) = default;
  friend auto operator<=>(const OrSetOp&, const OrSetOp&) = default;
};

/// The element an operation concerns.
inline const std::string& op_elem(const OrSetOp& op) { return op.elem; }

/// Element-to-tags map in canonical form: an element with no live tags has no entry,
/// so structural equality is observational equality.
struct OrSetState {
  std::map<std::string, std::set<LamportId>> tags;

  std::set<LamportId> tags_of(const std::string& elem) const {
    auto it = tags.find(elem);
    return it == tags.end() ? std::set<LamportId>{} : it->second;
  }

  friend bool operator==(const OrSetState&, const OrSetState&) = default;
  friend auto operator<=>(const OrSetState&, const OrSetState&) = default;
};

/// Elements with at least one live tag.
inline std::vector<std::string> orset_members(const OrSetState& s) {
  std::vector<std::string> out;
  out.reserve(s.tags.size());
  for (const auto& [elem, ids] : s.tags) {
    if (!ids.empty()) out.push_back(elem);
  }
  return out;
}

struct OrSet {
  using Op = OrSetOp;
  using State = OrSetState;

  static constexpr const char* name = "orset";

  static State initial() { return {}; }

  /// Add unions in the new tag; Rem subtracts exactly the named tags. Total: a Rem
  /// of tags that are not present simply removes nothing.
  static std::optional<State> interpret(const Op& op, const State& s) {
    State out = s;
    if (op.kind == OrSetOpKind::add) {
      out.tags[op.elem].insert(op.id);
      return out;
    }
    auto it = out.tags.find(op.elem);
    if (it != out.tags.end()) {
      for (const auto& id : op.ids) it->second.erase(id);
      if (it->second.empty()) out.tags.erase(it);
    }
    return out;
  }

  /// Adds must be tagged with their carrying message's id; Rems must name exactly
  /// the broadcaster's observed tag set for the element.
  static bool valid(const State& s, const Message<Op>& msg) {
    if (msg.op.kind == OrSetOpKind::add) return msg.op.id == msg.id;
    return msg.op.ids == s.tags_of(msg.op.elem);
  }
};

}  // namespace crdtcheck
