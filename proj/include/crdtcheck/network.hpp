#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crdtcheck/causal.hpp"
#include "crdtcheck/errors.hpp"
#include "crdtcheck/interp.hpp"
#include "crdtcheck/message.hpp"
#include "crdtcheck/vector_clock.hpp"

namespace crdtcheck {

/// Record of an interpretation step that came up undefined at some node; the node is
/// moved to the failed set when this happens.
struct Violation {
  std::size_t node = 0;
  LamportId message;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// A fault the scheduler may inject.
struct Fault {
  enum class Kind { drop, crash, partition, heal };

  Kind kind = Kind::drop;
  std::size_t node = 0;            // drop: recipient; crash: crashing node
  LamportId message;               // drop: id of the in-flight message to lose
  std::set<std::size_t> side;      // partition: one side of the cut

  static Fault drop(std::size_t node, const LamportId& message) {
    Fault f;
    f.kind = Kind::drop;
    f.node = node;
    f.message = message;
    return f;
  }
  static Fault crash(std::size_t node) {
    Fault f;
    f.kind = Kind::crash;
    f.node = node;
    return f;
  }
  static Fault partition(std::set<std::size_t> side) {
    Fault f;
    f.kind = Kind::partition;
    f.side = std::move(side);
    return f;
  }
  static Fault heal() {
    Fault f;
    f.kind = Kind::heal;
    return f;
  }
};

/// Per-node slice of a World.
template <typename D>
struct NodeSlot {
  using Op = typename D::Op;

  std::vector<Event<Op>> history;
  std::map<LamportId, Message<Op>> pending;  // in flight, not yet delivered here
  typename D::State state = D::initial();
  std::set<LamportId> delivered_ids;
  VectorClock clock;          // deliveries seen, per originating node
  std::uint64_t lamport = 0;  // logical clock driving id generation

  friend bool operator==(const NodeSlot&, const NodeSlot&) = default;
};

/// The whole simulated system: a value. Copy it to branch an execution.
template <typename D>
struct World {
  using Op = typename D::Op;
  using State = typename D::State;
  using Msg = Message<Op>;

  std::vector<NodeSlot<D>> nodes;
  std::uint64_t rng_seed = 0;
  std::set<std::size_t> failed;
  std::optional<std::set<std::size_t>> partition;  // one side of the active cut
  std::vector<Violation> violations;

  friend bool operator==(const World&, const World&) = default;

  static World make(std::size_t node_count, std::uint64_t seed = 0) {
    World w;
    w.nodes.resize(node_count);
    w.rng_seed = seed;
    return w;
  }

  std::size_t size() const { return nodes.size(); }

  bool is_failed(std::size_t node) const { return failed.count(node) != 0; }

  /// True when the active cut separates the two nodes.
  bool masked(std::size_t from, std::size_t to) const {
    if (!partition) return false;
    return (partition->count(from) != 0) != (partition->count(to) != 0);
  }

  /// Id the next broadcast from this node will carry.
  LamportId next_message_id(std::size_t node) const {
    return {nodes[node].lamport + 1, static_cast<std::uint32_t>(node)};
  }

  /// Broadcasts an operation from a node: stamps it, checks it against the validity
  /// predicate at the node's current state, enqueues it to every other node, and
  /// delivers it locally. Returns the message as sent.
  ///
  /// The validity predicate defaults to the datatype's; adversarial scripts may pass
  /// their own to smuggle invalid operations past the check and watch the audits
  /// catch them downstream.
  template <typename Validity = bool (*)(const State&, const Msg&)>
  Msg broadcast(std::size_t node, const Op& op, Validity valid = &D::valid) {
    require_node(node);
    if (is_failed(node)) {
      throw NodeFailed("broadcast: node " + std::to_string(node) + " has failed");
    }
    NodeSlot<D>& slot = nodes[node];
    Msg msg;
    msg.id = next_message_id(node);
    msg.op = op;
    msg.clock = slot.clock;
    msg.clock.bump(static_cast<std::uint32_t>(node));
    if (!valid(slot.state, msg)) {
      throw InvalidMessage("broadcast: operation invalid at node " +
                           std::to_string(node) + " for message " +
                           to_string(msg.id));
    }
    slot.history.push_back({EventKind::broadcast, msg});
    for (std::size_t other = 0; other < nodes.size(); ++other) {
      if (other != node) nodes[other].pending.emplace(msg.id, msg);
    }
    slot.lamport += 1;
    apply_delivery(node, msg);
    return msg;
  }

  /// Messages this node could deliver right now: pending, not already delivered,
  /// not masked by a partition, and causally ready. Failed nodes deliver nothing.
  std::vector<Msg> deliverable(std::size_t node) const {
    require_node(node);
    std::vector<Msg> out;
    if (is_failed(node)) return out;
    const NodeSlot<D>& slot = nodes[node];
    for (const auto& [id, msg] : slot.pending) {
      if (slot.delivered_ids.count(id)) continue;
      if (masked(id.node, node)) continue;
      if (!causally_ready(msg.clock, id.node, slot.clock)) continue;
      out.push_back(msg);
    }
    return out;
  }

  /// Delivers one specific pending message at a node. IllegalAction unless the
  /// message is deliverable there right now.
  void deliver(std::size_t node, const LamportId& id) {
    require_node(node);
    if (is_failed(node)) {
      throw IllegalAction("deliver: node " + std::to_string(node) + " has failed");
    }
    NodeSlot<D>& slot = nodes[node];
    auto it = slot.pending.find(id);
    if (it == slot.pending.end()) {
      throw IllegalAction("deliver: message " + to_string(id) +
                          " is not pending at node " + std::to_string(node));
    }
    const Msg msg = it->second;
    if (slot.delivered_ids.count(id) || masked(id.node, node) ||
        !causally_ready(msg.clock, id.node, slot.clock)) {
      throw IllegalAction("deliver: message " + to_string(id) +
                          " is not deliverable at node " + std::to_string(node));
    }
    slot.pending.erase(it);
    if (msg.id.counter > slot.lamport) slot.lamport = msg.id.counter;
    apply_delivery(node, msg);
  }

  void inject_fault(const Fault& fault) {
    switch (fault.kind) {
      case Fault::Kind::drop: {
        require_node(fault.node);
        auto& pending = nodes[fault.node].pending;
        auto it = pending.find(fault.message);
        if (it == pending.end()) {
          throw IllegalAction("drop: message " + to_string(fault.message) +
                              " is not in flight to node " +
                              std::to_string(fault.node));
        }
        pending.erase(it);
        break;
      }
      case Fault::Kind::crash:
        require_node(fault.node);
        failed.insert(fault.node);
        break;
      case Fault::Kind::partition: {
        if (fault.side.empty() || fault.side.size() >= nodes.size()) {
          throw IllegalAction("partition: side must be a nonempty proper subset");
        }
        for (std::size_t n : fault.side) require_node(n);
        partition = fault.side;
        break;
      }
      case Fault::Kind::heal:
        partition.reset();
        break;
    }
  }

 private:
  void require_node(std::size_t node) const {
    if (node >= nodes.size()) {
      throw IllegalAction("no such node: " + std::to_string(node));
    }
  }

  /// Shared tail of broadcast (local delivery) and deliver: record the event, bump
  /// the clock, interpret. An undefined interpretation freezes the node.
  void apply_delivery(std::size_t node, const Msg& msg) {
    NodeSlot<D>& slot = nodes[node];
    slot.history.push_back({EventKind::deliver, msg});
    slot.delivered_ids.insert(msg.id);
    slot.clock.bump(msg.id.node);
    std::optional<State> next = D::interpret(msg.op, slot.state);
    if (next) {
      slot.state = std::move(*next);
    } else {
      failed.insert(node);
      violations.push_back({node, msg.id,
                            "interpretation undefined for message " +
                                to_string(msg.id) + " at node " +
                                std::to_string(node)});
    }
  }
};

/// Projection of a history onto the messages it delivered, in order.
template <typename Op>
std::vector<Message<Op>> node_deliver_messages(const std::vector<Event<Op>>& history) {
  std::vector<Message<Op>> out;
  for (const auto& e : history) {
    if (e.kind == EventKind::deliver) out.push_back(e.message);
  }
  return out;
}

template <typename D>
std::vector<std::vector<Message<typename D::Op>>> delivered_histories(
    const World<D>& w) {
  std::vector<std::vector<Message<typename D::Op>>> out;
  out.reserve(w.nodes.size());
  for (const auto& slot : w.nodes) out.push_back(node_deliver_messages(slot.history));
  return out;
}

/// Happens-before relation of a recorded execution, as a reachability closure over
/// the rules: an event of m1 earlier than a broadcast of m2 in the same history
/// makes m1 a cause of m2, and causes chain transitively. Built once, queried often.
/// The oracle handed out refers back into the index, so keep the index alive.
template <typename Op>
struct HbIndex {
  std::vector<Message<Op>> messages;
  std::map<Message<Op>, std::size_t> position;
  std::vector<std::vector<bool>> closure;  // closure[i][j]: message i precedes j

  std::size_t require(const Message<Op>& m) const {
    auto it = position.find(m);
    if (it == position.end()) {
      throw UnknownMessage("message " + to_string(m.id) + " not in any history");
    }
    return it->second;
  }

  bool precedes(const Message<Op>& a, const Message<Op>& b) const {
    return closure[require(a)][require(b)];
  }

  Precedence compare(const Message<Op>& a, const Message<Op>& b) const {
    std::size_t i = require(a);
    std::size_t j = require(b);
    if (closure[i][j]) return Precedence::first_precedes;
    if (closure[j][i]) return Precedence::second_precedes;
    return Precedence::concurrent;
  }

  PrecedenceFn<Message<Op>> oracle() const {
    return [this](const Message<Op>& a, const Message<Op>& b) {
      return compare(a, b);
    };
  }
};

template <typename D>
HbIndex<typename D::Op> make_hb_index(const World<D>& w) {
  using Op = typename D::Op;
  HbIndex<Op> idx;
  for (const auto& slot : w.nodes) {
    for (const auto& e : slot.history) {
      if (idx.position.emplace(e.message, idx.messages.size()).second) {
        idx.messages.push_back(e.message);
      }
    }
  }
  const std::size_t n = idx.messages.size();
  idx.closure.assign(n, std::vector<bool>(n, false));
  for (const auto& slot : w.nodes) {
    for (std::size_t b = 0; b < slot.history.size(); ++b) {
      if (slot.history[b].kind != EventKind::broadcast) continue;
      std::size_t to = idx.position.at(slot.history[b].message);
      for (std::size_t a = 0; a < b; ++a) {
        std::size_t from = idx.position.at(slot.history[a].message);
        if (from != to) idx.closure[from][to] = true;
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!idx.closure[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (idx.closure[k][j]) idx.closure[i][j] = true;
      }
    }
  }
  return idx;
}

/// One-off happens-before query against a world's recorded histories.
template <typename D>
bool happens_before(const World<D>& w, const Message<typename D::Op>& a,
                    const Message<typename D::Op>& b) {
  return make_hb_index(w).precedes(a, b);
}

struct AxiomCheck {
  bool ok = true;
  std::string witness;

  friend bool operator==(const AxiomCheck&, const AxiomCheck&) = default;
};

/// Post-hoc discharge of the six network-model obligations over a recorded World.
struct AxiomReport {
  AxiomCheck histories_distinct;
  AxiomCheck delivery_has_a_cause;
  AxiomCheck deliver_locally;
  AxiomCheck msg_id_unique;
  AxiomCheck causal_delivery;
  AxiomCheck broadcast_only_valid_msgs;

  bool all_ok() const {
    return histories_distinct.ok && delivery_has_a_cause.ok && deliver_locally.ok &&
           msg_id_unique.ok && causal_delivery.ok && broadcast_only_valid_msgs.ok;
  }

  friend bool operator==(const AxiomReport&, const AxiomReport&) = default;
};

template <typename D>
AxiomReport audit_axioms(const World<D>& w) {
  using Op = typename D::Op;
  AxiomReport report;

  // No node's history repeats an event.
  for (std::size_t n = 0; n < w.nodes.size() && report.histories_distinct.ok; ++n) {
    const auto& h = w.nodes[n].history;
    for (std::size_t j = 1; j < h.size() && report.histories_distinct.ok; ++j) {
      for (std::size_t i = 0; i < j; ++i) {
        if (h[i] == h[j]) {
          report.histories_distinct = {
              false, "node " + std::to_string(n) + " repeats event " +
                         std::to_string(i) + " at " + std::to_string(j) +
                         " (message " + to_string(h[j].message.id) + ")"};
          break;
        }
      }
    }
  }

  // Every delivered message was broadcast somewhere.
  std::set<Message<Op>> broadcast_msgs;
  for (const auto& slot : w.nodes) {
    for (const auto& e : slot.history) {
      if (e.kind == EventKind::broadcast) broadcast_msgs.insert(e.message);
    }
  }
  for (std::size_t n = 0; n < w.nodes.size() && report.delivery_has_a_cause.ok; ++n) {
    for (const auto& e : w.nodes[n].history) {
      if (e.kind == EventKind::deliver && !broadcast_msgs.count(e.message)) {
        report.delivery_has_a_cause = {
            false, "node " + std::to_string(n) + " delivers " +
                       to_string(e.message.id) + " which no node broadcast"};
        break;
      }
    }
  }

  // A broadcaster subsequently delivers its own message.
  for (std::size_t n = 0; n < w.nodes.size() && report.deliver_locally.ok; ++n) {
    const auto& h = w.nodes[n].history;
    for (std::size_t b = 0; b < h.size(); ++b) {
      if (h[b].kind != EventKind::broadcast) continue;
      bool delivered = false;
      for (std::size_t d = b + 1; d < h.size(); ++d) {
        if (h[d].kind == EventKind::deliver && h[d].message == h[b].message) {
          delivered = true;
          break;
        }
      }
      if (!delivered) {
        report.deliver_locally = {false, "node " + std::to_string(n) +
                                             " broadcasts " +
                                             to_string(h[b].message.id) +
                                             " but never delivers it to itself"};
        break;
      }
    }
  }

  // A message id is broadcast by one node only, with one payload.
  {
    std::map<LamportId, std::pair<std::size_t, Message<Op>>> by_id;
    for (std::size_t n = 0; n < w.nodes.size() && report.msg_id_unique.ok; ++n) {
      for (const auto& e : w.nodes[n].history) {
        if (e.kind != EventKind::broadcast) continue;
        auto [it, fresh] = by_id.emplace(e.message.id, std::make_pair(n, e.message));
        if (!fresh && (it->second.first != n || !(it->second.second == e.message))) {
          report.msg_id_unique = {
              false, "id " + to_string(e.message.id) + " broadcast by node " +
                         std::to_string(it->second.first) + " and node " +
                         std::to_string(n)};
          break;
        }
      }
    }
  }

  // Deliveries respect causal order: every cause is delivered first.
  HbIndex<Op> hb = make_hb_index(w);
  for (std::size_t n = 0; n < w.nodes.size() && report.causal_delivery.ok; ++n) {
    std::set<Message<Op>> seen;
    for (const auto& e : w.nodes[n].history) {
      if (e.kind != EventKind::deliver) continue;
      std::size_t target = hb.position.at(e.message);
      for (std::size_t m = 0; m < hb.messages.size(); ++m) {
        if (hb.closure[m][target] && !seen.count(hb.messages[m])) {
          report.causal_delivery = {
              false, "node " + std::to_string(n) + " delivers " +
                         to_string(e.message.id) + " before its cause " +
                         to_string(hb.messages[m].id)};
          break;
        }
      }
      if (!report.causal_delivery.ok) break;
      seen.insert(e.message);
    }
  }

  // Every broadcast is valid at the state its sender had built from its own
  // deliveries so far.
  for (std::size_t n = 0; n < w.nodes.size() && report.broadcast_only_valid_msgs.ok;
       ++n) {
    std::optional<typename D::State> state = D::initial();
    for (const auto& e : w.nodes[n].history) {
      if (e.kind == EventKind::deliver) {
        if (state) state = D::interpret(e.message.op, *state);
        continue;
      }
      if (!state) {
        report.broadcast_only_valid_msgs = {
            false, "node " + std::to_string(n) + " broadcasts " +
                       to_string(e.message.id) +
                       " after its state became undefined"};
        break;
      }
      if (!D::valid(*state, e.message)) {
        report.broadcast_only_valid_msgs = {
            false, "node " + std::to_string(n) + " broadcasts " +
                       to_string(e.message.id) + " which is invalid at its state"};
        break;
      }
    }
  }

  return report;
}

/// Audit of the convergence assumptions over a world's delivery sequences, using the
/// world's own happens-before relation as the precedence oracle.
template <typename D>
SecVerdict audit_sec_world(const World<D>& w) {
  using Op = typename D::Op;
  HbIndex<Op> hb = make_hb_index(w);
  Interp<Op, typename D::State> interp = &D::interpret;
  return audit_sec(delivered_histories(w), hb.oracle(), interp, D::initial());
}

}  // namespace crdtcheck
