#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "crdtcheck/counter.hpp"
#include "crdtcheck/errors.hpp"
#include "crdtcheck/interp.hpp"
#include "crdtcheck/network.hpp"
#include "crdtcheck/orset.hpp"
#include "crdtcheck/rga.hpp"
#include "crdtcheck/rng.hpp"
#include "crdtcheck/trace.hpp"

namespace crdtcheck {

enum class Verdict { converged, diverged, axiom_violation, interpretation_failure };

std::string to_string(Verdict v);
Verdict parse_verdict(const std::string& name);

/// Process exit code for a verdict: 0 converged, 1 diverged, 2 for any discharge
/// failure (axiom violation or undefined interpretation step).
int exit_code(Verdict v);

struct FaultRates {
  double drop = 0.0;
  double crash = 0.0;
  double partition = 0.0;

  friend bool operator==(const FaultRates&, const FaultRates&) = default;
};

/// One checker run: either a seeded random schedule over a fresh world, or a
/// scripted action sequence (script wins when present).
struct Scenario {
  Datatype datatype = Datatype::counter;
  std::size_t nodes = 3;
  std::uint64_t seed = 0;
  std::size_t op_budget = 20;
  FaultRates faults;
  std::optional<Trace> script;
};

void validate_scenario(const Scenario& s);  // ConfigError on nonsense

struct ReportStats {
  std::uint64_t broadcasts = 0;
  std::uint64_t delivers = 0;
  std::uint64_t drops = 0;

  friend bool operator==(const ReportStats&, const ReportStats&) = default;
};

/// Outcome of one checker run, fully serializable; two runs agree iff their
/// rendered reports agree byte for byte.
struct Report {
  Datatype datatype = Datatype::counter;
  Verdict verdict = Verdict::converged;
  std::vector<ojson> per_node_final_states;
  SecVerdict sec;
  AxiomReport axioms;
  std::optional<ojson> witness;
  ReportStats stats;
  ojson extra = ojson::object();  // mode-specific (oracle permutation counts)
};

enum class ReportFormat { text, json };

ojson report_to_json(const Report& r);
Report parse_report(const std::string& json_text);
std::string render_report(const Report& r, ReportFormat format);

bool operator==(const Report& a, const Report& b);
inline bool operator!=(const Report& a, const Report& b) { return !(a == b); }

/// First few structural differences between two rendered states, as
/// {"path", "left", "right"} entries.
std::vector<ojson> json_diff(const ojson& a, const ojson& b, std::size_t cap = 5);

// ---- datatype dispatch ------------------------------------------------------

template <typename F>
auto with_datatype(Datatype dt, F&& f) {
  switch (dt) {
    case Datatype::counter: return f(Counter{});
    case Datatype::orset: return f(OrSet{});
    case Datatype::rga: return f(Rga{});
  }
  throw ConfigError("unhandled datatype");
}

// ---- random operation generators -------------------------------------------

template <typename D>
struct OpGen;

template <>
struct OpGen<Counter> {
  static CounterOp random(const World<Counter>&, std::size_t, Rng& rng) {
    return rng.chance(0.5) ? CounterOp::increment() : CounterOp::decrement();
  }
};

template <>
struct OpGen<OrSet> {
  static OrSetOp random(const World<OrSet>& w, std::size_t node, Rng& rng) {
    static const std::vector<std::string> alphabet = {"a", "b", "c"};
    const std::string& elem = rng.pick(alphabet);
    if (rng.chance(0.6)) {
      return OrSetOp::add(w.next_message_id(node), elem);
    }
    // removes exactly what this node has observed, possibly nothing
    return OrSetOp::rem(w.nodes[node].state.tags_of(elem), elem);
  }
};

template <>
struct OpGen<Rga> {
  static RgaOp random(const World<Rga>& w, std::size_t node, Rng& rng) {
    static const std::string letters = "abcdefghij";
    const auto& elements = w.nodes[node].state.elements;
    const bool insert = elements.empty() || rng.chance(0.7);
    if (insert) {
      RgaElt element;
      element.id = w.next_message_id(node);
      element.value = std::string(1, letters[rng.below(letters.size())]);
      std::optional<LamportId> after;
      if (!elements.empty() && rng.chance(0.7)) {
        // tombstones are legitimate anchors, so draw from all cells
        after = elements[rng.below(elements.size())].id;
      }
      return RgaOp::insert(element, after);
    }
    return RgaOp::erase(elements[rng.below(elements.size())].id);
  }
};

// ---- engine -----------------------------------------------------------------

/// Wraps a World with trace emission and action bookkeeping so the random driver,
/// scripted runs, and replay all go through one code path.
template <typename D>
struct Engine {
  using Op = typename D::Op;
  using Msg = Message<Op>;

  World<D> world;
  std::uint64_t drops = 0;
  Trace* trace = nullptr;  // optional action log, appended in execution order

  Engine(std::size_t nodes, std::uint64_t seed, Trace* trace_out)
      : world(World<D>::make(nodes, seed)), trace(trace_out) {
    if (trace) {
      trace->datatype = parse_datatype(D::name);
      trace->nodes = nodes;
      trace->records.clear();
    }
  }

  void record(ojson rec) {
    if (trace) trace->records.push_back(std::move(rec));
  }

  template <typename Validity = bool (*)(const typename D::State&, const Msg&)>
  Msg broadcast(std::size_t node, const Op& op, Validity valid = &D::valid) {
    Msg msg = world.broadcast(node, op, valid);
    record(broadcast_record(node, message_to_json(msg)));
    return msg;
  }

  // by value: delivery erases the pending-map entry callers often point into
  void deliver(std::size_t node, Msg msg) {
    world.deliver(node, msg.id);
    record(deliver_record(node, message_to_json(msg)));
  }

  void drop(std::size_t node, const LamportId& id) {
    world.inject_fault(Fault::drop(node, id));
    ++drops;
    record(drop_record(node, id));
  }

  void crash(std::size_t node) {
    world.inject_fault(Fault::crash(node));
    record(crash_record(node));
  }

  void partition(const std::set<std::size_t>& side) {
    world.inject_fault(Fault::partition(side));
    record(partition_record(side));
  }

  void heal() {
    world.inject_fault(Fault::heal());
    record(heal_record());
  }
};

// ---- datatype-specific world audits ----------------------------------------

/// Discharges the reference preconditions over a recorded run: every broadcast
/// insert anchors at a cell its sender had already delivered, and every broadcast
/// delete targets one. Returns a description of the first violation.
inline std::optional<std::string> audit_rga_references(const World<Rga>& w) {
  for (std::size_t n = 0; n < w.nodes.size(); ++n) {
    std::set<LamportId> seen;  // ids of inserts delivered at this node so far
    for (const auto& e : w.nodes[n].history) {
      if (e.kind == EventKind::deliver) {
        if (e.message.op.kind == RgaOpKind::insert) {
          seen.insert(e.message.op.element.id);
        }
        continue;
      }
      const RgaOp& op = e.message.op;
      if (op.kind == RgaOpKind::insert && op.after && !seen.count(*op.after)) {
        return "node " + std::to_string(n) + " broadcast insert " +
               to_string(e.message.id) + " anchored at unseen cell " +
               to_string(*op.after);
      }
      if (op.kind == RgaOpKind::erase && !seen.count(op.target)) {
        return "node " + std::to_string(n) + " broadcast delete of unseen cell " +
               to_string(op.target);
      }
    }
  }
  return std::nullopt;
}

/// Discharges add/remove independence over a recorded run: no node delivers a
/// concurrent Add/Rem pair where the Rem claims the Add's tag; and every tag in a
/// node's state at any point was put there by a delivered Add.
inline std::optional<std::string> audit_orset_independence(const World<OrSet>& w) {
  HbIndex<OrSetOp> hb = make_hb_index(w);
  for (std::size_t n = 0; n < w.nodes.size(); ++n) {
    const auto delivered = node_deliver_messages(w.nodes[n].history);
    for (std::size_t i = 0; i < delivered.size(); ++i) {
      for (std::size_t j = 0; j < delivered.size(); ++j) {
        const auto& add = delivered[i];
        const auto& rem = delivered[j];
        if (add.op.kind != OrSetOpKind::add || rem.op.kind != OrSetOpKind::rem) {
          continue;
        }
        if (hb.compare(add, rem) == Precedence::concurrent &&
            rem.op.ids.count(add.op.id)) {
          return "node " + std::to_string(n) + ": concurrent add " +
                 to_string(add.id) + " / rem " + to_string(rem.id) +
                 " but the rem claims the add's tag";
        }
      }
    }
    OrSetState state;
    std::set<LamportId> added;
    for (const auto& m : delivered) {
      if (m.op.kind == OrSetOpKind::add) added.insert(m.op.id);
      auto next = OrSet::interpret(m.op, state);
      if (!next) return "orset interpretation failed (it is total; impossible)";
      state = *next;
      for (const auto& [elem, tags] : state.tags) {
        for (const auto& tag : tags) {
          if (!added.count(tag)) {
            return "node " + std::to_string(n) + ": state tag " + to_string(tag) +
                   " for element '" + elem + "' has no delivered add";
          }
        }
      }
    }
  }
  return std::nullopt;
}

// ---- report assembly --------------------------------------------------------

template <typename D>
Report finish_report(const World<D>& w, std::uint64_t drops) {
  Report r;
  r.datatype = parse_datatype(D::name);
  for (const auto& slot : w.nodes) {
    r.per_node_final_states.push_back(state_to_json(slot.state));
    r.stats.delivers += node_deliver_messages(slot.history).size();
    for (const auto& e : slot.history) {
      if (e.kind == EventKind::broadcast) ++r.stats.broadcasts;
    }
  }
  r.stats.drops = drops;
  r.axioms = audit_axioms(w);
  r.sec = audit_sec_world(w);

  // Nodes that delivered the same message set must agree structurally.
  std::optional<ojson> divergence;
  std::map<std::set<LamportId>, std::size_t> representative;
  for (std::size_t n = 0; n < w.nodes.size() && !divergence; ++n) {
    auto [it, fresh] =
        representative.emplace(w.nodes[n].delivered_ids, n);
    if (fresh) continue;
    const std::size_t peer = it->second;
    if (!(w.nodes[peer].state == w.nodes[n].state)) {
      ojson wit = ojson::object();
      wit["nodes"] = ojson::array({peer, n});
      wit["diff"] = json_diff(state_to_json(w.nodes[peer].state),
                              state_to_json(w.nodes[n].state));
      divergence = wit;
    }
  }

  if (!r.axioms.all_ok()) {
    r.verdict = Verdict::axiom_violation;
    ojson wit = ojson::object();
    auto fill = [&](const char* name, const AxiomCheck& check) {
      if (!check.ok && wit.empty()) {
        wit["axiom"] = name;
        wit["detail"] = check.witness;
      }
    };
    fill("histories_distinct", r.axioms.histories_distinct);
    fill("delivery_has_a_cause", r.axioms.delivery_has_a_cause);
    fill("deliver_locally", r.axioms.deliver_locally);
    fill("msg_id_unique", r.axioms.msg_id_unique);
    fill("causal_delivery", r.axioms.causal_delivery);
    fill("broadcast_only_valid_msgs", r.axioms.broadcast_only_valid_msgs);
    r.witness = wit;
  } else if (!w.violations.empty()) {
    r.verdict = Verdict::interpretation_failure;
    ojson wit = ojson::object();
    wit["node"] = w.violations.front().node;
    wit["message-id"] = id_to_json(w.violations.front().message);
    wit["detail"] = w.violations.front().detail;
    r.witness = wit;
  } else if (divergence) {
    r.verdict = Verdict::diverged;
    r.witness = divergence;
  } else {
    r.verdict = Verdict::converged;
  }
  return r;
}

// ---- scripted execution -----------------------------------------------------

/// Applies trace records to an engine in order. Records produced by emission carry
/// message ids and clocks, which are checked against the deterministic
/// recomputation; hand-written scripts may omit them on broadcasts.
template <typename D>
void run_script(Engine<D>& engine, const std::vector<ojson>& records) {
  using Op = typename D::Op;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const ojson& rec = records[k];
    const std::string context = "record " + std::to_string(k + 1);
    try {
      const std::string action = rec.at("action").get<std::string>();
      if (action == "broadcast") {
        const std::size_t node = rec.at("node").get<std::size_t>();
        Op op = op_from_json<Op>(rec.at("operation"));
        Message<Op> sent = engine.broadcast(node, op);
        if (rec.contains("message-id") &&
            id_from_json(rec.at("message-id")) != sent.id) {
          throw IllegalAction("broadcast id mismatch: trace says " +
                              to_string(id_from_json(rec.at("message-id"))) +
                              ", execution produced " + to_string(sent.id));
        }
        if (rec.contains("clock") &&
            !(clock_from_json(rec.at("clock")) == sent.clock)) {
          throw IllegalAction("broadcast clock mismatch for " + to_string(sent.id));
        }
      } else if (action == "deliver") {
        const std::size_t node = rec.at("node").get<std::size_t>();
        const LamportId id = id_from_json(rec.at("message-id"));
        const auto& pending = engine.world.nodes.at(node).pending;
        auto it = pending.find(id);
        if (it == pending.end()) {
          throw IllegalAction("message " + to_string(id) +
                              " is not in flight to node " + std::to_string(node));
        }
        engine.deliver(node, it->second);
      } else if (action == "drop") {
        engine.drop(rec.at("node").get<std::size_t>(),
                    id_from_json(rec.at("message-id")));
      } else if (action == "crash") {
        engine.crash(rec.at("node").get<std::size_t>());
      } else if (action == "partition") {
        std::set<std::size_t> side;
        for (const auto& n : rec.at("nodes")) side.insert(n.get<std::size_t>());
        engine.partition(side);
      } else if (action == "heal") {
        engine.heal();
      } else {
        throw IllegalAction("unknown action '" + action + "'");
      }
    } catch (const IllegalAction& e) {
      throw IllegalAction(context + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(context + ": " + e.what());
    } catch (const Error& e) {
      throw IllegalAction(context + ": " + e.what());
    }
  }
}

// ---- random driver ----------------------------------------------------------

template <typename D>
Report run_fuzz_typed(const Scenario& s, Trace* trace_out) {
  Engine<D> engine(s.nodes, s.seed, trace_out);
  World<D>& w = engine.world;

  if (s.script) {
    run_script(engine, s.script->records);
    return finish_report(w, engine.drops);
  }

  Rng rng(s.seed);
  std::size_t budget = s.op_budget;
  int partition_toggles = 4;  // bounds fault-only livelock

  auto alive_nodes = [&] {
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < w.size(); ++n) {
      if (!w.is_failed(n)) out.push_back(n);
    }
    return out;
  };
  auto deliverable_pairs = [&] {
    std::vector<std::pair<std::size_t, Message<typename D::Op>>> out;
    for (std::size_t n = 0; n < w.size(); ++n) {
      for (auto& m : w.deliverable(n)) out.emplace_back(n, std::move(m));
    }
    return out;
  };

  while (true) {
    const auto alive = alive_nodes();
    const auto ready = deliverable_pairs();
    const bool can_broadcast = budget > 0 && !alive.empty();

    const double roll = rng.unit();
    if (roll < s.faults.drop) {
      std::vector<std::pair<std::size_t, LamportId>> droppable;
      for (std::size_t n = 0; n < w.size(); ++n) {
        if (w.is_failed(n)) continue;
        for (const auto& [id, msg] : w.nodes[n].pending) droppable.emplace_back(n, id);
      }
      if (!droppable.empty()) {
        const auto& [node, id] = droppable[rng.below(droppable.size())];
        engine.drop(node, id);
        continue;
      }
    } else if (roll < s.faults.drop + s.faults.crash) {
      if (alive.size() > 1) {
        engine.crash(alive[rng.below(alive.size())]);
        continue;
      }
    } else if (roll < s.faults.drop + s.faults.crash + s.faults.partition) {
      if (budget > 0 && partition_toggles > 0 && w.size() >= 2) {
        --partition_toggles;
        if (w.partition) {
          engine.heal();
        } else {
          std::vector<std::size_t> order(w.size());
          for (std::size_t n = 0; n < w.size(); ++n) order[n] = n;
          for (std::size_t n = order.size() - 1; n > 0; --n) {
            std::swap(order[n], order[rng.below(n + 1)]);
          }
          std::set<std::size_t> side(order.begin(),
                                     order.begin() + 1 + rng.below(w.size() - 1));
          engine.partition(side);
        }
        continue;
      }
    }

    if (can_broadcast && (ready.empty() || rng.chance(0.5))) {
      const std::size_t node = alive[rng.below(alive.size())];
      engine.broadcast(node, OpGen<D>::random(w, node, rng));
      --budget;
      continue;
    }
    if (!ready.empty()) {
      const auto& [node, msg] = ready[rng.below(ready.size())];
      engine.deliver(node, msg);
      continue;
    }
    if (w.partition) {
      // nothing can move until the cut heals; heal and drain what is left
      engine.heal();
      continue;
    }
    break;  // quiescent: budget spent or unusable, nothing deliverable
  }

  return finish_report(w, engine.drops);
}

Report run_fuzz(const Scenario& s, Trace* trace_out = nullptr);

// ---- replay -----------------------------------------------------------------

template <typename D>
Report replay_trace_typed(const Trace& trace) {
  Engine<D> engine(trace.nodes, 0, nullptr);
  run_script(engine, trace.records);
  return finish_report(engine.world, engine.drops);
}

Report replay_trace(const Trace& trace);
Report replay_trace_file(const std::string& path);

/// Rebuilds a world from per-node event logs (file k holds node k's history) and
/// reports on it; used to audit and cross-check what a live mesh recorded.
Report replay_logs(const std::vector<std::string>& paths);

template <typename D>
World<D> world_from_logs(const std::vector<Trace>& logs) {
  using Op = typename D::Op;
  World<D> w = World<D>::make(logs.size(), 0);
  for (std::size_t n = 0; n < logs.size(); ++n) {
    NodeSlot<D>& slot = w.nodes[n];
    for (std::size_t k = 0; k < logs[n].records.size(); ++k) {
      const ojson& rec = logs[n].records[k];
      const std::string context =
          "log " + std::to_string(n) + ", record " + std::to_string(k + 1);
      std::string action;
      try {
        action = rec.at("action").get<std::string>();
        if (action != "broadcast" && action != "deliver") {
          throw ParseError("event logs may only contain broadcast/deliver records");
        }
        if (rec.at("node").get<std::size_t>() != n) {
          throw ParseError("record belongs to node " +
                           std::to_string(rec.at("node").get<std::size_t>()));
        }
        Message<Op> m = message_from_json<Op>(rec);
        Event<Op> e{action == "broadcast" ? EventKind::broadcast
                                          : EventKind::deliver,
                    std::move(m)};
        if (e.kind == EventKind::deliver) {
          slot.delivered_ids.insert(e.message.id);
          slot.clock.bump(e.message.id.node);
          if (e.message.id.counter > slot.lamport) {
            slot.lamport = e.message.id.counter;
          }
          auto next = D::interpret(e.message.op, slot.state);
          if (next) {
            slot.state = std::move(*next);
          } else {
            w.failed.insert(n);
            w.violations.push_back({n, e.message.id,
                                    "interpretation undefined for message " +
                                        to_string(e.message.id) + " at node " +
                                        std::to_string(n)});
          }
        }
        slot.history.push_back(std::move(e));
      } catch (const nlohmann::json::exception& err) {
        throw ParseError(context + ": " + err.what());
      } catch (const ParseError& err) {
        throw ParseError(context + ": " + err.what());
      }
    }
  }
  return w;
}

// ---- brute-force oracle -----------------------------------------------------

/// Message set plus an explicit precedence relation, the input to the enumeration
/// oracle. Precedence pairs are given on message ids; the transitive closure is
/// taken and must come out irreflexive.
template <typename D>
struct OracleCase {
  std::vector<Message<typename D::Op>> messages;
  std::vector<std::vector<bool>> precedes;  // closed: precedes[i][j] iff i comes first

  PrecedenceFn<Message<typename D::Op>> oracle() const {
    return [this](const Message<typename D::Op>& a,
                  const Message<typename D::Op>& b) {
      std::size_t i = index_of(a.id);
      std::size_t j = index_of(b.id);
      if (precedes[i][j]) return Precedence::first_precedes;
      if (precedes[j][i]) return Precedence::second_precedes;
      return Precedence::concurrent;
    };
  }

  std::size_t index_of(const LamportId& id) const {
    for (std::size_t i = 0; i < messages.size(); ++i) {
      if (messages[i].id == id) return i;
    }
    throw UnknownMessage("message " + to_string(id) + " not in oracle case");
  }
};

/// Closes the given edge set transitively; ConfigError if the closure has a cycle
/// (the relation must be a strict partial order).
std::vector<std::vector<bool>> close_precedence(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

/// Everything the exhaustive enumeration learned about one message set.
template <typename D>
struct Enumeration {
  std::uint64_t permutations = 0;
  // distinct outcomes, each with the first linear extension that produced it;
  // nullopt means the fold failed along that extension
  std::vector<std::pair<std::optional<typename D::State>, std::vector<LamportId>>>
      outcomes;
  std::vector<typename D::State> probe_states;  // all prefix-reachable, plus initial

  bool converged() const { return outcomes.size() <= 1; }
};

/// Enumerates every linear extension of the precedence order (exactly the
/// hb-consistent permutations of the set) and folds the interpretation along each,
/// sharing work across common prefixes. BoundExceeded when the set is larger than
/// the bound.
template <typename D>
Enumeration<D> enumerate_extensions(const OracleCase<D>& oc, std::size_t bound = 7) {
  using State = typename D::State;
  const std::size_t n = oc.messages.size();
  if (n > bound || n > 20) {
    throw BoundExceeded("oracle case has " + std::to_string(n) +
                        " messages, bound is " + std::to_string(std::min<std::size_t>(bound, 20)));
  }
  Enumeration<D> out;
  std::set<State> probe_set;
  auto add_probe = [&](const State& s) {
    if (probe_set.insert(s).second) out.probe_states.push_back(s);
  };
  add_probe(D::initial());

  std::vector<std::size_t> order;
  order.reserve(n);
  auto record_leaf = [&](const std::optional<State>& result) {
    ++out.permutations;
    for (const auto& [existing, witness] : out.outcomes) {
      if (existing == result) return;
    }
    std::vector<LamportId> ids;
    ids.reserve(order.size());
    for (std::size_t i : order) ids.push_back(oc.messages[i].id);
    out.outcomes.emplace_back(result, std::move(ids));
  };

  auto walk = [&](auto&& self, std::uint32_t placed,
                  const std::optional<State>& state) -> void {
    if (order.size() == n) {
      record_leaf(state);
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (placed & (1u << i)) continue;
      bool enabled = true;
      for (std::size_t j = 0; j < n; ++j) {
        if (oc.precedes[j][i] && !(placed & (1u << j))) {
          enabled = false;
          break;
        }
      }
      if (!enabled) continue;
      std::optional<State> next;
      if (state) {
        next = D::interpret(oc.messages[i].op, *state);
        if (next) add_probe(*next);
      }
      order.push_back(i);
      self(self, placed | (1u << i), next);
      order.pop_back();
    }
  };
  std::optional<State> initial = D::initial();
  walk(walk, 0, initial);
  return out;
}

template <typename D>
Report brute_force_typed(const OracleCase<D>& oc, std::size_t bound) {
  Enumeration<D> e = enumerate_extensions(oc, bound);
  Report r;
  r.datatype = parse_datatype(D::name);
  r.stats.broadcasts = oc.messages.size();
  r.extra["permutations"] = e.permutations;
  r.extra["distinct-outcomes"] = e.outcomes.size();

  // Audit the assumptions along one representative extension.
  if (!e.outcomes.empty()) {
    std::vector<Message<typename D::Op>> history;
    for (const auto& id : e.outcomes.front().second) {
      history.push_back(oc.messages[oc.index_of(id)]);
    }
    Interp<typename D::Op, typename D::State> interp = &D::interpret;
    r.sec = audit_sec({history}, oc.oracle(), interp, D::initial());
    r.stats.delivers = history.size();
  }

  bool failed_everywhere =
      e.outcomes.size() == 1 && !e.outcomes.front().first.has_value();
  if (e.converged() && !failed_everywhere) {
    r.verdict = Verdict::converged;
    if (!e.outcomes.empty() && e.outcomes.front().first) {
      r.per_node_final_states.push_back(state_to_json(*e.outcomes.front().first));
    }
  } else if (failed_everywhere) {
    r.verdict = Verdict::interpretation_failure;
    ojson wit = ojson::object();
    wit["detail"] = "every hb-consistent order fails interpretation";
    r.witness = wit;
  } else {
    r.verdict = Verdict::diverged;
    ojson wit = ojson::object();
    ojson sides = ojson::array();
    for (std::size_t k = 0; k < e.outcomes.size() && k < 2; ++k) {
      ojson side = ojson::object();
      ojson ids = ojson::array();
      for (const auto& id : e.outcomes[k].second) ids.push_back(id_to_json(id));
      side["order"] = ids;
      side["state"] = e.outcomes[k].first ? state_to_json(*e.outcomes[k].first)
                                          : ojson(nullptr);
      sides.push_back(side);
    }
    wit["orders"] = sides;
    if (e.outcomes.size() >= 2 && e.outcomes[0].first && e.outcomes[1].first) {
      wit["diff"] = json_diff(state_to_json(*e.outcomes[0].first),
                              state_to_json(*e.outcomes[1].first));
    }
    r.witness = wit;
  }
  return r;
}

/// Parsed oracle problem file: messages plus precedence pairs on ids.
struct OracleSpec {
  Datatype datatype = Datatype::counter;
  std::vector<ojson> messages;  // {"message-id", "operation"[, "clock"]}
  std::vector<std::pair<LamportId, LamportId>> precedes;
  std::size_t bound = 7;
};

OracleSpec parse_oracle_spec(const std::string& text, Datatype datatype,
                             std::size_t bound);
Report brute_force_convergence(const OracleSpec& spec);

}  // namespace crdtcheck
