#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crdtcheck/causal.hpp"
#include "crdtcheck/errors.hpp"
#include "crdtcheck/message.hpp"

namespace crdtcheck {

/// Partial state update: nullopt signals that the operation is undefined at the
/// input state (the failure the no-failure audit watches for).
template <typename State>
using StateTransformer = std::function<std::optional<State>(const State&)>;

/// Interpretation of a datatype: maps an operation to a partial state transformer.
template <typename Op, typename State>
using Interp = std::function<std::optional<State>(const Op&, const State&)>;

template <typename State>
StateTransformer<State> kleisli_unit() {
  return [](const State& s) { return std::optional<State>(s); };
}

/// Kleisli composition over the option monad: run f, and if it produced a state,
/// feed that state to g. Failure anywhere makes the whole pipeline fail.
template <typename State>
StateTransformer<State> kleisli_compose(StateTransformer<State> f,
                                        StateTransformer<State> g) {
  return [f = std::move(f), g = std::move(g)](const State& s) -> std::optional<State> {
    auto mid = f(s);
    if (!mid) return std::nullopt;
    return g(*mid);
  };
}

/// Left fold of interpreted operations over the initial state. Composing the list
/// into one transformer and folding element by element agree; the fold is used so
/// intermediate states are cheap to observe.
template <typename Op, typename State>
std::optional<State> apply_operations(const std::vector<Op>& ops, const State& initial,
                                      const Interp<Op, State>& interp) {
  std::optional<State> acc = initial;
  for (const auto& op : ops) {
    acc = interp(op, *acc);
    if (!acc) return std::nullopt;
  }
  return acc;
}

/// As apply_operations, but over broadcast messages (the payload is interpreted).
template <typename Op, typename State>
std::optional<State> apply_messages(const std::vector<Message<Op>>& msgs,
                                    const State& initial,
                                    const Interp<Op, State>& interp) {
  std::optional<State> acc = initial;
  for (const auto& m : msgs) {
    acc = interp(m.op, *acc);
    if (!acc) return std::nullopt;
  }
  return acc;
}

/// Counterexample from concurrent_ops_commute: the offending message pair (indices
/// into the checked sequence) and the probe state where the compositions differ.
template <typename State>
struct CommuteWitness {
  std::size_t first = 0;
  std::size_t second = 0;
  State probe;
};

/// Checks that for every concurrent pair of messages x, y and every probe state s,
/// applying x then y equals applying y then x (failures included: both orders must
/// fail together). Function equality is undecidable, so the check is grounded on the
/// supplied probe states; callers pass every prefix-reachable state of the execution
/// under scrutiny, which is exactly where the convergence argument rewrites adjacent
/// operations.
template <typename Op, typename State>
std::optional<CommuteWitness<State>> concurrent_ops_commute(
    const std::vector<Message<Op>>& msgs, const PrecedenceFn<Message<Op>>& oracle,
    const Interp<Op, State>& interp, const std::vector<State>& probes) {
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    for (std::size_t j = i + 1; j < msgs.size(); ++j) {
      if (oracle(msgs[i], msgs[j]) != Precedence::concurrent) continue;
      for (const auto& s : probes) {
        std::optional<State> xy = interp(msgs[i].op, s);
        if (xy) xy = interp(msgs[j].op, *xy);
        std::optional<State> yx = interp(msgs[j].op, s);
        if (yx) yx = interp(msgs[i].op, *yx);
        if (xy != yx) return CommuteWitness<State>{i, j, s};
      }
    }
  }
  return std::nullopt;
}

/// Compares the result of applying two orderings of the same message set. The two
/// sequences must contain exactly the same messages (SetMismatch otherwise); returns
/// true when both runs land on the same state, or both fail.
template <typename Op, typename State>
bool check_convergence(const std::vector<Message<Op>>& xs,
                       const std::vector<Message<Op>>& ys, const State& initial,
                       const Interp<Op, State>& interp) {
  auto a = xs;
  auto b = ys;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) {
    throw SetMismatch("check_convergence: sequences are not the same message set");
  }
  return apply_messages(xs, initial, interp) == apply_messages(ys, initial, interp);
}

/// Structured counterexample attached to a failed audit.
struct SecWitness {
  std::string assumption;            // which flag failed
  std::size_t node = 0;              // node whose sequence exhibits it
  std::vector<std::size_t> indices;  // offending positions within that sequence
  std::string detail;

  friend bool operator==(const SecWitness&, const SecWitness&) = default;
};

/// Discharge record for the five assumptions convergence rests on, evaluated over
/// concrete per-node delivery sequences.
struct SecVerdict {
  bool causality_ok = true;      // each node's deliveries are hb-consistent
  bool distinctness_ok = true;   // no node delivers the same message twice
  bool trunc_ok = true;          // every prefix passes the two checks above
  bool commutativity_ok = true;  // concurrent pairs commute on probe states
  bool no_failure_ok = true;     // no interpretation step is undefined
  std::optional<SecWitness> counterexample;

  bool all_ok() const {
    return causality_ok && distinctness_ok && trunc_ok && commutativity_ok &&
           no_failure_ok;
  }

  friend bool operator==(const SecVerdict&, const SecVerdict&) = default;
};

namespace detail {

template <typename M>
std::optional<std::pair<std::size_t, std::size_t>> first_duplicate(
    const std::vector<M>& seq) {
  for (std::size_t j = 1; j < seq.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (seq[i] == seq[j]) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Audits per-node delivery sequences against the assumptions the convergence result
/// needs. Probe states for the commutativity check are all prefix-reachable states of
/// the audited execution (every node, every prefix) plus the initial state; this is a
/// sound per-execution approximation of quantifying over all states.
template <typename Op, typename State>
SecVerdict audit_sec(const std::vector<std::vector<Message<Op>>>& histories,
                     const PrecedenceFn<Message<Op>>& oracle,
                     const Interp<Op, State>& interp, const State& initial) {
  SecVerdict v;
  auto witness = [&](SecWitness w) {
    if (!v.counterexample) v.counterexample = std::move(w);
  };

  for (std::size_t n = 0; n < histories.size(); ++n) {
    const auto& h = histories[n];
    if (auto bad = hb_violation(h, oracle); bad && v.causality_ok) {
      v.causality_ok = false;
      witness({"causality", n, {bad->first, bad->second},
               "delivered " + to_string(h[bad->second].id) + " after " +
                   to_string(h[bad->first].id) + " which it precedes"});
    }
    if (auto dup = detail::first_duplicate(h); dup && v.distinctness_ok) {
      v.distinctness_ok = false;
      witness({"distinctness", n, {dup->first, dup->second},
               "message " + to_string(h[dup->second].id) + " delivered twice"});
    }
  }

  // Literal prefix sweep: with the pairwise characterization this can only fire
  // where the full-sequence checks fired, but the audit states it directly.
  for (std::size_t n = 0; n < histories.size(); ++n) {
    const auto& h = histories[n];
    for (std::size_t len = 0; len <= h.size(); ++len) {
      std::vector<Message<Op>> prefix(h.begin(), h.begin() + len);
      if (!hb_consistent(prefix, oracle) || detail::first_duplicate(prefix)) {
        v.trunc_ok = false;
        witness({"trunc", n, {len}, "prefix of length " + std::to_string(len) +
                                        " fails causality or distinctness"});
        break;
      }
    }
    if (!v.trunc_ok) break;
  }

  // Probe states: initial plus every state reached by a prefix of any node's
  // delivery sequence (stopping at the first undefined step).
  std::vector<State> probes;
  std::set<State> seen;
  auto add_probe = [&](const State& s) {
    if (seen.insert(s).second) probes.push_back(s);
  };
  add_probe(initial);
  for (std::size_t n = 0; n < histories.size(); ++n) {
    std::optional<State> acc = initial;
    for (std::size_t k = 0; k < histories[n].size(); ++k) {
      acc = interp(histories[n][k].op, *acc);
      if (!acc) {
        if (v.no_failure_ok) {
          v.no_failure_ok = false;
          witness({"no_failure", n, {k},
                   "interpretation of " + to_string(histories[n][k].id) +
                       " undefined at the state reached before it"});
        }
        break;
      }
      add_probe(*acc);
    }
  }

  // Distinct messages across all nodes, in first-appearance order.
  std::vector<Message<Op>> universe;
  std::set<Message<Op>> known;
  for (const auto& h : histories) {
    for (const auto& m : h) {
      if (known.insert(m).second) universe.push_back(m);
    }
  }
  if (auto w = concurrent_ops_commute(universe, oracle, interp, probes)) {
    v.commutativity_ok = false;
    witness({"commutativity", 0, {w->first, w->second},
             "concurrent pair " + to_string(universe[w->first].id) + ", " +
                 to_string(universe[w->second].id) +
                 " disagrees on a reachable probe state"});
  }

  return v;
}

}  // namespace crdtcheck
