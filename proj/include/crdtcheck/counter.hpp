#pragma once

#include <compare>
#include <cstdint>
#include <optional>

#include "crdtcheck/message.hpp"

namespace crdtcheck {

enum class CounterOpKind { increment, decrement };

struct CounterOp {
  CounterOpKind kind = CounterOpKind::increment;

  static CounterOp increment() { return {CounterOpKind::increment}; }
  static CounterOp decrement() { return {CounterOpKind::decrement}; }

  friend bool operator==(const CounterOp&, const CounterOp&) = default;
  friend auto operator<=>(const CounterOp&, const CounterOp&) = default;
};

using CounterState = std::int64_t;

/// Increment/decrement counter. Interpretation is total and every message is valid;
/// addition commutes, so the final value depends only on the delivered multiset.
struct Counter {
  using Op = CounterOp;
  using State = CounterState;

  static constexpr const char* name = "counter";

  static State initial() { return 0; }

  static std::optional<State> interpret(const Op& op, const State& s) {
    return op.kind == CounterOpKind::increment ? s + 1 : s - 1;
  }

  static bool valid(const State&, const Message<Op>&) { return true; }
};

}  // namespace crdtcheck
