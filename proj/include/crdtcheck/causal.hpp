#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace crdtcheck {

/// Answer of a precedence oracle for an ordered pair (a, b).
enum class Precedence {
  first_precedes,   // a happened before b
  second_precedes,  // b happened before a
  concurrent,       // neither
};

/// Decision procedure for the happens-before relation on messages. Must behave as a
/// strict partial order: irreflexive, transitive, and therefore antisymmetric.
template <typename M>
using PrecedenceFn = std::function<Precedence(const M&, const M&)>;

template <typename M>
bool precedes(const PrecedenceFn<M>& oracle, const M& a, const M& b) {
  return oracle(a, b) == Precedence::first_precedes;
}

template <typename M>
bool concurrent(const PrecedenceFn<M>& oracle, const M& a, const M& b) {
  return oracle(a, b) == Precedence::concurrent;
}

/// True iff the sequence never places an effect before its cause: for every earlier
/// element x and later element y, y does not precede x. Checking all pairs is exactly
/// the closed form of the inductive definition (append y to xs requires no x in xs
/// with y before x), and it makes the property prefix-closed by construction.
template <typename M>
bool hb_consistent(const std::vector<M>& seq, const PrecedenceFn<M>& oracle) {
  for (std::size_t j = 1; j < seq.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (oracle(seq[i], seq[j]) == Precedence::second_precedes) return false;
    }
  }
  return true;
}

/// As hb_consistent, but reports the first offending (earlier, later) index pair.
template <typename M>
std::optional<std::pair<std::size_t, std::size_t>> hb_violation(
    const std::vector<M>& seq, const PrecedenceFn<M>& oracle) {
  for (std::size_t j = 1; j < seq.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (oracle(seq[i], seq[j]) == Precedence::second_precedes) {
        return std::make_pair(i, j);
      }
    }
  }
  return std::nullopt;
}

}  // namespace crdtcheck
