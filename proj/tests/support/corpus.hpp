#pragma once

// Shared LTS corpus and helpers for the test suites.

#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "ltbt/gen.hpp"
#include "ltbt/lts.hpp"

namespace ltbt::test {

inline Lts build(std::uint32_t n,
                 std::vector<std::tuple<StateId, std::string, StateId>> transitions,
                 std::vector<std::string> alphabet) {
  std::vector<Action> acts;
  for (auto& s : alphabet) acts.emplace_back(s);
  return Lts(n, acts, transitions);
}

// Left LTS of the need-driven running example: 0 <-b-> 1 with an a-loop
// on 1.
inline Lts fig3_left() { return build(2, {{0, "b", 1}, {1, "b", 0}, {1, "a", 1}}, {"a", "b"}); }

// Right LTS (states renumbered 2,3,4 -> 0,1,2).
inline Lts fig3_right() {
  return build(3, {{0, "b", 1}, {1, "a", 2}, {1, "b", 0}, {2, "b", 0}, {2, "a", 1}}, {"a", "b"});
}

inline Lts ab() { return build(3, {{0, "a", 1}, {1, "b", 2}}, {"a", "b"}); }
inline Lts ab_plus_a() { return build(4, {{0, "a", 1}, {1, "b", 2}, {0, "a", 3}}, {"a", "b"}); }

inline Lts a_bc() {
  return build(4, {{0, "a", 1}, {1, "b", 2}, {1, "c", 3}}, {"a", "b", "c"});
}
inline Lts ab_plus_ac() {
  return build(5, {{0, "a", 1}, {0, "a", 2}, {1, "b", 3}, {2, "c", 4}}, {"a", "b", "c"});
}

// A pair with equal completed-trace sets (both empty) but different
// traces: a b-loop versus a b-loop with an a-escape into a b-loop.
inline Lts b_loop() { return build(1, {{0, "b", 0}}, {"a", "b"}); }
inline Lts b_loop_a_escape() {
  return build(2, {{0, "b", 0}, {0, "a", 1}, {1, "b", 1}}, {"a", "b"});
}

/// Deterministic random LTS pair for cross-checks: sizes 1..max_n, two
/// actions, density in [0.15, 0.85).
inline std::pair<Lts, Lts> random_pair(std::mt19937& rng, std::uint32_t max_n = 3,
                                       std::uint32_t actions = 2) {
  std::uint32_t n1 = 1 + rng() % max_n, n2 = 1 + rng() % max_n;
  double d1 = 0.15 + (rng() % 70) / 100.0;
  double d2 = 0.15 + (rng() % 70) / 100.0;
  Lts l1 = gen_random_lts(n1, actions, d1, rng());
  Lts l2 = gen_random_lts(n2, actions, d2, rng());
  return {std::move(l1), std::move(l2)};
}

}  // namespace ltbt::test
