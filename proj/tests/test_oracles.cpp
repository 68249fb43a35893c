#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ltbt/equivalences.hpp"
#include "ltbt/oracles.hpp"
#include "support/corpus.hpp"

using namespace ltbt;
using ltbt::test::build;

TEST_CASE("identical LTS: the diagonal sits inside every greatest simulation") {
  std::mt19937 rng{97};
  for (int it = 0; it < 20; ++it) {
    Lts l = gen_random_lts(1 + rng() % 4, 2, 0.1 + (rng() % 80) / 100.0, rng());
    for (SimVariant v : {SimVariant::Plain, SimVariant::Completed, SimVariant::Ready,
                         SimVariant::TwoNested, SimVariant::Bisimulation}) {
      Rel2 r = greatest_simulation(l, l, v);
      for (StateId s = 0; s < l.num_states(); ++s) CHECK(r.test(s, s));
    }
  }
}

TEST_CASE("running example: roots are bisimilar") {
  Lts l1 = ltbt::test::fig3_left(), l2 = ltbt::test::fig3_right();
  CHECK(sim_family_equivalent(l1, 0, l2, 0, SimVariant::Bisimulation));
  CHECK(trace_family_equivalent(l1, 0, l2, 0, TraceVariant::Trace));
  CHECK(possible_futures_equivalent(l1, 0, l2, 0));
}

TEST_CASE("a(b+c) vs ab+ac: trace equivalent, nothing finer") {
  Lts P = ltbt::test::a_bc(), Q = ltbt::test::ab_plus_ac();
  CHECK(trace_family_equivalent(P, 0, Q, 0, TraceVariant::Trace));
  CHECK(trace_family_equivalent(P, 0, Q, 0, TraceVariant::CompletedTrace));
  CHECK_FALSE(trace_family_equivalent(P, 0, Q, 0, TraceVariant::Failure));
  CHECK_FALSE(trace_family_equivalent(P, 0, Q, 0, TraceVariant::Readiness));
  // despite being the textbook "same traces" pair, the left root is not
  // simulated by the right one: after a, no branch offers both b and c
  CHECK_FALSE(sim_family_equivalent(P, 0, Q, 0, SimVariant::Plain));
  CHECK(greatest_simulation(Q, P, SimVariant::Plain).test(0, 0));
  CHECK_FALSE(greatest_simulation(P, Q, SimVariant::Plain).test(0, 0));
  CHECK_FALSE(sim_family_equivalent(P, 0, Q, 0, SimVariant::Bisimulation));
  CHECK_FALSE(possible_futures_equivalent(P, 0, Q, 0));
}

TEST_CASE("ab vs ab+a: similar but not bisimilar, trace but not completed-trace") {
  Lts P = ltbt::test::ab(), Q = ltbt::test::ab_plus_a();
  CHECK(sim_family_equivalent(P, 0, Q, 0, SimVariant::Plain));
  CHECK_FALSE(sim_family_equivalent(P, 0, Q, 0, SimVariant::Bisimulation));
  CHECK(trace_family_equivalent(P, 0, Q, 0, TraceVariant::Trace));
  CHECK_FALSE(trace_family_equivalent(P, 0, Q, 0, TraceVariant::CompletedTrace));
  CHECK_FALSE(trace_family_equivalent(P, 0, Q, 0, TraceVariant::Failure));
  CHECK_FALSE(sim_family_equivalent(P, 0, Q, 0, SimVariant::Completed));
}

TEST_CASE("completed-trace needs the trace part: loops with equal (empty) CT sets") {
  Lts U = ltbt::test::b_loop(), V = ltbt::test::b_loop_a_escape();
  CHECK_FALSE(trace_family_equivalent(U, 0, V, 0, TraceVariant::Trace));
  CHECK_FALSE(trace_family_equivalent(U, 0, V, 0, TraceVariant::CompletedTrace));
}

TEST_CASE("failures but not failure-trace: the four-action pair") {
  // left offers a{b}ce and a{f}cd as failure traces, right does not
  std::vector<std::string> acts{"a", "b", "c", "d", "e", "f"};
  Lts L = build(9,
                {{0, "a", 1},
                 {0, "a", 2},
                 {1, "b", 3},
                 {1, "c", 4},
                 {2, "c", 5},
                 {2, "f", 6},
                 {4, "d", 7},
                 {5, "e", 8}},
                acts);
  Lts R = build(9,
                {{0, "a", 1},
                 {0, "a", 2},
                 {1, "b", 3},
                 {1, "c", 4},
                 {2, "c", 5},
                 {2, "f", 6},
                 {4, "e", 7},
                 {5, "d", 8}},
                acts);
  CHECK(trace_family_equivalent(L, 0, R, 0, TraceVariant::Failure));
  CHECK_FALSE(trace_family_equivalent(L, 0, R, 0, TraceVariant::FailureTrace));
}

TEST_CASE("failures and failure-trace but not readiness: the ready-pair example") {
  std::vector<std::string> acts{"a", "b", "c"};
  Lts L = build(5, {{0, "a", 1}, {0, "a", 2}, {1, "b", 3}, {2, "c", 4}}, acts);
  Lts R = build(6, {{0, "a", 1}, {0, "a", 2}, {0, "a", 3}, {1, "b", 4}, {2, "b", 4},
                    {2, "c", 5}, {3, "c", 5}},
                acts);
  CHECK(trace_family_equivalent(L, 0, R, 0, TraceVariant::Failure));
  CHECK(trace_family_equivalent(L, 0, R, 0, TraceVariant::FailureTrace));
  CHECK_FALSE(trace_family_equivalent(L, 0, R, 0, TraceVariant::Readiness));
}

TEST_CASE("2-nested but not bisimilar: the deep example") {
  std::vector<std::string> acts{"a", "b", "c"};
  Lts L = build(8,
                {{0, "a", 1},
                 {0, "a", 2},
                 {1, "b", 3},
                 {2, "b", 4},
                 {2, "b", 5},
                 {3, "c", 6},
                 {4, "c", 7}},
                acts);
  Lts R = build(5, {{0, "a", 1}, {1, "b", 2}, {1, "b", 3}, {2, "c", 4}}, acts);
  CHECK(sim_family_equivalent(L, 0, R, 0, SimVariant::TwoNested));
  CHECK_FALSE(sim_family_equivalent(L, 0, R, 0, SimVariant::Bisimulation));
}

TEST_CASE("greatest simulations really are simulations") {
  std::mt19937 rng{101};
  for (int it = 0; it < 40; ++it) {
    auto [l1, l2] = ltbt::test::random_pair(rng);
    Rel2 r = greatest_simulation(l1, l2, SimVariant::Plain);
    bool transfer = true;
    r.for_each_pair([&](StateId p, StateId q) {
      for (ActionId a = 0; a < l1.alphabet().size(); ++a) {
        ActionId a2 = l2.require_action(l1.alphabet()[a].name());
        l1.successors(p, a).for_each([&](std::uint32_t pp) {
          bool matched = false;
          l2.successors(q, a2).for_each(
              [&](std::uint32_t qq) { matched = matched || r.test(pp, qq); });
          transfer = transfer && matched;
        });
      }
    });
    CHECK(transfer);
    // the bisimulation is the symmetric core: bisim <= sim n sim^-1
    Rel2 b = greatest_simulation(l1, l2, SimVariant::Bisimulation);
    Rel2 back = greatest_simulation(l2, l1, SimVariant::Plain);
    b.for_each_pair([&](StateId p, StateId q) {
      CHECK(r.test(p, q));
      CHECK(back.test(q, p));
    });
  }
}

TEST_CASE("oracles are reflexive and symmetric") {
  std::mt19937 rng{103};
  for (int it = 0; it < 15; ++it) {
    auto [l1, l2] = ltbt::test::random_pair(rng);
    for (StateId s = 0; s < l1.num_states(); ++s)
      for (EquivalenceId eq : all_equivalences()) CHECK(oracle_check(eq, l1, s, l1, s));
    StateId p = rng() % l1.num_states(), q = rng() % l2.num_states();
    for (EquivalenceId eq : all_equivalences())
      CHECK(oracle_check(eq, l1, p, l2, q) == oracle_check(eq, l2, q, l1, p));
  }
}

TEST_CASE("bounded enumeration: depth 0 accepts everything") {
  Lts l1 = ltbt::test::ab(), l2 = ltbt::test::a_bc();
  Lts l2b = ltbt::test::build(4, {{0, "a", 1}, {1, "b", 2}, {1, "b", 3}}, {"a", "b"});
  CHECK(bounded_enumeration_check(l1, 0, l2b, 0, BoundedVariant::Trace, 0));
}

TEST_CASE("bounded enumeration agrees with the subset construction") {
  Lts l1 = ltbt::test::fig3_left(), l2 = ltbt::test::fig3_right();
  CHECK(bounded_enumeration_check(l1, 0, l2, 0, BoundedVariant::Trace, 6));
  CHECK_FALSE(bounded_enumeration_check(l1, 1, l2, 0, BoundedVariant::Trace, 6));

  std::mt19937 rng{107};
  for (int it = 0; it < 50; ++it) {
    auto [lt1, lt2] = ltbt::test::random_pair(rng);
    for (auto [bv, tv] :
         std::vector<std::pair<BoundedVariant, TraceVariant>>{
             {BoundedVariant::Trace, TraceVariant::Trace},
             {BoundedVariant::CompletedTrace, TraceVariant::CompletedTrace},
             {BoundedVariant::Failure, TraceVariant::Failure},
             {BoundedVariant::Readiness, TraceVariant::Readiness},
             {BoundedVariant::FailureTrace, TraceVariant::FailureTrace},
             {BoundedVariant::ReadyTrace, TraceVariant::ReadyTrace}}) {
      CHECK(bounded_enumeration_check(lt1, 0, lt2, 0, bv, 6) ==
            trace_family_equivalent(lt1, 0, lt2, 0, tv));
    }
    CHECK(bounded_enumeration_check(lt1, 0, lt2, 0, BoundedVariant::PossibleFutures, 6) ==
          possible_futures_equivalent(lt1, 0, lt2, 0));
  }
}

TEST_CASE("bounded enumeration guards against explosion") {
  Lts big = gen_random_lts(20, 2, 0.2, 5);
  CHECK_THROWS_AS(bounded_enumeration_check(big, 0, big, 0, BoundedVariant::Trace, 6), error);
  Lts small = ltbt::test::ab();
  CHECK_THROWS_AS(bounded_enumeration_check(small, 0, small, 0, BoundedVariant::Trace, 9),
                  error);
}

TEST_CASE("possible futures distinguishes the readiness example") {
  // a(b+c)+ab vs a(b+c): readiness-inequivalent and also pf-inequivalent
  std::vector<std::string> acts{"a", "b", "c"};
  Lts L = build(6, {{0, "a", 1}, {1, "b", 2}, {1, "c", 3}, {0, "a", 4}, {4, "b", 5}}, acts);
  Lts R = build(4, {{0, "a", 1}, {1, "b", 2}, {1, "c", 3}}, acts);
  CHECK_FALSE(trace_family_equivalent(L, 0, R, 0, TraceVariant::Readiness));
  CHECK_FALSE(possible_futures_equivalent(L, 0, R, 0));
  CHECK(bounded_enumeration_check(L, 0, R, 0, BoundedVariant::PossibleFutures, 2) == false);
}
