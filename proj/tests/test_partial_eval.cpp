#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ltbt/equivalences.hpp"
#include "ltbt/partial_eval.hpp"
#include "support/corpus.hpp"

using namespace ltbt;
using ltbt::test::fig3_left;
using ltbt::test::fig3_right;

static Rel2 rel_of_pairs(std::uint32_t n1, std::uint32_t n2,
                         std::vector<std::pair<StateId, StateId>> pairs) {
  Rel2 r(n1, n2);
  for (auto [p, q] : pairs) r.set(p, q);
  return r;
}

TEST_CASE("running example: treq root value") {
  Lts l1 = fig3_left(), l2 = fig3_right();
  CHECK(treq(l1, l2) == rel_of_pairs(2, 3, {{1, 0}, {0, 1}, {0, 2}}));
}

TEST_CASE("identical LTS: the diagonal never appears") {
  std::mt19937 rng{71};
  for (int it = 0; it < 30; ++it) {
    Lts l = gen_random_lts(1 + rng() % 4, 2, 0.1 + (rng() % 80) / 100.0, rng());
    Rel2 r = treq(l, l);
    for (StateId s = 0; s < l.num_states(); ++s) CHECK_FALSE(r.test(s, s));
  }
}

TEST_CASE("ab versus ab+a: roots are trace equivalent") {
  Lts t1 = ltbt::test::ab(), t2 = ltbt::test::ab_plus_a();
  CHECK_FALSE(treq(t1, t2).test(0, 0));
  CHECK_FALSE(treq(t2, t1).test(0, 0));
  CHECK(trace_equivalent(t1, 0, t2, 0));
}

TEST_CASE("running example: trace_equivalent verdicts") {
  Lts l1 = fig3_left(), l2 = fig3_right();
  CHECK(trace_equivalent(l1, 0, l2, 0));        // paper (0,2)
  CHECK_FALSE(trace_equivalent(l1, 1, l2, 0));  // paper (1,2)
}

TEST_CASE("treq agrees with the oracle on random pairs") {
  std::mt19937 rng{73};
  for (int it = 0; it < 500; ++it) {
    auto [l1, l2] = ltbt::test::random_pair(rng, 4);
    StateId p = rng() % l1.num_states(), q = rng() % l2.num_states();
    CHECK(trace_equivalent(l1, p, l2, q) ==
          trace_family_equivalent(l1, p, l2, q, TraceVariant::Trace));
  }
}

TEST_CASE("the dependency graph equals the need-driven engine's") {
  std::mt19937 rng{79};
  for (int it = 0; it < 40; ++it) {
    auto [l1, l2] = ltbt::test::random_pair(rng);
    TreqRun run = treq_run(l1, l2);

    ModalOps ops(l1, l2);
    EvalCtx C{ops, {}, {}, nullptr};
    Env env;
    auto res = analyze_fixpoint_call(tester_formula(EquivalenceId::Trace, l1.alphabet()));
    REQUIRE(std::holds_alternative<AnalyzedFixpoint>(res));
    DependencyGraph g = explore(std::get<AnalyzedFixpoint>(res), env, C);

    REQUIRE(g.nodes.size() == run.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      CHECK(g.nodes[i][0] == run.nodes[i].first);
      CHECK(g.nodes[i][1] == run.nodes[i].second);
    }
    CHECK(g.edges == run.edges);
    CHECK(g.root == run.root);
  }
}

TEST_CASE("three-way engine agreement") {
  std::mt19937 rng{83};
  for (int it = 0; it < 100; ++it) {
    auto [l1, l2] = ltbt::test::random_pair(rng);
    Formula phi = tester_formula(EquivalenceId::Trace, l1.alphabet());
    Rel2 a = mc_rel(phi, {}, l1, l2);
    Rel2 b = mc_need_driven_rel(phi, {}, l1, l2);
    Rel2 c = treq(l1, l2);
    CHECK(a == b);
    CHECK(b == c);
  }
}

TEST_CASE("values stabilize within the monotone bound") {
  std::mt19937 rng{89};
  for (int it = 0; it < 30; ++it) {
    auto [l1, l2] = ltbt::test::random_pair(rng);
    TreqRun run = treq_run(l1, l2);
    CHECK(std::size_t(run.rounds) <=
          std::size_t(l1.num_states()) * l2.num_states() * run.nodes.size() + 1);
    // re-applying the recurrence changes nothing
    for (std::size_t i = 0; i < run.nodes.size(); ++i) {
      Rel2 v = run.nodes[i].first & run.nodes[i].second;
      for (std::size_t a = 0; a < run.edges[i].size(); ++a) v |= run.values[run.edges[i][a]];
      CHECK(v == run.values[i]);
    }
  }
}

TEST_CASE("alphabet mismatch is rejected") {
  Lts l1 = ltbt::test::build(1, {}, {"a"});
  Lts l2 = ltbt::test::build(1, {}, {"a", "b"});
  CHECK_THROWS_AS(treq(l1, l2), eval_error);
}

TEST_CASE("a declared action missing from one LTS matters") {
  // over Act={a,b}: left has only a-steps, right has no b either; the
  // box over the unused action is vacuously full
  Lts l1 = ltbt::test::build(2, {{0, "a", 1}}, {"a", "b"});
  Lts l2 = ltbt::test::build(2, {{0, "a", 1}}, {"a", "b"});
  CHECK(trace_equivalent(l1, 0, l2, 0));
}
