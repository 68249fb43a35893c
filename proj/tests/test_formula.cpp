#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ltbt/parse.hpp"
#include "support/randform.hpp"

using namespace ltbt;

TEST_CASE("parse: atoms and connectives") {
  Formula t = parse_formula("true");
  CHECK(t.kind() == Kind::Top);
  CHECK(t.node().dim == 2);

  Formula f = parse_formula("false");
  CHECK(f.is_bottom());

  Formula o = parse_formula("true | false");
  Formula l, r;
  CHECK(o.match_or(l, r));
  CHECK(l.kind() == Kind::Top);
  CHECK(r.is_bottom());
}

TEST_CASE("parse: modalities and boxes desugar") {
  Formula d = parse_formula("<a>1 true");
  CHECK(d.kind() == Kind::Modal);
  CHECK(d.node().index == 1);

  Formula b = parse_formula("[out]2 true");
  std::string action;
  int index;
  Formula body;
  CHECK(b.match_box(action, index, body));
  CHECK(action == "out");
  CHECK(index == 2);
  // [a]i phi is !<a>i !phi
  CHECK(b.kind() == Kind::Neg);
  CHECK(b.child_a().kind() == Kind::Modal);
}

TEST_CASE("parse: the trace tester literal") {
  Formula phi = parse_formula(
      "(mu F(X:+,Y:+):P2->P2->P2. (X & Y) | F <a>1 X [a]2 Y | F <b>1 X [b]2 Y) true false");
  std::vector<Formula> args;
  Formula head = phi.spine_head(&args);
  REQUIRE(args.size() == 2);
  CHECK(args[0].kind() == Kind::Top);
  CHECK(args[1].is_bottom());
  REQUIRE(head.kind() == Kind::Mu);
  CHECK(head.node().type.arity() == 2);
  // parameter sugar desugars to a lambda chain
  CHECK(head.child_a().kind() == Kind::Lambda);
  CHECK(head.child_a().child_a().kind() == Kind::Lambda);
}

TEST_CASE("parse: mu with plain annotation") {
  Formula m = parse_formula("mu X:P2. <a>1 X");
  REQUIRE(m.kind() == Kind::Mu);
  CHECK(m.node().type == LogicType::prop(2));
  CHECK(m.child_a().kind() == Kind::Modal);
}

TEST_CASE("parse: errors carry positions") {
  try {
    parse_formula("true &\n& false");
    FAIL("expected a parse error");
  } catch (const parse_error& e) {
    CHECK(e.loc.line == 2);
  }
  CHECK_THROWS_AS(parse_formula("x"), parse_error);     // unbound variable
  CHECK_THROWS_AS(parse_formula("<a> true"), parse_error);  // missing index
  CHECK_THROWS_AS(parse_formula("mu X:Q2. X"), parse_error);
}

TEST_CASE("parse: application groups prefix chains") {
  std::set<std::string> fv{"F", "X", "Y"};
  Formula f = parse_formula("F <a>1 X [a]2 Y", 2, fv);
  std::vector<Formula> args;
  Formula head = f.spine_head(&args);
  CHECK(head.node().name == "F");
  REQUIRE(args.size() == 2);
  CHECK(args[0].kind() == Kind::Modal);
  CHECK(args[1].kind() == Kind::Neg);  // desugared box
}

TEST_CASE("parse: alpha-renaming keeps binders unique") {
  Formula f = parse_formula("(mu X:P2. <a>1 X) & (mu X:P2. <b>1 X)");
  Formula l = f.child_a(), r = f.child_b();
  CHECK(l.kind() == Kind::Mu);
  CHECK(r.kind() == Kind::Mu);
  CHECK(l.node().name != r.node().name);
}

TEST_CASE("parse: nu is a macro over mu") {
  // nu X. <a>1 X  =  !mu X. !<a>1 !X  — the greatest a-loop predicate
  Formula f = parse_formula("nu X:P2. <a>1 X");
  CHECK(f.kind() == Kind::Neg);
  CHECK(f.child_a().kind() == Kind::Mu);
  CHECK_THROWS_AS(parse_formula("nu F:P2->P2. F"), parse_error);
}

TEST_CASE("parse: xor and implication desugar") {
  Formula x = parse_formula("true ^ false");
  Formula l, r;
  CHECK(x.match_or(l, r));
  CHECK(l.kind() == Kind::And);
  Formula i = parse_formula("false -> true");
  CHECK(i.match_or(l, r));
}

TEST_CASE("swap exchanges the two modal indices") {
  Formula d = parse_formula("<a>1 true");
  Formula s = swap_indices(d);
  CHECK(s.node().index == 2);
  CHECK(swap_indices(s) == d);

  std::mt19937 rng{3};
  std::vector<Action> ab{Action("a"), Action("b")};
  for (int it = 0; it < 40; ++it) {
    Formula f = ltbt::test::random_closed_formula(rng, ab);
    CHECK(swap_indices(swap_indices(f)) == f);
  }
}

TEST_CASE("substitute: free occurrences only") {
  std::set<std::string> fv{"x"};
  Formula phi = parse_formula("x & true", 2, fv);
  Formula out = substitute(phi, "x", Formula::bottom(2));
  CHECK(out.child_a().is_bottom());

  // bound occurrences are untouched
  Formula lam = Formula::lambda("x", Variance::Monotone, LogicType::prop(2), Formula::var("x"));
  CHECK(substitute(lam, "x", Formula::bottom(2)) == lam);
}

TEST_CASE("substitute avoids capture") {
  // (lambda y. x)[y/x] must rename the binder
  Formula lam = Formula::lambda("y", Variance::Monotone, LogicType::prop(2), Formula::var("x"));
  Formula out = substitute(lam, "x", Formula::var("y"));
  CHECK(out.node().name != "y");
  CHECK(out.child_a().node().name == "y");  // the substituted free y
}

TEST_CASE("print/parse round trip up to alpha renaming") {
  std::vector<std::string> texts{
      "true",
      "false",
      "!(true & false)",
      "<a>1 [b]2 true",
      "mu X:P2. false | <a>1 [a]2 X | <a>2 [a]1 X",
      "(mu F(X:+,Y:+):P2->P2->P2. (X & Y) | F <a>1 X [a]2 Y | F <b>1 X [b]2 Y) true false",
      "lambda x:+:P2. x",
      "lambda x:-:P2. true",
      "lambda f:+:P2->P2. f true",
      "mu X:P2. !(!X & ! <a>1 X)",
  };
  for (const auto& t : texts) {
    Formula f = parse_formula(t);
    Formula g = parse_formula(to_text(f));
    CHECK_MESSAGE(alpha_equal(f, g), "round trip failed for: ", t, " printed as ", to_text(f));
  }

  std::mt19937 rng{17};
  std::vector<Action> ab{Action("a"), Action("b")};
  for (int it = 0; it < 60; ++it) {
    Formula f = ltbt::test::random_closed_formula(rng, ab);
    Formula g = parse_formula(to_text(f));
    CHECK(alpha_equal(f, g));
  }
}

TEST_CASE("simplify_neg removes double negations") {
  Formula f = Formula::neg(Formula::neg(Formula::top(2)));
  CHECK(simplify_neg(f).kind() == Kind::Top);
  Formula g = Formula::neg(Formula::modal("a", 2, Formula::neg(Formula::neg(Formula::var("Y")))));
  Formula s = simplify_neg(g);
  CHECK(s.child_a().child_a().kind() == Kind::Var);
}

TEST_CASE("types: order and normal form") {
  LogicType p2 = LogicType::prop(2);
  CHECK(p2.order() == 0);
  LogicType t1 = LogicType::arrow(p2, Variance::Monotone, p2);
  CHECK(t1.order() == 1);
  CHECK(t1.arity() == 1);
  LogicType t2 = LogicType::arrow(t1, Variance::Monotone, LogicType::arrow(p2, Variance::Monotone, p2));
  CHECK(t2.order() == 2);
  CHECK(t2.arity() == 2);
  CHECK(t2.final_dim() == 2);
  CHECK(negate(Variance::Monotone) == Variance::Antitone);
  CHECK(negate(Variance::Arbitrary) == Variance::Arbitrary);
}
