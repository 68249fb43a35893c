#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ltbt/mc_naive.hpp"
#include "ltbt/mc_needdriven.hpp"
#include "ltbt/oracles.hpp"
#include "ltbt/parse.hpp"
#include "ltbt/partial_eval.hpp"

namespace ltbt {

enum class EquivalenceId {
  Trace,
  CompletedTrace,
  Failure,
  FailureTrace,
  Readiness,
  ReadyTrace,
  Simulation,
  CompletedSimulation,
  ReadySimulation,
  TwoNestedSimulation,
  Bisimulation,
  PossibleFutures,
};

inline std::vector<EquivalenceId> all_equivalences() {
  return {EquivalenceId::Trace,          EquivalenceId::CompletedTrace,
          EquivalenceId::Failure,        EquivalenceId::FailureTrace,
          EquivalenceId::Readiness,      EquivalenceId::ReadyTrace,
          EquivalenceId::Simulation,     EquivalenceId::CompletedSimulation,
          EquivalenceId::ReadySimulation, EquivalenceId::TwoNestedSimulation,
          EquivalenceId::Bisimulation,   EquivalenceId::PossibleFutures};
}

inline std::string equivalence_name(EquivalenceId eq) {
  switch (eq) {
    case EquivalenceId::Trace: return "trace";
    case EquivalenceId::CompletedTrace: return "completed_trace";
    case EquivalenceId::Failure: return "failure";
    case EquivalenceId::FailureTrace: return "failure_trace";
    case EquivalenceId::Readiness: return "readiness";
    case EquivalenceId::ReadyTrace: return "ready_trace";
    case EquivalenceId::Simulation: return "simulation";
    case EquivalenceId::CompletedSimulation: return "completed_simulation";
    case EquivalenceId::ReadySimulation: return "ready_simulation";
    case EquivalenceId::TwoNestedSimulation: return "two_nested_simulation";
    case EquivalenceId::Bisimulation: return "bisimulation";
    case EquivalenceId::PossibleFutures: return "possible_futures";
  }
  return "?";
}

inline std::optional<EquivalenceId> equivalence_from_name(std::string_view name) {
  for (EquivalenceId eq : all_equivalences())
    if (equivalence_name(eq) == name) return eq;
  return std::nullopt;
}

/// The containment hierarchy, stored as (finer, coarser) edges. Finer
/// means "implies". completed_simulation is not part of the original
/// picture; it sits between ready simulation and simulation.
inline std::vector<std::pair<EquivalenceId, EquivalenceId>> hierarchy_edges() {
  using E = EquivalenceId;
  return {
      {E::Bisimulation, E::TwoNestedSimulation},
      {E::TwoNestedSimulation, E::ReadySimulation},
      {E::TwoNestedSimulation, E::PossibleFutures},
      {E::ReadySimulation, E::ReadyTrace},
      {E::ReadySimulation, E::Simulation},
      {E::ReadyTrace, E::FailureTrace},
      {E::ReadyTrace, E::Readiness},
      {E::PossibleFutures, E::Readiness},
      {E::Readiness, E::Failure},
      {E::FailureTrace, E::Failure},
      {E::Failure, E::CompletedTrace},
      {E::CompletedTrace, E::Trace},
      {E::Simulation, E::Trace},
      {E::ReadySimulation, E::CompletedSimulation},  // not in the picture
      {E::CompletedSimulation, E::Simulation},       // not in the picture
  };
}

/// Reflexive-transitive closure of the stored hierarchy.
inline bool finer_or_equal(EquivalenceId fine, EquivalenceId coarse) {
  if (fine == coarse) return true;
  for (const auto& [f, c] : hierarchy_edges())
    if (f == fine && finer_or_equal(c, coarse)) return true;
  return false;
}

// --- formula construction -------------------------------------------------

namespace detail {

inline Formula dia(const Action& a, int i, Formula body) {
  return Formula::modal(a.name(), i, std::move(body));
}
inline Formula box_f(const Action& a, int i, Formula body) {
  return Formula::box(a.name(), i, std::move(body));
}

/// Subsets of the alphabet in increasing cardinality, then lexicographic
/// by action position.
inline std::vector<std::vector<Action>> subsets_by_size(const std::vector<Action>& alphabet) {
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 0; m < (1u << alphabet.size()); ++m) masks.push_back(m);
  std::sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
    int ca = __builtin_popcount(a), cb = __builtin_popcount(b);
    return ca != cb ? ca < cb : a < b;
  });
  std::vector<std::vector<Action>> out;
  for (std::uint32_t m : masks) {
    std::vector<Action> sub;
    for (std::size_t j = 0; j < alphabet.size(); ++j)
      if (m & (1u << j)) sub.push_back(alphabet[j]);
    out.push_back(std::move(sub));
  }
  return out;
}

}  // namespace detail

/// fail(A) = /\_{a in A} [a]_i false
inline Formula fail_predicate(const std::vector<Action>& refused, int i = 1) {
  std::vector<Formula> parts;
  for (const auto& a : refused) parts.push_back(detail::box_f(a, i, Formula::bottom(2)));
  return Formula::conj_all(parts, 2);
}

/// ready(A) = /\_{a in A} <a>_i true  &  /\_{a not in A} [a]_i false —
/// exactly the actions in A are enabled.
inline Formula ready_predicate(const std::vector<Action>& ready,
                               const std::vector<Action>& alphabet, int i = 1) {
  std::vector<Formula> parts;
  for (const auto& a : ready) parts.push_back(detail::dia(a, i, Formula::top(2)));
  for (const auto& a : alphabet) {
    bool in = false;
    for (const auto& r : ready) in |= r == a;
    if (!in) parts.push_back(detail::box_f(a, i, Formula::bottom(2)));
  }
  return Formula::conj_all(parts, 2);
}

/// deadlock_i = /\_{a in Act} [a]_i false
inline Formula deadlock_predicate(const std::vector<Action>& alphabet, int i = 1) {
  return fail_predicate(alphabet, i);
}

/// TemplateTrace(Mod, Pred):
///   \/_{phi in Pred} (mu F(X,Y). (X & Y) \/ \/_{Psi in Mod} F Psi B(Psi))
///                    phi  !swap(phi)
/// where B(Psi) = !swap(Psi)[!Y/X] with double negations removed, so the
/// result stays in the need-driven fragment. Mod entries are open in X;
/// every entry must be order 0.
inline Formula template_trace(const std::vector<Formula>& mod, const std::vector<Formula>& pred) {
  for (const auto& f : mod)
    if (order_of(f) != 0) throw type_error("Mod entry is not order 0", f.loc());
  for (const auto& f : pred)
    if (order_of(f) != 0) throw type_error("Pred entry is not order 0", f.loc());

  const LogicType p2 = LogicType::prop(2);
  const LogicType fn_type =
      LogicType::arrow(p2, Variance::Monotone, LogicType::arrow(p2, Variance::Monotone, p2));

  std::vector<Formula> disjuncts;
  for (const auto& phi : pred) {
    std::vector<Formula> body_parts{Formula::conj(Formula::var("X"), Formula::var("Y"))};
    for (const auto& psi : mod) {
      Formula second = simplify_neg(
          Formula::neg(substitute(swap_indices(psi), "X", Formula::neg(Formula::var("Y")))));
      body_parts.push_back(
          Formula::app(Formula::app(Formula::var("F"), psi), second));
    }
    Formula lam = Formula::lambda(
        "X", Variance::Monotone, p2,
        Formula::lambda("Y", Variance::Monotone, p2, Formula::disj_all(body_parts, 2)));
    Formula fix = Formula::mu("F", fn_type, lam);
    Formula second_init = simplify_neg(Formula::neg(swap_indices(phi)));
    disjuncts.push_back(Formula::app(Formula::app(fix, phi), second_init));
  }
  return Formula::disj_all(disjuncts, 2);
}

/// TemplateSim(Mod, Test) = mu X. Test \/ \/_{Psi in Mod} Psi, with Mod
/// entries open in X and Test closed, all order 0.
inline Formula template_sim(const std::vector<Formula>& mod, const Formula& test) {
  if (order_of(test) != 0) throw type_error("Test is not order 0", test.loc());
  for (const auto& f : mod)
    if (order_of(f) != 0) throw type_error("Mod entry is not order 0", f.loc());
  std::vector<Formula> parts{test};
  for (const auto& f : mod) parts.push_back(f);
  return Formula::mu("X", LogicType::prop(2), Formula::disj_all(parts, 2));
}

/// The testing formula phi_R: true on (P,Q) when P shows behaviour that
/// Q cannot reproduce under R. The alphabet bound guards the rows that
/// enumerate subsets of Act.
inline Formula tester_formula(EquivalenceId eq, const std::vector<Action>& alphabet,
                              std::size_t alphabet_bound = 4) {
  using E = EquivalenceId;
  auto var_x = [] { return Formula::var("X"); };
  std::vector<Formula> dia_mod;
  for (const auto& a : alphabet) dia_mod.push_back(detail::dia(a, 1, var_x()));
  std::vector<Formula> sim_mod;
  for (const auto& a : alphabet)
    sim_mod.push_back(detail::dia(a, 1, detail::box_f(a, 2, var_x())));

  const bool powerset_row = eq == E::Failure || eq == E::FailureTrace || eq == E::Readiness ||
                            eq == E::ReadyTrace || eq == E::ReadySimulation;
  if (powerset_row && alphabet.size() > alphabet_bound)
    throw error("alphabet bound exceeded: " + equivalence_name(eq) + " enumerates subsets of " +
                std::to_string(alphabet.size()) + " actions (bound " +
                std::to_string(alphabet_bound) + ")");

  switch (eq) {
    case E::Trace:
      return template_trace(dia_mod, {Formula::top(2)});

    case E::CompletedTrace:
      // The deadlock predicate alone compares completed-trace sets only;
      // the top disjunct adds the plain trace part the definition needs.
      return template_trace(dia_mod, {deadlock_predicate(alphabet, 1), Formula::top(2)});

    case E::Failure: {
      std::vector<Formula> pred;
      for (const auto& sub : detail::subsets_by_size(alphabet))
        pred.push_back(fail_predicate(sub, 1));
      return template_trace(dia_mod, pred);
    }

    case E::FailureTrace: {
      std::vector<Formula> mod = dia_mod;
      for (const auto& sub : detail::subsets_by_size(alphabet))
        mod.push_back(Formula::conj(var_x(), fail_predicate(sub, 1)));
      return template_trace(mod, {Formula::top(2)});
    }

    case E::Readiness: {
      std::vector<Formula> pred;
      for (const auto& sub : detail::subsets_by_size(alphabet))
        pred.push_back(ready_predicate(sub, alphabet, 1));
      return template_trace(dia_mod, pred);
    }

    case E::ReadyTrace: {
      std::vector<Formula> mod = dia_mod;
      for (const auto& sub : detail::subsets_by_size(alphabet))
        mod.push_back(Formula::conj(var_x(), ready_predicate(sub, alphabet, 1)));
      return template_trace(mod, {Formula::top(2)});
    }

    case E::Simulation:
      return template_sim(sim_mod, Formula::bottom(2));

    case E::CompletedSimulation:
      return template_sim(sim_mod, Formula::xor_(deadlock_predicate(alphabet, 1),
                                                 deadlock_predicate(alphabet, 2)));

    case E::ReadySimulation: {
      std::vector<Formula> tests;
      for (const auto& sub : detail::subsets_by_size(alphabet)) {
        Formula r1 = ready_predicate(sub, alphabet, 1);
        tests.push_back(Formula::xor_(r1, swap_indices(r1)));
      }
      return template_sim(sim_mod, Formula::disj_all(tests, 2));
    }

    case E::TwoNestedSimulation:
      return template_sim(sim_mod,
                          swap_indices(tester_formula(E::Simulation, alphabet, alphabet_bound)));

    case E::Bisimulation: {
      std::vector<Formula> mod = sim_mod;
      for (const auto& a : alphabet)
        mod.push_back(detail::dia(a, 2, detail::box_f(a, 1, var_x())));
      return template_sim(mod, Formula::bottom(2));
    }

    case E::PossibleFutures: {
      // (mu PF. \G1 G2 X. G1 (G2 X) \/ \/_a PF (<a>1 . G1) ([a]2 . G2) X)
      //   id id (phi_t \/ swap(phi_t))   — order 2, not evaluable here.
      const LogicType p2 = LogicType::prop(2);
      const LogicType t1 = LogicType::arrow(p2, Variance::Monotone, p2);
      const LogicType t2 = LogicType::arrow(
          t1, Variance::Monotone,
          LogicType::arrow(t1, Variance::Monotone, LogicType::arrow(p2, Variance::Monotone, p2)));
      auto compose = [&](int index, const Action& a, const std::string& g) {
        return Formula::lambda(
            "Z", Variance::Monotone, p2,
            index == 1 ? detail::dia(a, 1, Formula::app(Formula::var(g), Formula::var("Z")))
                       : detail::box_f(a, 2, Formula::app(Formula::var(g), Formula::var("Z"))));
      };
      std::vector<Formula> parts{
          Formula::app(Formula::var("G1"), Formula::app(Formula::var("G2"), Formula::var("W")))};
      for (const auto& a : alphabet)
        parts.push_back(Formula::app_all(
            Formula::var("PF"), {compose(1, a, "G1"), compose(2, a, "G2"), Formula::var("W")}));
      Formula body = Formula::lambda(
          "G1", Variance::Monotone, t1,
          Formula::lambda("G2", Variance::Monotone, t1,
                          Formula::lambda("W", Variance::Monotone, p2,
                                          Formula::disj_all(parts, 2))));
      Formula identity =
          Formula::lambda("Z", Variance::Monotone, p2, Formula::var("Z"));
      Formula phi_t = tester_formula(E::Trace, alphabet, alphabet_bound);
      Formula psi_t = Formula::disj(phi_t, swap_indices(phi_t));
      return Formula::app_all(Formula::mu("PF", t2, body), {identity, identity, psi_t});
    }
  }
  throw error("unknown equivalence");
}

/// The characterising formula !phi_R & !swap(phi_R): true on (P,Q) iff
/// P and Q are related by R.
inline Formula defining_formula(EquivalenceId eq, const std::vector<Action>& alphabet,
                                std::size_t alphabet_bound = 4) {
  Formula tester = tester_formula(eq, alphabet, alphabet_bound);
  return Formula::conj(Formula::neg(tester), Formula::neg(swap_indices(tester)));
}

// --- one-call checker ------------------------------------------------------

enum class Engine { Naive, NeedDriven, Treq, Oracle };

inline std::optional<Engine> engine_from_name(std::string_view name) {
  if (name == "naive") return Engine::Naive;
  if (name == "needdriven") return Engine::NeedDriven;
  if (name == "treq") return Engine::Treq;
  if (name == "oracle") return Engine::Oracle;
  return std::nullopt;
}

inline std::string engine_name(Engine e) {
  switch (e) {
    case Engine::Naive: return "naive";
    case Engine::NeedDriven: return "needdriven";
    case Engine::Treq: return "treq";
    case Engine::Oracle: return "oracle";
  }
  return "?";
}

/// Ground-truth verdict per Appendix A's definitions.
inline bool oracle_check(EquivalenceId eq, const Lts& l1, StateId p, const Lts& l2, StateId q) {
  using E = EquivalenceId;
  switch (eq) {
    case E::Trace: return trace_family_equivalent(l1, p, l2, q, TraceVariant::Trace);
    case E::CompletedTrace:
      return trace_family_equivalent(l1, p, l2, q, TraceVariant::CompletedTrace);
    case E::Failure: return trace_family_equivalent(l1, p, l2, q, TraceVariant::Failure);
    case E::FailureTrace:
      return trace_family_equivalent(l1, p, l2, q, TraceVariant::FailureTrace);
    case E::Readiness: return trace_family_equivalent(l1, p, l2, q, TraceVariant::Readiness);
    case E::ReadyTrace: return trace_family_equivalent(l1, p, l2, q, TraceVariant::ReadyTrace);
    case E::Simulation: return sim_family_equivalent(l1, p, l2, q, SimVariant::Plain);
    case E::CompletedSimulation:
      return sim_family_equivalent(l1, p, l2, q, SimVariant::Completed);
    case E::ReadySimulation: return sim_family_equivalent(l1, p, l2, q, SimVariant::Ready);
    case E::TwoNestedSimulation:
      return sim_family_equivalent(l1, p, l2, q, SimVariant::TwoNested);
    case E::Bisimulation: return sim_family_equivalent(l1, p, l2, q, SimVariant::Bisimulation);
    case E::PossibleFutures: return possible_futures_equivalent(l1, p, l2, q);
  }
  throw error("unknown equivalence");
}

struct CheckResult {
  bool equivalent = false;
  EvalStats stats;
};

/// Decides eq on (p,q) with the chosen engine. treq only decides trace;
/// the model-checking engines refuse the order-2 possible-futures row.
inline CheckResult check_equivalence(const Lts& l1, StateId p, const Lts& l2, StateId q,
                                     EquivalenceId eq, Engine engine,
                                     const EvalOptions& opts = {}) {
  l1.require_state(p);
  l2.require_state(q);
  CheckResult out;
  switch (engine) {
    case Engine::Oracle:
      out.equivalent = oracle_check(eq, l1, p, l2, q);
      return out;
    case Engine::Treq:
      if (eq != EquivalenceId::Trace)
        throw eval_error("engine treq only decides trace equivalence");
      out.equivalent = trace_equivalent(l1, p, l2, q, opts.node_budget);
      return out;
    case Engine::Naive:
    case Engine::NeedDriven: {
      if (eq == EquivalenceId::PossibleFutures)
        throw eval_error("possible_futures: order-2 formula not evaluable by this engine");
      if (!l1.same_alphabet(l2)) throw eval_error("the two LTS must share an alphabet");
      Formula phi = defining_formula(eq, l1.alphabet());
      Rel2 rel = engine == Engine::Naive
                     ? mc_rel(phi, {}, l1, l2, opts, &out.stats)
                     : mc_need_driven_rel(phi, {}, l1, l2, opts, &out.stats);
      out.equivalent = rel.test(p, q);
      return out;
    }
  }
  throw error("unknown engine");
}

}  // namespace ltbt
