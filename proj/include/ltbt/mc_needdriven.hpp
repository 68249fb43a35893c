#pragma once

#include <deque>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ltbt/mc_naive.hpp"

namespace ltbt {

/// One recursive call site of an analyzed fixpoint: the argument
/// transformer formulas, in body order.
struct CallSite {
  std::vector<Formula> args;
};

/// A fixpoint application (mu F(x1..xm). body) A1 .. Am brought into the
/// need-driven fragment: every occurrence of F heads a whole disjunct of
/// the body and is fully applied to F-free, parameter-only arguments.
struct AnalyzedFixpoint {
  std::string mu_name;
  int arity = 0;
  std::vector<std::string> params;
  std::vector<Formula> initial_args;
  std::vector<CallSite> sites;
  Formula residual;  // the F-free disjuncts (arity >= 1)
  Formula body;      // arity == 0: iterated directly
};

struct AnalyzeRejection {
  std::string reason;
  SourceLoc loc;
};

using AnalyzeResult = std::variant<AnalyzedFixpoint, AnalyzeRejection>;

namespace detail {

inline void flatten_disjuncts(const Formula& f, std::vector<Formula>& out) {
  Formula l, r;
  if (f.match_or(l, r)) {
    flatten_disjuncts(l, out);
    flatten_disjuncts(r, out);
  } else {
    out.push_back(f);
  }
}

inline int count_free_occurrences(const Formula& f, const std::string& x) {
  const FormulaNode& n = f.node();
  switch (n.kind) {
    case Kind::Top: return 0;
    case Kind::Var: return n.name == x ? 1 : 0;
    case Kind::Modal:
    case Kind::Neg:
      return count_free_occurrences(f.child_a(), x);
    case Kind::And:
    case Kind::App:
      return count_free_occurrences(f.child_a(), x) + count_free_occurrences(f.child_b(), x);
    case Kind::Lambda:
    case Kind::Mu:
      if (n.name == x) return 0;
      return count_free_occurrences(f.child_a(), x);
  }
  return 0;
}

}  // namespace detail

/// Detects the need-driven fragment. Succeeds iff phi has the shape
/// (mu F(x1..xm). body) A1 .. Am where in body every occurrence of F is
/// the head of a full application F B1 .. Bm standing as a whole disjunct,
/// with every Bj free of F. Returns the call sites and the F-free
/// residual, or the offending occurrence.
inline AnalyzeResult analyze_fixpoint_call(const Formula& phi) {
  std::vector<Formula> args;
  Formula head = phi.spine_head(&args);
  if (head.kind() != Kind::Mu)
    return AnalyzeRejection{"not a fixpoint application", phi.loc()};
  const FormulaNode& mu = head.node();
  LogicType rest = mu.type;
  std::vector<LogicType> ptypes;
  while (rest.is_arrow()) {
    ptypes.push_back(rest.param());
    rest = rest.result();
  }
  if (!rest.is_prop() || rest.prop_dim() != 2)
    return AnalyzeRejection{"fixpoint is not dimension-2", mu.loc};
  for (const auto& t : ptypes)
    if (!t.is_prop() || t.prop_dim() != 2)
      return AnalyzeRejection{"fixpoint is not order <= 1", mu.loc};
  const int m = int(ptypes.size());
  if (int(args.size()) != m)
    return AnalyzeRejection{"fixpoint applied to " + std::to_string(args.size()) +
                                " of " + std::to_string(m) + " arguments",
                            phi.loc()};

  AnalyzedFixpoint out;
  out.mu_name = mu.name;
  out.arity = m;
  out.initial_args = args;

  if (m == 0) {
    out.body = head.child_a();
    int occ = detail::count_free_occurrences(out.body, mu.name);
    out.sites.assign(std::size_t(occ), CallSite{});
    out.residual = Formula::bottom(2);
    return out;
  }

  Formula inner = head.child_a();
  for (int j = 0; j < m; ++j) {
    if (inner.kind() != Kind::Lambda)
      return AnalyzeRejection{"fixpoint body is not a parameter lambda chain", inner.loc()};
    out.params.push_back(inner.node().name);
    inner = inner.child_a();
  }
  out.body = inner;

  std::vector<Formula> disjuncts;
  detail::flatten_disjuncts(inner, disjuncts);
  std::vector<Formula> residual_parts;
  for (const auto& d : disjuncts) {
    if (detail::count_free_occurrences(d, mu.name) == 0) {
      residual_parts.push_back(d);
      continue;
    }
    std::vector<Formula> call_args;
    Formula call_head = d.spine_head(&call_args);
    if (call_head.kind() != Kind::Var || call_head.node().name != mu.name)
      return AnalyzeRejection{"occurrence of '" + mu.name +
                                  "' outside head position of a disjunct",
                              d.loc()};
    if (int(call_args.size()) != m)
      return AnalyzeRejection{"recursive call applies " + std::to_string(call_args.size()) +
                                  " of " + std::to_string(m) + " arguments",
                              d.loc()};
    for (const auto& b : call_args)
      if (detail::count_free_occurrences(b, mu.name) > 0)
        return AnalyzeRejection{"'" + mu.name + "' occurs inside a recursive-call argument",
                                b.loc()};
    out.sites.push_back(CallSite{std::move(call_args)});
  }
  out.residual = Formula::disj_all(residual_parts, 2);
  return out;
}

/// The part of the fixpoint's domain reachable from the initial argument.
/// Nodes are hash-consed argument tuples; edge (node, site) -> node
/// follows the site's argument transformers.
struct DependencyGraph {
  int arity = 0;
  std::vector<std::vector<Rel2>> nodes;          // discovery order; [0] is the root
  std::vector<std::vector<std::size_t>> edges;   // [node][site]
  std::size_t root = 0;
};

namespace detail {

struct TupleHash {
  std::size_t operator()(const std::vector<Rel2>& t) const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (const auto& r : t) h = h * 1099511628211ull ^ r.hash();
    return h;
  }
};

struct TupleEq {
  bool operator()(const std::vector<Rel2>& a, const std::vector<Rel2>& b) const {
    return a == b;
  }
};

}  // namespace detail

/// Closes the initial argument tuple under every call-site transformer,
/// evaluating transformer formulas with the parameters bound to the
/// source node's arguments.
inline DependencyGraph explore(const AnalyzedFixpoint& fix, Env& env, EvalCtx& C) {
  DependencyGraph g;
  g.arity = fix.arity;

  std::unordered_map<std::vector<Rel2>, std::size_t, detail::TupleHash, detail::TupleEq> ids;
  auto intern = [&](std::vector<Rel2> tuple) {
    auto it = ids.find(tuple);
    if (it != ids.end()) return it->second;
    std::size_t id = g.nodes.size();
    if (id >= C.opts.node_budget)
      throw eval_error("need-driven exploration exceeded the node budget of " +
                       std::to_string(C.opts.node_budget));
    ids.emplace(tuple, id);
    g.nodes.push_back(std::move(tuple));
    g.edges.emplace_back();
    return id;
  };

  std::vector<Rel2> root_args;
  for (const auto& a : fix.initial_args)
    root_args.push_back(detail::eval_rel(a.ptr(), env, C));
  g.root = intern(std::move(root_args));

  if (fix.arity == 0) {
    g.edges[g.root].assign(fix.sites.size(), g.root);
    return g;
  }

  std::vector<std::unique_ptr<detail::Rebind>> binds;
  for (int j = 0; j < fix.arity; ++j)
    binds.push_back(std::make_unique<detail::Rebind>(
        env, fix.params[std::size_t(j)],
        Value(Rel2(C.ops.lts1().num_states(), C.ops.lts2().num_states()))));

  std::deque<std::size_t> work{g.root};
  std::vector<bool> expanded{false};
  while (!work.empty()) {
    std::size_t id = work.front();
    work.pop_front();
    if (id < expanded.size() && expanded[id]) continue;
    if (id >= expanded.size()) expanded.resize(id + 1, false);
    expanded[id] = true;
    for (const auto& site : fix.sites) {
      for (int j = 0; j < fix.arity; ++j)
        binds[std::size_t(j)]->assign(Value(g.nodes[id][std::size_t(j)]));
      std::vector<Rel2> target;
      for (const auto& b : site.args) target.push_back(detail::eval_rel(b.ptr(), env, C));
      std::size_t tid = intern(std::move(target));
      g.edges[id].push_back(tid);
      if (tid >= expanded.size() || !expanded[tid]) work.push_back(tid);
    }
  }
  return g;
}

/// Least fixpoint restricted to the explored nodes: every node starts at
/// the empty relation and is repeatedly set to residual(args) joined with
/// the values at its edge targets, with simultaneous (per-round) updates,
/// until nothing changes. Returns the value at the root; `history`
/// receives the root's value after each round, starting at round 0.
inline Rel2 solve(const AnalyzedFixpoint& fix, const DependencyGraph& g, Env& env, EvalCtx& C,
                  std::vector<Rel2>* history = nullptr) {
  const std::uint32_t n1 = C.ops.lts1().num_states(), n2 = C.ops.lts2().num_states();
  C.stats.explored_nodes += g.nodes.size();

  if (fix.arity == 0) {
    Rel2 cur(n1, n2);
    if (history) history->push_back(cur);
    detail::Rebind bind(env, fix.mu_name, Value(cur));
    int rounds = 0;
    for (;;) {
      Rel2 nxt = detail::eval_rel(fix.body.ptr(), env, C);
      ++rounds;
      ++C.stats.mu_iterations;
      if (history) history->push_back(nxt);
      if (nxt == cur) break;
      cur = std::move(nxt);
      bind.assign(Value(cur));
    }
    C.stats.solve_rounds = rounds;
    C.stats.mu_stats.push_back({fix.mu_name, 0, 1, rounds});
    return cur;
  }

  // residual values depend only on the node's arguments
  std::vector<Rel2> residual(g.nodes.size(), Rel2(n1, n2));
  {
    std::vector<std::unique_ptr<detail::Rebind>> binds;
    for (int j = 0; j < fix.arity; ++j)
      binds.push_back(std::make_unique<detail::Rebind>(env, fix.params[std::size_t(j)],
                                                       Value(Rel2(n1, n2))));
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      for (int j = 0; j < fix.arity; ++j)
        binds[std::size_t(j)]->assign(Value(g.nodes[i][std::size_t(j)]));
      residual[i] = detail::eval_rel(fix.residual.ptr(), env, C);
      C.stats.table_entries += 1;
    }
  }

  std::vector<Rel2> cur(g.nodes.size(), Rel2(n1, n2));
  std::vector<Rel2> nxt(g.nodes.size(), Rel2(n1, n2));
  if (history) history->push_back(cur[g.root]);
  int rounds = 0;
  for (;;) {
    bool changed = false;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      Rel2 v = residual[i];
      for (std::size_t s = 0; s < g.edges[i].size(); ++s) v |= cur[g.edges[i][s]];
      changed |= v != cur[i];
      nxt[i] = std::move(v);
    }
    ++rounds;
    ++C.stats.mu_iterations;
    if (history) history->push_back(nxt[g.root]);
    std::swap(cur, nxt);
    if (!changed) break;
  }
  C.stats.solve_rounds = rounds;
  C.stats.mu_stats.push_back(
      {fix.mu_name, fix.arity, std::uint64_t(g.nodes.size()), rounds});
  return cur[g.root];
}

/// Renders an explored dependency graph as DOT text.
inline std::string graph_to_dot(const DependencyGraph& g) {
  std::string out = "digraph deps {\n  rankdir=LR;\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    std::string label;
    for (std::size_t j = 0; j < g.nodes[i].size(); ++j) {
      if (j) label += "\\n";
      label += g.nodes[i][j].to_string();
    }
    if (g.nodes[i].empty()) label = "()";
    out += "  n" + std::to_string(i) + " [label=\"" + label + "\"" +
           (i == g.root ? ",shape=box" : "") + "];\n";
  }
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    for (std::size_t s = 0; s < g.edges[i].size(); ++s)
      out += "  n" + std::to_string(i) + " -> n" + std::to_string(g.edges[i][s]) +
             " [label=\"site" + std::to_string(s) + "\"];\n";
  return out + "}\n";
}

namespace detail {

inline std::optional<Value> need_driven_hook(const Formula& f, Env& env, EvalCtx& C) {
  AnalyzeResult res = analyze_fixpoint_call(f);
  if (std::holds_alternative<AnalyzeRejection>(res)) return std::nullopt;
  const auto& fix = std::get<AnalyzedFixpoint>(res);
  DependencyGraph g = explore(fix, env, C);
  if (C.opts.dot_observer) C.opts.dot_observer(graph_to_dot(g));
  std::vector<Rel2> history;
  Rel2 value = solve(fix, g, env, C, &history);
  C.stats.root_history = std::move(history);
  return Value(std::move(value));
}

}  // namespace detail

/// Need-driven evaluation: fixpoint applications in the analyzable
/// fragment are solved on the reachable part of their domain only;
/// everything else falls back to naive tabulation.
inline Value mc_need_driven(const Formula& phi, Env env, const Lts& l1, const Lts& l2,
                            const EvalOptions& opts = {}, EvalStats* stats = nullptr) {
  if (!l1.same_alphabet(l2)) throw eval_error("the two LTS must share an alphabet");
  ModalOps ops(l1, l2);
  EvalCtx C{ops, opts, {}, detail::need_driven_hook};
  Value v = detail::eval(phi.ptr(), env, C);
  if (stats) *stats = std::move(C.stats);
  return v;
}

inline Rel2 mc_need_driven_rel(const Formula& phi, Env env, const Lts& l1, const Lts& l2,
                               const EvalOptions& opts = {}, EvalStats* stats = nullptr) {
  Value v = mc_need_driven(phi, std::move(env), l1, l2, opts, stats);
  if (!is_rel(v)) throw eval_error("formula evaluates to a function, not a relation");
  return as_rel(v);
}

inline bool check_pair_need_driven(const Formula& phi, StateId p, StateId q, const Lts& l1,
                                   const Lts& l2, const EvalOptions& opts = {},
                                   EvalStats* stats = nullptr) {
  l1.require_state(p);
  l2.require_state(q);
  return mc_need_driven_rel(phi, {}, l1, l2, opts, stats).test(p, q);
}

}  // namespace ltbt
