#pragma once

#include <deque>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ltbt/mc_needdriven.hpp"
#include "ltbt/rel2.hpp"

namespace ltbt {

/// The dependency system built by the trace-equivalence checker: the
/// domain reachable from (Procs1 x Procs2, {}) under
/// (X,Y) -> (<a>1 X, [a]2 Y) for every action, plus the solved values.
struct TreqRun {
  std::vector<std::pair<Rel2, Rel2>> nodes;     // discovery order; [0] is the root
  std::vector<std::vector<std::size_t>> edges;  // [node][action index]
  std::vector<Rel2> values;
  std::size_t root = 0;
  int rounds = 0;
};

/// Trace-equivalence checking specialized from the model checker: builds
/// the dependency graph with a FIFO worklist, then iterates
/// F(X,Y) = (X n Y) u U_a F(d_a(X,Y)) to stability, updating nodes in
/// discovery order within a round. The root value is the set of pairs
/// (P,Q) such that P has a finite trace Q lacks.
inline TreqRun treq_run(const Lts& l1, const Lts& l2,
                        std::size_t node_budget = std::size_t(1) << 16) {
  if (!l1.same_alphabet(l2)) throw eval_error("the two LTS must share an alphabet");
  ModalOps ops(l1, l2);
  const std::size_t na = l1.alphabet().size();

  TreqRun run;
  std::unordered_map<std::vector<Rel2>, std::size_t, detail::TupleHash, detail::TupleEq> ids;
  auto intern = [&](Rel2 x, Rel2 y) {
    std::vector<Rel2> key{x, y};
    auto it = ids.find(key);
    if (it != ids.end()) return std::make_pair(it->second, false);
    std::size_t id = run.nodes.size();
    if (id >= node_budget)
      throw eval_error("trace-equivalence exploration exceeded the node budget of " +
                       std::to_string(node_budget));
    ids.emplace(std::move(key), id);
    run.nodes.emplace_back(std::move(x), std::move(y));
    run.edges.emplace_back();
    return std::make_pair(id, true);
  };

  run.root = intern(ops.full(), ops.empty()).first;
  std::deque<std::size_t> work{run.root};
  while (!work.empty()) {
    std::size_t id = work.front();
    work.pop_front();
    for (ActionId a = 0; a < na; ++a) {
      Rel2 x = ops.diamond(1, a, run.nodes[id].first);
      Rel2 y = ops.box(2, a, run.nodes[id].second);
      auto [tid, fresh] = intern(std::move(x), std::move(y));
      run.edges[id].push_back(tid);
      if (fresh) work.push_back(tid);
    }
  }

  std::vector<Rel2> intersections;
  intersections.reserve(run.nodes.size());
  for (const auto& [x, y] : run.nodes) intersections.push_back(x & y);
  run.values.assign(run.nodes.size(), ops.empty());
  for (;;) {
    bool changed = false;
    for (std::size_t i = 0; i < run.nodes.size(); ++i) {
      Rel2 v = intersections[i];
      for (std::size_t a = 0; a < run.edges[i].size(); ++a) v |= run.values[run.edges[i][a]];
      if (v != run.values[i]) {
        changed = true;
        run.values[i] = std::move(v);
      }
    }
    ++run.rounds;
    if (!changed) break;
  }
  return run;
}

inline Rel2 treq(const Lts& l1, const Lts& l2, std::size_t node_budget = std::size_t(1) << 16) {
  TreqRun run = treq_run(l1, l2, node_budget);
  return run.values[run.root];
}

/// p and q are trace equivalent iff neither has a trace the other lacks.
inline bool trace_equivalent(const Lts& l1, StateId p, const Lts& l2, StateId q,
                             std::size_t node_budget = std::size_t(1) << 16) {
  l1.require_state(p);
  l2.require_state(q);
  return !treq(l1, l2, node_budget).test(p, q) && !treq(l2, l1, node_budget).test(q, p);
}

}  // namespace ltbt
