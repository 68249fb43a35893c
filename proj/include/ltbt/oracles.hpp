#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ltbt/errors.hpp"
#include "ltbt/lts.hpp"
#include "ltbt/rel2.hpp"

namespace ltbt {

enum class SimVariant { Plain, Completed, Ready, TwoNested, Bisimulation };

namespace detail {

/// Action-id translation table from l1's alphabet order into l2's ids.
inline std::vector<ActionId> align_alphabet(const Lts& l1, const Lts& l2) {
  std::vector<ActionId> out;
  out.reserve(l1.alphabet().size());
  for (const auto& a : l1.alphabet()) out.push_back(l2.require_action(a.name()));
  return out;
}

/// Initial-action sets of every state of l, as masks over the reference
/// alphabet order of ref.
inline std::vector<std::uint32_t> initial_masks(const Lts& l, const Lts& ref) {
  std::vector<ActionId> tr = align_alphabet(ref, l);
  std::vector<std::uint32_t> out(l.num_states(), 0);
  for (StateId s = 0; s < l.num_states(); ++s)
    for (std::size_t a = 0; a < tr.size(); ++a)
      if (l.successors(s, tr[a]).any()) out[s] |= (1u << a);
  return out;
}

}  // namespace detail

/// The greatest relation satisfying the variant's transfer clause and
/// side condition, computed by refinement from the full product: pairs
/// violating a clause are deleted until nothing changes.
inline Rel2 greatest_simulation(const Lts& l1, const Lts& l2,
                                SimVariant variant = SimVariant::Plain) {
  if (!l1.same_alphabet(l2)) throw error("oracle requires a shared alphabet");
  const std::uint32_t n1 = l1.num_states(), n2 = l2.num_states();
  const std::vector<ActionId> a2 = detail::align_alphabet(l1, l2);

  Rel2 rel = Rel2::full(l1, l2);
  if (variant == SimVariant::Completed) {
    for (StateId p = 0; p < n1; ++p)
      for (StateId q = 0; q < n2; ++q)
        if (l1.deadlocked(p) != l2.deadlocked(q)) rel.reset(p, q);
  } else if (variant == SimVariant::Ready) {
    auto m1 = detail::initial_masks(l1, l1);
    auto m2 = detail::initial_masks(l2, l1);
    for (StateId p = 0; p < n1; ++p)
      for (StateId q = 0; q < n2; ++q)
        if (m1[p] != m2[q]) rel.reset(p, q);
  } else if (variant == SimVariant::TwoNested) {
    Rel2 back = greatest_simulation(l2, l1, SimVariant::Plain);
    for (StateId p = 0; p < n1; ++p)
      for (StateId q = 0; q < n2; ++q)
        if (!back.test(q, p)) rel.reset(p, q);
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (StateId p = 0; p < n1; ++p) {
      for (StateId q = 0; q < n2; ++q) {
        if (!rel.test(p, q)) continue;
        bool ok = true;
        for (ActionId a = 0; a < l1.alphabet().size() && ok; ++a) {
          l1.successors(p, a).for_each([&](std::uint32_t pp) {
            if (!ok) return;
            bool matched = false;
            l2.successors(q, a2[a]).for_each([&](std::uint32_t qq) {
              matched = matched || rel.test(pp, qq);
            });
            ok = matched;
          });
          if (ok && variant == SimVariant::Bisimulation) {
            l2.successors(q, a2[a]).for_each([&](std::uint32_t qq) {
              if (!ok) return;
              bool matched = false;
              l1.successors(p, a).for_each([&](std::uint32_t pp) {
                matched = matched || rel.test(pp, qq);
              });
              ok = matched;
            });
          }
        }
        if (!ok) {
          rel.reset(p, q);
          changed = true;
        }
      }
    }
  }
  return rel;
}

/// Spec-facing name: the greatest plain simulation between two LTS.
inline Rel2 simulation_preorder(const Lts& l1, const Lts& l2) {
  return greatest_simulation(l1, l2, SimVariant::Plain);
}

inline Rel2 bisimulation(const Lts& l1, const Lts& l2) {
  return greatest_simulation(l1, l2, SimVariant::Bisimulation);
}

/// Both directions of the variant's greatest relation, per Appendix A's
/// "there are simulations R and R'".
inline bool sim_family_equivalent(const Lts& l1, StateId p, const Lts& l2, StateId q,
                                  SimVariant variant) {
  l1.require_state(p);
  l2.require_state(q);
  if (variant == SimVariant::Bisimulation)
    return greatest_simulation(l1, l2, variant).test(p, q);
  return greatest_simulation(l1, l2, variant).test(p, q) &&
         greatest_simulation(l2, l1, variant).test(q, p);
}

enum class TraceVariant { Trace, CompletedTrace, Failure, Readiness, FailureTrace, ReadyTrace };

namespace detail {

struct SubsetPair {
  Bits s, t;
  bool operator==(const SubsetPair& o) const { return s == o.s && t == o.t; }
};

struct SubsetPairHash {
  std::size_t operator()(const SubsetPair& x) const { return x.s.hash() * 31 ^ x.t.hash(); }
};

inline Bits subset_step(const Lts& l, const Bits& s, ActionId a) {
  Bits out(l.num_states());
  s.for_each([&](std::uint32_t x) { out |= l.successors(x, a); });
  return out;
}

/// All subsets of `mask`, ORed into a bitmask-over-subsets.
inline std::uint64_t down_closure(std::uint32_t mask) {
  std::uint64_t out = 0;
  std::uint32_t sub = mask;
  for (;;) {
    out |= std::uint64_t(1) << sub;
    if (sub == 0) break;
    sub = (sub - 1) & mask;
  }
  return out;
}

}  // namespace detail

/// Decides the trace-like equivalences by synchronized subset
/// construction from ({p},{q}): both subsets advance on every action
/// (and, for the failure-/ready-trace variants, on every refusal/ready
/// step A <= Act). Inequivalent iff some reachable pair has exactly one
/// side empty (language divergence) or the variant's local observations
/// differ.
inline bool trace_family_equivalent(const Lts& l1, StateId p, const Lts& l2, StateId q,
                                    TraceVariant variant) {
  if (!l1.same_alphabet(l2)) throw error("oracle requires a shared alphabet");
  l1.require_state(p);
  l2.require_state(q);
  const std::size_t na = l1.alphabet().size();
  if (na > 6) throw error("trace-family oracle supports at most 6 actions");
  const std::vector<ActionId> a2 = detail::align_alphabet(l1, l2);
  const std::vector<std::uint32_t> i1 = detail::initial_masks(l1, l1);
  const std::vector<std::uint32_t> i2 = detail::initial_masks(l2, l1);

  auto observations_match = [&](const Bits& s, const Bits& t) {
    switch (variant) {
      case TraceVariant::Trace:
      case TraceVariant::FailureTrace:
      case TraceVariant::ReadyTrace:
        return true;
      case TraceVariant::CompletedTrace: {
        bool d1 = false, d2 = false;
        s.for_each([&](std::uint32_t x) { d1 = d1 || i1[x] == 0; });
        t.for_each([&](std::uint32_t x) { d2 = d2 || i2[x] == 0; });
        return d1 == d2;
      }
      case TraceVariant::Failure: {
        const std::uint32_t full = (1u << na) - 1;
        std::uint64_t r1 = 0, r2 = 0;
        s.for_each([&](std::uint32_t x) { r1 |= detail::down_closure(full & ~i1[x]); });
        t.for_each([&](std::uint32_t x) { r2 |= detail::down_closure(full & ~i2[x]); });
        return r1 == r2;
      }
      case TraceVariant::Readiness: {
        std::uint64_t r1 = 0, r2 = 0;
        s.for_each([&](std::uint32_t x) { r1 |= std::uint64_t(1) << i1[x]; });
        t.for_each([&](std::uint32_t x) { r2 |= std::uint64_t(1) << i2[x]; });
        return r1 == r2;
      }
    }
    return true;
  };

  const bool refusal_steps = variant == TraceVariant::FailureTrace;
  const bool ready_steps = variant == TraceVariant::ReadyTrace;

  Bits s0(l1.num_states()), t0(l2.num_states());
  s0.set(p);
  t0.set(q);
  std::unordered_set<detail::SubsetPair, detail::SubsetPairHash> seen;
  std::deque<detail::SubsetPair> work;
  seen.insert({s0, t0});
  work.push_back({s0, t0});

  bool equivalent = true;
  auto visit = [&](Bits s, Bits t) {
    if (s.none() && t.none()) return;
    if (s.none() != t.none()) {
      equivalent = false;
      return;
    }
    detail::SubsetPair node{std::move(s), std::move(t)};
    if (seen.insert(node).second) work.push_back(std::move(node));
  };

  while (!work.empty() && equivalent) {
    detail::SubsetPair node = std::move(work.front());
    work.pop_front();
    if (!observations_match(node.s, node.t)) return false;
    for (ActionId a = 0; a < na && equivalent; ++a)
      visit(detail::subset_step(l1, node.s, a), detail::subset_step(l2, node.t, ActionId(a2[a])));
    if (refusal_steps || ready_steps) {
      for (std::uint32_t A = 0; A < (1u << na) && equivalent; ++A) {
        Bits s(l1.num_states()), t(l2.num_states());
        node.s.for_each([&](std::uint32_t x) {
          bool keep = refusal_steps ? (i1[x] & A) == 0 : i1[x] == A;
          if (keep) s.set(x);
        });
        node.t.for_each([&](std::uint32_t x) {
          bool keep = refusal_steps ? (i2[x] & A) == 0 : i2[x] == A;
          if (keep) t.set(x);
        });
        visit(std::move(s), std::move(t));
      }
    }
  }
  return equivalent;
}

/// Possible-futures equivalence: trace-equivalence classes of all states
/// of both LTS are precomputed pairwise; then a synchronized subset
/// construction compares the sets of class ids on each side.
inline bool possible_futures_equivalent(const Lts& l1, StateId p, const Lts& l2, StateId q) {
  if (!l1.same_alphabet(l2)) throw error("oracle requires a shared alphabet");
  l1.require_state(p);
  l2.require_state(q);

  // class ids over the disjoint union of states
  const std::uint32_t n1 = l1.num_states(), n2 = l2.num_states();
  std::vector<int> cls(n1 + n2, -1);
  std::vector<std::pair<const Lts*, StateId>> reps;
  auto state_of = [&](std::uint32_t i) -> std::pair<const Lts*, StateId> {
    return i < n1 ? std::make_pair(&l1, StateId(i)) : std::make_pair(&l2, StateId(i - n1));
  };
  for (std::uint32_t i = 0; i < n1 + n2; ++i) {
    auto [li, si] = state_of(i);
    for (std::size_t c = 0; c < reps.size(); ++c) {
      auto [lr, sr] = reps[c];
      if (trace_family_equivalent(*li, si, *lr, sr, TraceVariant::Trace)) {
        cls[i] = int(c);
        break;
      }
    }
    if (cls[i] < 0) {
      cls[i] = int(reps.size());
      reps.emplace_back(li, si);
    }
  }
  if (reps.size() > 64) throw error("possible-futures oracle supports at most 64 trace classes");

  const std::vector<ActionId> a2 = detail::align_alphabet(l1, l2);
  auto classes_of = [&](const Bits& set, bool second) {
    std::uint64_t m = 0;
    set.for_each([&](std::uint32_t x) { m |= std::uint64_t(1) << cls[second ? n1 + x : x]; });
    return m;
  };

  Bits s0(n1), t0(n2);
  s0.set(p);
  t0.set(q);
  std::unordered_set<detail::SubsetPair, detail::SubsetPairHash> seen;
  std::deque<detail::SubsetPair> work;
  seen.insert({s0, t0});
  work.push_back({s0, t0});
  while (!work.empty()) {
    detail::SubsetPair node = std::move(work.front());
    work.pop_front();
    if (classes_of(node.s, false) != classes_of(node.t, true)) return false;
    for (ActionId a = 0; a < l1.alphabet().size(); ++a) {
      Bits s = detail::subset_step(l1, node.s, a);
      Bits t = detail::subset_step(l2, node.t, a2[a]);
      if (s.none() && t.none()) continue;
      if (s.none() != t.none()) return false;
      detail::SubsetPair next{std::move(s), std::move(t)};
      if (seen.insert(next).second) work.push_back(std::move(next));
    }
  }
  return true;
}

enum class BoundedVariant {
  Trace,
  CompletedTrace,
  Failure,
  Readiness,
  FailureTrace,
  ReadyTrace,
  PossibleFutures,
};

namespace detail {

/// Set of states reachable from p via a word whose symbols are action ids
/// (< na) or na + refusal/ready masks, depending on the variant.
inline Bits bounded_reach(const Lts& l, StateId p, const std::vector<int>& word,
                          const std::vector<ActionId>& amap,
                          const std::vector<std::uint32_t>& imasks, bool ready_filter) {
  const int na = int(amap.size());
  Bits cur(l.num_states());
  cur.set(p);
  for (int sym : word) {
    if (sym < na) {
      cur = subset_step(l, cur, amap[std::size_t(sym)]);
    } else {
      std::uint32_t A = std::uint32_t(sym - na);
      Bits nxt(l.num_states());
      cur.for_each([&](std::uint32_t x) {
        bool keep = ready_filter ? imasks[x] == A : (imasks[x] & A) == 0;
        if (keep) nxt.set(x);
      });
      cur = nxt;
    }
    if (cur.none()) break;
  }
  return cur;
}

using WordSet = std::set<std::vector<int>>;

/// Depth-bounded language over the symbol alphabet, by literal word
/// extension from the current reach subset; only words with nonempty
/// reach are kept or extended.
inline void enumerate_words(const Lts& l, const Bits& cur, int nsymbols, int depth,
                            const std::vector<ActionId>& amap,
                            const std::vector<std::uint32_t>& imasks, bool ready_filter,
                            std::vector<int>& word, WordSet& out) {
  out.insert(word);
  if (int(word.size()) >= depth) return;
  const int na = int(amap.size());
  for (int sym = 0; sym < nsymbols; ++sym) {
    Bits nxt(l.num_states());
    if (sym < na) {
      nxt = subset_step(l, cur, amap[std::size_t(sym)]);
    } else {
      std::uint32_t A = std::uint32_t(sym - na);
      cur.for_each([&](std::uint32_t x) {
        bool keep = ready_filter ? imasks[x] == A : (imasks[x] & A) == 0;
        if (keep) nxt.set(x);
      });
    }
    if (nxt.any()) {
      word.push_back(sym);
      enumerate_words(l, nxt, nsymbols, depth, amap, imasks, ready_filter, word, out);
      word.pop_back();
    }
  }
}

inline Bits singleton(const Lts& l, StateId p) {
  Bits b(l.num_states());
  b.set(p);
  return b;
}

}  // namespace detail

/// Depth-bounded literal comparison of the variant's defining sets
/// (Appendix A, enumerated as written). Sound as a refuter only; used as
/// an independent cross-check of the subset-construction oracles.
inline bool bounded_enumeration_check(const Lts& l1, StateId p, const Lts& l2, StateId q,
                                      BoundedVariant variant, int depth) {
  if (!l1.same_alphabet(l2)) throw error("oracle requires a shared alphabet");
  l1.require_state(p);
  l2.require_state(q);
  const int na = int(l1.alphabet().size());
  if (na > 4 || depth > 8 || l1.num_states() > 16 || l2.num_states() > 16)
    throw error("bounded enumeration refused: instance too large");
  std::vector<ActionId> id1, id2 = detail::align_alphabet(l1, l2);
  for (int a = 0; a < na; ++a) id1.push_back(ActionId(a));
  const std::vector<std::uint32_t> i1 = detail::initial_masks(l1, l1);
  const std::vector<std::uint32_t> i2 = detail::initial_masks(l2, l1);

  auto action_words = [&](const Lts& l, StateId s, const std::vector<ActionId>& amap,
                          const std::vector<std::uint32_t>& im) {
    detail::WordSet out;
    std::vector<int> word;
    detail::enumerate_words(l, detail::singleton(l, s), na, depth, amap, im, false, word, out);
    return out;
  };

  switch (variant) {
    case BoundedVariant::Trace:
      return action_words(l1, p, id1, i1) == action_words(l2, q, id2, i2);

    case BoundedVariant::CompletedTrace: {
      // T(P) = T(Q) and CT(P) = CT(Q)
      auto completed = [&](const Lts& l, StateId s, const std::vector<ActionId>& amap,
                           const std::vector<std::uint32_t>& im) {
        detail::WordSet out;
        for (const auto& w : action_words(l, s, amap, im)) {
          Bits r = detail::bounded_reach(l, s, w, amap, im, false);
          bool dead = false;
          r.for_each([&](std::uint32_t x) { dead = dead || im[x] == 0; });
          if (dead) out.insert(w);
        }
        return out;
      };
      return action_words(l1, p, id1, i1) == action_words(l2, q, id2, i2) &&
             completed(l1, p, id1, i1) == completed(l2, q, id2, i2);
    }

    case BoundedVariant::Failure:
    case BoundedVariant::Readiness: {
      auto pairs = [&](const Lts& l, StateId s, const std::vector<ActionId>& amap,
                       const std::vector<std::uint32_t>& im) {
        std::set<std::pair<std::vector<int>, std::uint32_t>> out;
        for (const auto& w : action_words(l, s, amap, im)) {
          Bits r = detail::bounded_reach(l, s, w, amap, im, false);
          for (std::uint32_t A = 0; A < (1u << na); ++A) {
            bool in = false;
            r.for_each([&](std::uint32_t x) {
              in = in || (variant == BoundedVariant::Failure ? (im[x] & A) == 0 : im[x] == A);
            });
            if (in) out.emplace(w, A);
          }
        }
        return out;
      };
      return pairs(l1, p, id1, i1) == pairs(l2, q, id2, i2);
    }

    case BoundedVariant::FailureTrace:
    case BoundedVariant::ReadyTrace: {
      const bool ready = variant == BoundedVariant::ReadyTrace;
      auto words = [&](const Lts& l, StateId s, const std::vector<ActionId>& amap,
                       const std::vector<std::uint32_t>& im) {
        detail::WordSet out;
        std::vector<int> word;
        detail::enumerate_words(l, detail::singleton(l, s), na + (1 << na), depth, amap, im,
                                ready, word, out);
        return out;
      };
      return words(l1, p, id1, i1) == words(l2, q, id2, i2);
    }

    case BoundedVariant::PossibleFutures: {
      auto futures = [&](const Lts& l, StateId s, const std::vector<ActionId>& amap,
                         const std::vector<std::uint32_t>& im) {
        std::map<StateId, detail::WordSet> traces_of;
        std::set<std::pair<std::vector<int>, detail::WordSet>> out;
        for (const auto& w : action_words(l, s, amap, im)) {
          Bits r = detail::bounded_reach(l, s, w, amap, im, false);
          r.for_each([&](std::uint32_t x) {
            auto it = traces_of.find(StateId(x));
            if (it == traces_of.end()) {
              detail::WordSet ts;
              std::vector<int> word;
              detail::enumerate_words(l, detail::singleton(l, StateId(x)), na, depth, amap, im,
                                      false, word, ts);
              it = traces_of.emplace(StateId(x), std::move(ts)).first;
            }
            out.emplace(w, it->second);
          });
        }
        return out;
      };
      return futures(l1, p, id1, i1) == futures(l2, q, id2, i2);
    }
  }
  return true;
}

}  // namespace ltbt
