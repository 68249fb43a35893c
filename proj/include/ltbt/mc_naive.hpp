#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ltbt/errors.hpp"
#include "ltbt/formula.hpp"
#include "ltbt/rel2.hpp"
#include "ltbt/typecheck.hpp"

namespace ltbt {

/// A tabulated first-order function: a total map from m-tuples of Rel2
/// arguments to Rel2 results. Entry (T1,...,Tm) lives at the index whose
/// high bits are T1's code, so partial application slices a contiguous
/// block.
struct FuncTable {
  int arity = 0;
  std::uint32_t bits_per_arg = 0;
  std::uint32_t n1 = 0, n2 = 0;
  std::vector<Rel2> entries;

  FuncTable() = default;
  FuncTable(int m, std::uint32_t n1_, std::uint32_t n2_)
      : arity(m), bits_per_arg(n1_ * n2_), n1(n1_), n2(n2_) {
    entries.assign(std::size_t(1) << (std::uint64_t(arity) * bits_per_arg),
                   Rel2(n1, n2, false));
  }

  std::uint64_t index_of(const std::vector<std::uint64_t>& codes) const {
    std::uint64_t idx = 0;
    for (auto c : codes) idx = (idx << bits_per_arg) | c;
    return idx;
  }

  bool operator==(const FuncTable& o) const {
    return arity == o.arity && bits_per_arg == o.bits_per_arg && entries == o.entries;
  }
};

using Value = std::variant<Rel2, std::shared_ptr<const FuncTable>>;

inline bool is_rel(const Value& v) { return std::holds_alternative<Rel2>(v); }
inline const Rel2& as_rel(const Value& v) { return std::get<Rel2>(v); }
inline const FuncTable& as_table(const Value& v) {
  return *std::get<std::shared_ptr<const FuncTable>>(v);
}

/// Interpretation of the free variables of the formula under evaluation.
using Env = std::map<std::string, Value>;

struct EvalOptions {
  /// The naive engine refuses to build a table when m * n1 * n2 exceeds
  /// this, unless force is set.
  int guard_bits = 24;
  bool force = false;
  /// Need-driven exploration aborts past this many argument nodes.
  std::size_t node_budget = std::size_t(1) << 16;
  /// Test hook: called after every sweep of a tabulated fixpoint with the
  /// binder name, the sweep number (1-based) and the new table.
  std::function<void(const std::string&, int, const FuncTable&)> mu_observer;
  /// Debug hook: receives the DOT text of every dependency graph the
  /// need-driven engine explores.
  std::function<void(const std::string&)> dot_observer;
};

struct MuStat {
  std::string name;
  int arity = 0;
  std::uint64_t entries_per_sweep = 0;
  int sweeps = 0;
};

struct EvalStats {
  /// Total fixpoint sweeps over all mu evaluations of the run.
  int mu_iterations = 0;
  /// Total table-entry evaluations.
  std::uint64_t table_entries = 0;
  /// Need-driven engine: distinct argument nodes explored.
  std::size_t explored_nodes = 0;
  /// Need-driven engine: stabilisation rounds of the last top-level solve.
  int solve_rounds = 0;
  std::vector<MuStat> mu_stats;
  /// Need-driven engine: value at the root argument after each round of
  /// the last solve, starting with the all-empty round 0.
  std::vector<Rel2> root_history;
};

struct EvalCtx {
  const ModalOps& ops;
  EvalOptions opts;
  EvalStats stats;
  /// Installed by the need-driven engine. Consulted for every fixpoint
  /// (bare or applied); nullopt falls back to tabulation.
  std::function<std::optional<Value>(const Formula&, Env&, EvalCtx&)> mu_hook;
};

namespace detail {

inline Value eval(const FormulaPtr& f, Env& env, EvalCtx& C);

inline ActionId resolve_action(const EvalCtx& C, const FormulaNode& n) {
  auto id = C.ops.lts1().action_id(n.name);
  if (!id) throw eval_error("action '" + n.name + "' is not in the LTS alphabet");
  return *id;
}

/// Unboxed evaluation of proposition-typed subtrees; the common case in
/// the tabulation loops.
inline Rel2 eval_rel(const FormulaPtr& f, Env& env, EvalCtx& C) {
  const FormulaNode& n = *f;
  switch (n.kind) {
    case Kind::Top:
      if (n.dim != 2) throw eval_error("evaluation is fixed to dimension 2");
      return C.ops.full();
    case Kind::Modal: {
      if (n.index != 1 && n.index != 2)
        throw eval_error("modal index " + std::to_string(n.index) + " > 2");
      ActionId a = resolve_action(C, n);
      return C.ops.diamond(n.index, a, eval_rel(n.a, env, C));
    }
    case Kind::Neg: {
      Rel2 body = eval_rel(n.a, env, C);
      body.complement();
      return body;
    }
    case Kind::And: {
      Rel2 l = eval_rel(n.a, env, C);
      Rel2 r = eval_rel(n.b, env, C);
      l &= r;
      return l;
    }
    case Kind::Var: {
      auto it = env.find(n.name);
      if (it == env.end()) throw eval_error("unbound variable '" + n.name + "' at evaluation");
      if (!is_rel(it->second))
        throw eval_error("order > 1 node encountered: a function value where a relation is "
                         "needed");
      return std::get<Rel2>(it->second);
    }
    default: {
      Value v = eval(f, env, C);
      if (!is_rel(v))
        throw eval_error(
            "order > 1 node encountered: a function value where a relation is needed");
      return std::move(std::get<Rel2>(v));
    }
  }
}

/// Temporarily (re)binds one variable.
struct Rebind {
  Env& env;
  std::string name;
  std::optional<Value> old;
  Env::iterator slot;

  Rebind(Env& e, const std::string& n, Value v) : env(e), name(n) {
    auto it = env.find(n);
    if (it != env.end()) {
      old = std::move(it->second);
      it->second = std::move(v);
      slot = it;
    } else {
      slot = env.emplace(n, std::move(v)).first;
    }
  }
  void assign(Value v) { slot->second = std::move(v); }
  ~Rebind() {
    if (old)
      slot->second = std::move(*old);
    else
      env.erase(slot);
  }
};

inline void check_first_order_type(const LogicType& t) {
  LogicType rest = t;
  while (rest.is_arrow()) {
    if (!rest.param().is_prop() || rest.param().prop_dim() != 2)
      throw eval_error("order > 1 node encountered: parameter of type " +
                       rest.param().to_string());
    rest = rest.result();
  }
  if (!rest.is_prop() || rest.prop_dim() != 2)
    throw eval_error("evaluation is fixed to dimension 2, got " + rest.to_string());
}

inline void check_guard(const EvalCtx& C, int m) {
  const std::uint64_t bits =
      std::uint64_t(m) * C.ops.lts1().num_states() * C.ops.lts2().num_states();
  if (bits > std::uint64_t(C.opts.guard_bits) && !C.opts.force)
    throw eval_error("naive tabulation refused: table would have 2^" + std::to_string(bits) +
                     " entries (guardrail " + std::to_string(C.opts.guard_bits) +
                     " bits; set force to override)");
}

/// Tabulates a lambda chain into an m-ary table (Algorithm 1's lambda
/// case). A function-valued body is absorbed into a deeper table.
inline FuncTable tabulate(const FormulaPtr& lam, Env& env, EvalCtx& C) {
  std::vector<const FormulaNode*> params;
  const FormulaPtr* body = &lam;
  while ((*body)->kind == Kind::Lambda) {
    const FormulaNode& n = **body;
    if (!n.type.is_prop() || n.type.prop_dim() != 2)
      throw eval_error("order > 1 node encountered: lambda over " + n.type.to_string());
    params.push_back(&n);
    body = &n.a;
  }
  const std::uint32_t n1 = C.ops.lts1().num_states(), n2 = C.ops.lts2().num_states();
  const std::uint32_t b = n1 * n2;
  const int m = int(params.size());
  check_guard(C, m);

  std::vector<std::unique_ptr<Rebind>> binds;
  binds.reserve(params.size());
  for (const auto* p : params)
    binds.push_back(std::make_unique<Rebind>(env, p->name, Value(Rel2(n1, n2))));

  const std::uint64_t total = std::uint64_t(1) << (std::uint64_t(m) * b);
  FuncTable out;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    for (int j = 0; j < m; ++j) {
      std::uint64_t code = (idx >> (std::uint64_t(m - 1 - j) * b)) & ((std::uint64_t(1) << b) - 1);
      Rel2 arg(n1, n2);
      arg.bits() = Bits::from_code(b, code);
      binds[std::size_t(j)]->assign(Value(std::move(arg)));
    }
    Value v = eval(*body, env, C);
    C.stats.table_entries += 1;
    if (is_rel(v)) {
      if (idx == 0) out = FuncTable(m, n1, n2);
      out.entries[idx] = std::move(std::get<Rel2>(v));
    } else {
      const FuncTable& inner = as_table(v);
      if (idx == 0) {
        check_guard(C, m + inner.arity);
        out = FuncTable(m + inner.arity, n1, n2);
      }
      const std::uint64_t block = inner.entries.size();
      for (std::uint64_t k = 0; k < block; ++k) out.entries[idx * block + k] = inner.entries[k];
    }
  }
  return out;
}

/// Least fixpoint by iteration from the everywhere-empty value
/// (Algorithm 1's mu case). Jacobi sweeps: each new table is computed
/// from the previous one.
inline Value eval_mu(const FormulaPtr& f, Env& env, EvalCtx& C) {
  const FormulaNode& n = *f;
  check_first_order_type(n.type);
  const int m = n.type.arity();
  const std::uint32_t n1 = C.ops.lts1().num_states(), n2 = C.ops.lts2().num_states();

  MuStat stat{n.name, m, 0, 0};
  if (m == 0) {
    stat.entries_per_sweep = 1;
    Rel2 cur(n1, n2, false);
    Rebind bind(env, n.name, Value(cur));
    for (;;) {
      Rel2 nxt = eval_rel(n.a, env, C);
      ++stat.sweeps;
      ++C.stats.mu_iterations;
      ++C.stats.table_entries;
      if (nxt == cur) break;
      cur = std::move(nxt);
      bind.assign(Value(cur));
    }
    C.stats.mu_stats.push_back(stat);
    return Value(std::move(cur));
  }

  check_guard(C, m);
  stat.entries_per_sweep = std::uint64_t(1) << (std::uint64_t(m) * n1 * n2);
  std::shared_ptr<const FuncTable> cur = std::make_shared<FuncTable>(m, n1, n2);
  Rebind bind(env, n.name, Value(cur));
  for (;;) {
    Value body = eval(n.a, env, C);
    if (is_rel(body)) throw eval_error("fixpoint body evaluated to a relation, expected arity " +
                                       std::to_string(m));
    std::shared_ptr<const FuncTable> nxt =
        std::get<std::shared_ptr<const FuncTable>>(std::move(body));
    ++stat.sweeps;
    ++C.stats.mu_iterations;
    if (C.opts.mu_observer) C.opts.mu_observer(n.name, stat.sweeps, *nxt);
    if (*nxt == *cur) break;
    cur = std::move(nxt);
    bind.assign(Value(cur));
  }
  C.stats.mu_stats.push_back(stat);
  return Value(std::move(cur));
}

inline Value eval(const FormulaPtr& f, Env& env, EvalCtx& C) {
  const FormulaNode& n = *f;
  switch (n.kind) {
    case Kind::Top:
    case Kind::Modal:
    case Kind::Neg:
    case Kind::And:
      return Value(eval_rel(f, env, C));

    case Kind::Var: {
      auto it = env.find(n.name);
      if (it == env.end()) throw eval_error("unbound variable '" + n.name + "' at evaluation");
      return it->second;
    }

    case Kind::Lambda:
      return Value(std::make_shared<FuncTable>(tabulate(f, env, C)));

    case Kind::Mu: {
      if (C.mu_hook) {
        if (auto v = C.mu_hook(Formula(f), env, C)) return std::move(*v);
      }
      return eval_mu(f, env, C);
    }

    case Kind::App: {
      // walk the application spine without materializing it
      const FormulaNode* head = &n;
      int nargs = 0;
      while (head->kind == Kind::App) {
        ++nargs;
        head = head->a.get();
      }
      if (head->kind == Kind::Mu && C.mu_hook) {
        if (auto v = C.mu_hook(Formula(f), env, C)) return std::move(*v);
      }
      // the head is usually a fixpoint variable; read it in place rather
      // than copying the table handle
      const Value* fp = nullptr;
      Value fv;
      if (head->kind == Kind::Var) {
        auto it = env.find(head->name);
        if (it == env.end())
          throw eval_error("unbound variable '" + head->name + "' at evaluation");
        fp = &it->second;
      } else {
        const FormulaPtr* hp = &n.a;
        while ((*hp)->kind == Kind::App) hp = &(*hp)->a;
        fv = eval(*hp, env, C);
        fp = &fv;
      }
      if (is_rel(*fp))
        throw eval_error("arity mismatch: relation applied to " + std::to_string(nargs) +
                         " argument(s)");
      const FuncTable& table = as_table(*fp);
      if (nargs > table.arity)
        throw eval_error("arity mismatch: arity-" + std::to_string(table.arity) +
                         " function applied to " + std::to_string(nargs) + " arguments");
      // arguments right to left, then index the table left to right
      if (nargs > 64) throw eval_error("application spine too long");
      std::uint64_t codes[64];
      int i = nargs;
      const FormulaNode* cur = &n;
      while (cur->kind == Kind::App) {
        codes[--i] = eval_rel(cur->b, env, C).bits().to_code();
        cur = cur->a.get();
      }
      std::uint64_t idx = 0;
      for (int j = 0; j < nargs; ++j) idx = (idx << table.bits_per_arg) | codes[j];
      if (nargs == table.arity) return Value(table.entries[idx]);
      // partial application: slice the block selected by the given prefix
      const int rem = table.arity - nargs;
      FuncTable out(rem, table.n1, table.n2);
      const std::uint64_t block = out.entries.size();
      const std::uint64_t offset = idx * block;
      for (std::uint64_t k = 0; k < block; ++k) out.entries[k] = table.entries[offset + k];
      return Value(std::make_shared<FuncTable>(std::move(out)));
    }
  }
  throw eval_error("malformed formula");
}

}  // namespace detail

/// Evaluates an order-<=1, dimension-2 formula over a pair of LTS by full
/// tabulation (Algorithm 1). The environment must supply every free
/// variable; both LTS must share the alphabet the formula mentions.
inline Value mc(const Formula& phi, Env env, const Lts& l1, const Lts& l2,
                const EvalOptions& opts = {}, EvalStats* stats = nullptr) {
  if (!l1.same_alphabet(l2)) throw eval_error("the two LTS must share an alphabet");
  ModalOps ops(l1, l2);
  EvalCtx C{ops, opts, {}, nullptr};
  Value v = detail::eval(phi.ptr(), env, C);
  if (stats) *stats = std::move(C.stats);
  return v;
}

inline Rel2 mc_rel(const Formula& phi, Env env, const Lts& l1, const Lts& l2,
                   const EvalOptions& opts = {}, EvalStats* stats = nullptr) {
  Value v = mc(phi, std::move(env), l1, l2, opts, stats);
  if (!is_rel(v)) throw eval_error("formula evaluates to a function, not a relation");
  return as_rel(v);
}

/// (p,q) |= phi for a closed formula of type P2.
inline bool check_pair(const Formula& phi, StateId p, StateId q, const Lts& l1, const Lts& l2,
                       const EvalOptions& opts = {}, EvalStats* stats = nullptr) {
  l1.require_state(p);
  l2.require_state(q);
  return mc_rel(phi, {}, l1, l2, opts, stats).test(p, q);
}

}  // namespace ltbt
