#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "ltbt/errors.hpp"
#include "ltbt/formula.hpp"

namespace ltbt {

/// An ordered list of variance-annotated typing assumptions
/// x1^v1 : t1, ..., xm^vm : tm. Lookup is innermost-first.
class TypingContext {
 public:
  struct Entry {
    std::string name;
    Variance variance;
    LogicType type;
  };

  TypingContext() = default;
  explicit TypingContext(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  TypingContext extended(std::string name, Variance v, LogicType t) const {
    TypingContext out = *this;
    out.entries_.push_back({std::move(name), v, std::move(t)});
    return out;
  }

  /// Swaps the variance of every assumption: + <-> -, 0 fixed.
  TypingContext negated() const {
    TypingContext out = *this;
    for (auto& e : out.entries_) e.variance = negate(e.variance);
    return out;
  }

  const Entry* lookup(const std::string& name) const {
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
      if (it->name == name) return &*it;
    return nullptr;
  }

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

/// Checks Gamma |- phi : tau and returns tau. Variables are usable only
/// at variance + or 0; negation checks its body under the negated
/// context; application has one rule per arrow variance (the antitone
/// rule checks the argument under the negated context, the arbitrary
/// rule under both); mu requires a monotone body of the annotated type.
inline LogicType type_check(const TypingContext& ctx, const Formula& f) {
  const FormulaNode& n = f.node();
  switch (n.kind) {
    case Kind::Top:
      if (n.dim < 1) throw type_error("top has no dimension", n.loc);
      return LogicType::prop(n.dim);

    case Kind::Modal: {
      LogicType t = type_check(ctx, f.child_a());
      if (!t.is_prop())
        throw type_error("modality applied to a non-proposition of type " + t.to_string(),
                         n.loc);
      if (n.index < 1 || n.index > t.prop_dim())
        throw type_error("modal index " + std::to_string(n.index) +
                             " exceeds dimension " + std::to_string(t.prop_dim()),
                         n.loc);
      return t;
    }

    case Kind::Neg: {
      LogicType t = type_check(ctx.negated(), f.child_a());
      if (!t.is_prop())
        throw type_error("negation applied to a non-proposition of type " + t.to_string(),
                         n.loc);
      return t;
    }

    case Kind::And: {
      LogicType l = type_check(ctx, f.child_a());
      LogicType r = type_check(ctx, f.child_b());
      if (!l.is_prop() || !r.is_prop() || l != r)
        throw type_error("conjunction of " + l.to_string() + " and " + r.to_string(), n.loc);
      return l;
    }

    case Kind::Var: {
      const auto* e = ctx.lookup(n.name);
      if (!e) throw type_error("unbound variable '" + n.name + "'", n.loc);
      if (e->variance == Variance::Antitone)
        throw type_error("variance violation: variable '" + n.name +
                             "' used at forbidden polarity",
                         n.loc);
      return e->type;
    }

    case Kind::Lambda: {
      LogicType body =
          type_check(ctx.extended(n.name, n.variance, n.type), f.child_a());
      return LogicType::arrow(n.type, n.variance, body);
    }

    case Kind::Mu: {
      LogicType body =
          type_check(ctx.extended(n.name, Variance::Monotone, n.type), f.child_a());
      if (body != n.type)
        throw type_error("fixpoint body has type " + body.to_string() +
                             " but the binder is annotated " + n.type.to_string(),
                         n.loc);
      return n.type;
    }

    case Kind::App: {
      LogicType ft = type_check(ctx, f.child_a());
      if (!ft.is_arrow())
        throw type_error("application of a non-function of type " + ft.to_string(), n.loc);
      const Formula arg = f.child_b();
      auto check_arg = [&](const TypingContext& c) {
        LogicType at = type_check(c, arg);
        if (at != ft.param())
          throw type_error("argument has type " + at.to_string() + " but " +
                               ft.param().to_string() + " is expected",
                           n.loc);
      };
      switch (ft.variance()) {
        case Variance::Monotone: check_arg(ctx); break;
        case Variance::Antitone: check_arg(ctx.negated()); break;
        case Variance::Arbitrary:
          check_arg(ctx);
          check_arg(ctx.negated());
          break;
      }
      return ft.result();
    }
  }
  throw type_error("malformed formula", n.loc);
}

inline LogicType type_check_closed(const Formula& f) { return type_check(TypingContext{}, f); }

/// Maximum order over all type annotations in the formula; 0 when no
/// arrow type is annotated.
inline int order_of(const Formula& f) {
  const FormulaNode& n = f.node();
  int o = 0;
  if (n.kind == Kind::Lambda || n.kind == Kind::Mu) o = n.type.order();
  if (n.a) o = std::max(o, order_of(f.child_a()));
  if (n.b) o = std::max(o, order_of(f.child_b()));
  return o;
}

}  // namespace ltbt
