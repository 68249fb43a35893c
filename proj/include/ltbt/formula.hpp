#pragma once

#include <cassert>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ltbt/errors.hpp"
#include "ltbt/lts.hpp"

namespace ltbt {

enum class Variance { Monotone, Antitone, Arbitrary };

inline Variance negate(Variance v) {
  switch (v) {
    case Variance::Monotone: return Variance::Antitone;
    case Variance::Antitone: return Variance::Monotone;
    default: return Variance::Arbitrary;
  }
}

inline char variance_mark(Variance v) {
  switch (v) {
    case Variance::Monotone: return '+';
    case Variance::Antitone: return '-';
    default: return '0';
  }
}

/// Types of the logic: Prop(d) for dimension-d propositions, and
/// variance-annotated arrows. Right-associative; the normal form is
/// t1^v1 -> ... -> tm^vm -> Prop(d).
class LogicType {
 public:
  LogicType() = default;

  static LogicType prop(int d);
  static LogicType arrow(LogicType param, Variance v, LogicType result);

  bool valid() const { return node_ != nullptr; }
  bool is_prop() const;
  bool is_arrow() const;
  int prop_dim() const;
  const LogicType& param() const;
  Variance variance() const;
  const LogicType& result() const;

  /// Number of arrows in the spine.
  int arity() const;
  /// Prop dimension at the end of the spine.
  int final_dim() const;
  int order() const;

  bool operator==(const LogicType& o) const;
  bool operator!=(const LogicType& o) const { return !(*this == o); }

  std::string to_string() const;

 private:
  struct Node;
  std::shared_ptr<const Node> node_;
};

struct LogicType::Node {
  bool is_prop;
  int dim;  // Prop only
  LogicType param;
  Variance variance;
  LogicType result;
};

inline LogicType LogicType::prop(int d) {
  LogicType t;
  t.node_ = std::make_shared<Node>(Node{true, d, {}, Variance::Monotone, {}});
  return t;
}

inline LogicType LogicType::arrow(LogicType param, Variance v, LogicType result) {
  LogicType t;
  t.node_ = std::make_shared<Node>(Node{false, 0, std::move(param), v, std::move(result)});
  return t;
}

inline bool LogicType::is_prop() const { return node_ && node_->is_prop; }
inline bool LogicType::is_arrow() const { return node_ && !node_->is_prop; }
inline int LogicType::prop_dim() const { return node_->dim; }
inline const LogicType& LogicType::param() const { return node_->param; }
inline Variance LogicType::variance() const { return node_->variance; }
inline const LogicType& LogicType::result() const { return node_->result; }

inline int LogicType::arity() const {
  int m = 0;
  const Node* n = node_.get();
  while (n && !n->is_prop) {
    ++m;
    n = n->result.node_.get();
  }
  return m;
}

inline int LogicType::final_dim() const {
  const Node* n = node_.get();
  while (n && !n->is_prop) n = n->result.node_.get();
  return n ? n->dim : 0;
}

inline int LogicType::order() const {
  if (!node_ || node_->is_prop) return 0;
  int po = 1 + node_->param.order();
  int ro = node_->result.order();
  return po > ro ? po : ro;
}

inline bool LogicType::operator==(const LogicType& o) const {
  if (node_ == o.node_) return true;
  if (!node_ || !o.node_) return false;
  if (node_->is_prop != o.node_->is_prop) return false;
  if (node_->is_prop) return node_->dim == o.node_->dim;
  return node_->variance == o.node_->variance && node_->param == o.node_->param &&
         node_->result == o.node_->result;
}

inline std::string LogicType::to_string() const {
  if (!node_) return "<none>";
  if (node_->is_prop) return "P" + std::to_string(node_->dim);
  std::string lhs = node_->param.to_string();
  if (node_->param.is_arrow()) lhs = "(" + lhs + ")";
  std::string arr = "->";
  if (node_->variance != Variance::Monotone) arr += variance_mark(node_->variance);
  return lhs + " " + arr + " " + node_->result.to_string();
}

enum class Kind { Top, Modal, Neg, And, Var, Lambda, Mu, App };

class Formula;
struct FormulaNode;
using FormulaPtr = std::shared_ptr<const FormulaNode>;

struct FormulaNode {
  Kind kind;
  SourceLoc loc{};
  int dim = 0;            // Top
  std::string name;       // Modal: action; Var/Lambda/Mu: variable
  int index = 0;          // Modal: component moved
  Variance variance = Variance::Monotone;  // Lambda
  LogicType type;         // Lambda: parameter type; Mu: fixpoint type
  FormulaPtr a, b;        // Modal/Neg/Lambda/Mu: a; And/App: a, b
};

/// Immutable formula AST. Derived operators (or, box, xor, bottom, the
/// parameterised-mu sugar) are desugared into the eight core node kinds.
class Formula {
 public:
  Formula() = default;
  explicit Formula(FormulaPtr p) : p_(std::move(p)) {}

  bool valid() const { return p_ != nullptr; }
  const FormulaNode& node() const { return *p_; }
  const FormulaPtr& ptr() const { return p_; }
  Kind kind() const { return p_->kind; }
  SourceLoc loc() const { return p_->loc; }

  Formula child_a() const { return Formula(p_->a); }
  Formula child_b() const { return Formula(p_->b); }

  // --- core constructors ---

  static Formula top(int d, SourceLoc loc = {}) {
    return mk({Kind::Top, loc, d, "", 0, Variance::Monotone, {}, nullptr, nullptr});
  }
  static Formula modal(std::string action, int index, Formula body, SourceLoc loc = {}) {
    return mk({Kind::Modal, loc, 0, std::move(action), index, Variance::Monotone, {},
               body.p_, nullptr});
  }
  static Formula neg(Formula body, SourceLoc loc = {}) {
    return mk({Kind::Neg, loc, 0, "", 0, Variance::Monotone, {}, body.p_, nullptr});
  }
  static Formula conj(Formula l, Formula r, SourceLoc loc = {}) {
    return mk({Kind::And, loc, 0, "", 0, Variance::Monotone, {}, l.p_, r.p_});
  }
  static Formula var(std::string name, SourceLoc loc = {}) {
    return mk({Kind::Var, loc, 0, std::move(name), 0, Variance::Monotone, {}, nullptr,
               nullptr});
  }
  static Formula lambda(std::string name, Variance v, LogicType param_type, Formula body,
                        SourceLoc loc = {}) {
    return mk({Kind::Lambda, loc, 0, std::move(name), 0, v, std::move(param_type), body.p_,
               nullptr});
  }
  static Formula mu(std::string name, LogicType type, Formula body, SourceLoc loc = {}) {
    return mk({Kind::Mu, loc, 0, std::move(name), 0, Variance::Monotone, std::move(type),
               body.p_, nullptr});
  }
  static Formula app(Formula fun, Formula arg, SourceLoc loc = {}) {
    return mk({Kind::App, loc, 0, "", 0, Variance::Monotone, {}, fun.p_, arg.p_});
  }

  // --- derived constructors (desugar immediately) ---

  static Formula bottom(int d, SourceLoc loc = {}) { return neg(top(d, loc), loc); }
  static Formula disj(Formula l, Formula r, SourceLoc loc = {}) {
    return neg(conj(neg(l, loc), neg(r, loc), loc), loc);
  }
  static Formula box(std::string action, int index, Formula body, SourceLoc loc = {}) {
    return neg(modal(std::move(action), index, neg(body, loc), loc), loc);
  }
  /// Non-equivalence: (l & !r) | (!l & r)
  static Formula xor_(Formula l, Formula r, SourceLoc loc = {}) {
    return disj(conj(l, neg(r, loc), loc), conj(neg(l, loc), r, loc), loc);
  }
  static Formula implies(Formula l, Formula r, SourceLoc loc = {}) {
    return disj(neg(l, loc), r, loc);
  }

  static Formula conj_all(const std::vector<Formula>& fs, int d) {
    if (fs.empty()) return top(d);
    Formula out = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) out = conj(out, fs[i]);
    return out;
  }
  static Formula disj_all(const std::vector<Formula>& fs, int d) {
    if (fs.empty()) return bottom(d);
    Formula out = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) out = disj(out, fs[i]);
    return out;
  }
  static Formula app_all(Formula fun, const std::vector<Formula>& args) {
    Formula out = fun;
    for (const auto& a : args) out = app(out, a);
    return out;
  }

  // --- structure queries ---

  bool is_bottom() const {
    return kind() == Kind::Neg && child_a().kind() == Kind::Top;
  }
  /// Matches the desugared or-pattern !(!l & !r); fills l, r.
  bool match_or(Formula& l, Formula& r) const {
    if (kind() != Kind::Neg) return false;
    Formula c = child_a();
    if (c.kind() != Kind::And) return false;
    Formula cl = c.child_a(), cr = c.child_b();
    if (cl.kind() != Kind::Neg || cr.kind() != Kind::Neg) return false;
    l = cl.child_a();
    r = cr.child_a();
    return true;
  }
  /// Matches the desugared box-pattern ![a]i!body; fills action/index/body.
  bool match_box(std::string& action, int& index, Formula& body) const {
    if (kind() != Kind::Neg) return false;
    Formula c = child_a();
    if (c.kind() != Kind::Modal) return false;
    Formula d = c.child_a();
    if (d.kind() != Kind::Neg) return false;
    action = c.node().name;
    index = c.node().index;
    body = d.child_a();
    return true;
  }

  /// Function and arguments of a (possibly nested) application spine.
  Formula spine_head(std::vector<Formula>* args = nullptr) const {
    if (kind() != Kind::App) {
      if (args) args->clear();
      return *this;
    }
    std::vector<Formula> rev;
    Formula f = *this;
    while (f.kind() == Kind::App) {
      rev.push_back(f.child_b());
      f = f.child_a();
    }
    if (args) args->assign(rev.rbegin(), rev.rend());
    return f;
  }

  bool operator==(const Formula& o) const { return structural_equal(*this, o); }

  static bool structural_equal(const Formula& x, const Formula& y) {
    if (x.p_ == y.p_) return true;
    if (!x.p_ || !y.p_) return false;
    const FormulaNode& a = *x.p_;
    const FormulaNode& b = *y.p_;
    if (a.kind != b.kind || a.dim != b.dim || a.name != b.name || a.index != b.index ||
        a.variance != b.variance)
      return false;
    if (a.type.valid() != b.type.valid()) return false;
    if (a.type.valid() && a.type != b.type) return false;
    if ((a.a == nullptr) != (b.a == nullptr) || (a.b == nullptr) != (b.b == nullptr))
      return false;
    if (a.a && !structural_equal(Formula(a.a), Formula(b.a))) return false;
    if (a.b && !structural_equal(Formula(a.b), Formula(b.b))) return false;
    return true;
  }

 private:
  static Formula mk(FormulaNode n) { return Formula(std::make_shared<FormulaNode>(std::move(n))); }
  FormulaPtr p_;
};

inline void collect_free_vars(const Formula& f, std::set<std::string>& bound,
                              std::set<std::string>& out) {
  switch (f.kind()) {
    case Kind::Top: return;
    case Kind::Var:
      if (!bound.count(f.node().name)) out.insert(f.node().name);
      return;
    case Kind::Modal:
    case Kind::Neg:
      collect_free_vars(f.child_a(), bound, out);
      return;
    case Kind::And:
    case Kind::App:
      collect_free_vars(f.child_a(), bound, out);
      collect_free_vars(f.child_b(), bound, out);
      return;
    case Kind::Lambda:
    case Kind::Mu: {
      bool inserted = bound.insert(f.node().name).second;
      collect_free_vars(f.child_a(), bound, out);
      if (inserted) bound.erase(f.node().name);
      return;
    }
  }
}

inline std::set<std::string> free_vars(const Formula& f) {
  std::set<std::string> bound, out;
  collect_free_vars(f, bound, out);
  return out;
}

inline bool mentions_var(const Formula& f, const std::string& x) {
  return free_vars(f).count(x) > 0;
}

/// Swaps modal indices 1 and 2 throughout (dimension-2 formulas).
inline Formula swap_indices(const Formula& f) {
  const FormulaNode& n = f.node();
  switch (n.kind) {
    case Kind::Top:
    case Kind::Var:
      return f;
    case Kind::Modal: {
      int i = n.index == 1 ? 2 : n.index == 2 ? 1 : n.index;
      return Formula::modal(n.name, i, swap_indices(f.child_a()), n.loc);
    }
    case Kind::Neg:
      return Formula::neg(swap_indices(f.child_a()), n.loc);
    case Kind::And:
      return Formula::conj(swap_indices(f.child_a()), swap_indices(f.child_b()), n.loc);
    case Kind::Lambda:
      return Formula::lambda(n.name, n.variance, n.type, swap_indices(f.child_a()), n.loc);
    case Kind::Mu:
      return Formula::mu(n.name, n.type, swap_indices(f.child_a()), n.loc);
    case Kind::App:
      return Formula::app(swap_indices(f.child_a()), swap_indices(f.child_b()), n.loc);
  }
  return f;
}

namespace detail {

inline std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (int k = 1;; ++k) {
    std::string cand = base + "'" + std::to_string(k);
    if (!avoid.count(cand)) return cand;
  }
}

inline Formula rename_free(const Formula& f, const std::string& from, const std::string& to) {
  const FormulaNode& n = f.node();
  switch (n.kind) {
    case Kind::Top: return f;
    case Kind::Var: return n.name == from ? Formula::var(to, n.loc) : f;
    case Kind::Modal:
      return Formula::modal(n.name, n.index, rename_free(f.child_a(), from, to), n.loc);
    case Kind::Neg: return Formula::neg(rename_free(f.child_a(), from, to), n.loc);
    case Kind::And:
      return Formula::conj(rename_free(f.child_a(), from, to),
                           rename_free(f.child_b(), from, to), n.loc);
    case Kind::App:
      return Formula::app(rename_free(f.child_a(), from, to),
                          rename_free(f.child_b(), from, to), n.loc);
    case Kind::Lambda:
      if (n.name == from) return f;
      return Formula::lambda(n.name, n.variance, n.type, rename_free(f.child_a(), from, to),
                             n.loc);
    case Kind::Mu:
      if (n.name == from) return f;
      return Formula::mu(n.name, n.type, rename_free(f.child_a(), from, to), n.loc);
  }
  return f;
}

}  // namespace detail

/// Capture-avoiding substitution of psi for free occurrences of x.
inline Formula substitute(const Formula& f, const std::string& x, const Formula& psi) {
  const FormulaNode& n = f.node();
  switch (n.kind) {
    case Kind::Top: return f;
    case Kind::Var: return n.name == x ? psi : f;
    case Kind::Modal:
      return Formula::modal(n.name, n.index, substitute(f.child_a(), x, psi), n.loc);
    case Kind::Neg: return Formula::neg(substitute(f.child_a(), x, psi), n.loc);
    case Kind::And:
      return Formula::conj(substitute(f.child_a(), x, psi), substitute(f.child_b(), x, psi),
                           n.loc);
    case Kind::App:
      return Formula::app(substitute(f.child_a(), x, psi), substitute(f.child_b(), x, psi),
                          n.loc);
    case Kind::Lambda:
    case Kind::Mu: {
      if (n.name == x) return f;  // bound occurrence shadows
      Formula body = f.child_a();
      std::string binder = n.name;
      std::set<std::string> psi_free = free_vars(psi);
      if (psi_free.count(binder) && mentions_var(body, x)) {
        std::set<std::string> avoid = psi_free;
        for (const auto& v : free_vars(body)) avoid.insert(v);
        avoid.insert(x);
        std::string nb = detail::fresh_name(binder, avoid);
        body = detail::rename_free(body, binder, nb);
        binder = nb;
      }
      Formula nbody = substitute(body, x, psi);
      if (n.kind == Kind::Lambda)
        return Formula::lambda(binder, n.variance, n.type, nbody, n.loc);
      return Formula::mu(binder, n.type, nbody, n.loc);
    }
  }
  return f;
}

/// Removes double negations everywhere: !!phi => phi.
inline Formula simplify_neg(const Formula& f) {
  const FormulaNode& n = f.node();
  switch (n.kind) {
    case Kind::Top:
    case Kind::Var:
      return f;
    case Kind::Neg: {
      Formula body = f.child_a();
      if (body.kind() == Kind::Neg) return simplify_neg(body.child_a());
      return Formula::neg(simplify_neg(body), n.loc);
    }
    case Kind::Modal:
      return Formula::modal(n.name, n.index, simplify_neg(f.child_a()), n.loc);
    case Kind::And:
      return Formula::conj(simplify_neg(f.child_a()), simplify_neg(f.child_b()), n.loc);
    case Kind::App:
      return Formula::app(simplify_neg(f.child_a()), simplify_neg(f.child_b()), n.loc);
    case Kind::Lambda:
      return Formula::lambda(n.name, n.variance, n.type, simplify_neg(f.child_a()), n.loc);
    case Kind::Mu:
      return Formula::mu(n.name, n.type, simplify_neg(f.child_a()), n.loc);
  }
  return f;
}

/// Alpha-equivalence (structural equality modulo bound-variable names).
inline bool alpha_equal(const Formula& x, const Formula& y,
                        std::map<std::string, std::string> envx = {},
                        std::map<std::string, std::string> envy = {}) {
  const FormulaNode& a = x.node();
  const FormulaNode& b = y.node();
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::Top: return a.dim == b.dim;
    case Kind::Var: {
      auto ix = envx.find(a.name);
      auto iy = envy.find(b.name);
      if ((ix == envx.end()) != (iy == envy.end())) return false;
      if (ix == envx.end()) return a.name == b.name;  // both free
      return ix->second == iy->second;
    }
    case Kind::Modal:
      return a.name == b.name && a.index == b.index &&
             alpha_equal(x.child_a(), y.child_a(), envx, envy);
    case Kind::Neg: return alpha_equal(x.child_a(), y.child_a(), envx, envy);
    case Kind::And:
    case Kind::App:
      return alpha_equal(x.child_a(), y.child_a(), envx, envy) &&
             alpha_equal(x.child_b(), y.child_b(), envx, envy);
    case Kind::Lambda:
    case Kind::Mu: {
      if (a.kind == Kind::Lambda && a.variance != b.variance) return false;
      if (a.type != b.type) return false;
      std::string tag = "#" + std::to_string(envx.size());
      envx[a.name] = tag;
      envy[b.name] = tag;
      return alpha_equal(x.child_a(), y.child_a(), envx, envy);
    }
  }
  return false;
}

namespace detail {

// Precedence levels for printing: binder 0, or 1, xor 2 (unused: xor is
// printed desugared), and 3, application 4, prefix 5, atom 6.
inline std::string print_formula(const Formula& f, int min_level);

inline std::string print_prefix_chain(const Formula& f) {
  // prefix* atom — usable as an application argument without parentheses
  if (f.is_bottom()) return "false";
  std::string action;
  int index;
  Formula body;
  if (f.match_box(action, index, body))
    return "[" + action + "]" + std::to_string(index) + " " + print_prefix_chain(body);
  switch (f.kind()) {
    case Kind::Top: return "true";
    case Kind::Var: return f.node().name;
    case Kind::Neg: return "!" + print_prefix_chain(f.child_a());
    case Kind::Modal:
      return "<" + f.node().name + ">" + std::to_string(f.node().index) + " " +
             print_prefix_chain(f.child_a());
    default: return "(" + print_formula(f, 0) + ")";
  }
}

inline std::string print_formula(const Formula& f, int min_level) {
  Formula l, r;
  if (f.is_bottom()) return "false";
  if (f.match_or(l, r)) {
    // left-associative: right operand needs parens when itself an or
    std::string s = print_formula(l, 1) + " | " + print_formula(r, 2);
    return min_level > 1 ? "(" + s + ")" : s;
  }
  std::string action;
  int index;
  Formula body;
  if (f.match_box(action, index, body)) return print_prefix_chain(f);
  switch (f.kind()) {
    case Kind::Top: return "true";
    case Kind::Var: return f.node().name;
    case Kind::Neg:
    case Kind::Modal:
      return print_prefix_chain(f);
    case Kind::And: {
      std::string s = print_formula(f.child_a(), 3) + " & " + print_formula(f.child_b(), 4);
      return min_level > 3 ? "(" + s + ")" : s;
    }
    case Kind::App: {
      std::vector<Formula> args;
      Formula head = f.spine_head(&args);
      std::string s = print_prefix_chain(head);
      for (const auto& a : args) s += " " + print_prefix_chain(a);
      return min_level > 4 ? "(" + s + ")" : s;
    }
    case Kind::Lambda: {
      std::string s = "lambda " + f.node().name + ":" + variance_mark(f.node().variance) +
                      ":" + f.node().type.to_string() + ". " + print_formula(f.child_a(), 0);
      return min_level > 0 ? "(" + s + ")" : s;
    }
    case Kind::Mu: {
      std::string s = "mu " + f.node().name + ":" + f.node().type.to_string() + ". " +
                      print_formula(f.child_a(), 0);
      return min_level > 0 ? "(" + s + ")" : s;
    }
  }
  return "?";
}

}  // namespace detail

/// Prints in the surface grammar; parsing the result yields the same AST
/// up to alpha-renaming. Derived operators that survive resugaring
/// (or, box, false) are printed in their sugared form.
inline std::string to_text(const Formula& f) { return detail::print_formula(f, 0); }

}  // namespace ltbt
