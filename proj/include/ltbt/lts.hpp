#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "ltbt/bits.hpp"
#include "ltbt/errors.hpp"

namespace ltbt {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

/// An action label. Compared by exact name. Labels must be printable,
/// non-empty, and must not contain whitespace, quotes, or the delimiter
/// characters used by the .aut and formula grammars.
class Action {
 public:
  explicit Action(std::string name) : name_(std::move(name)) {
    if (!valid(name_)) throw std::invalid_argument("invalid action label: '" + name_ + "'");
  }

  static bool valid(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
      if (c <= ' ' || c > '~') return false;
      if (c == '"' || c == '>' || c == ']' || c == '(' || c == ')' || c == ',') return false;
    }
    return true;
  }

  const std::string& name() const { return name_; }
  bool operator==(const Action& o) const { return name_ == o.name_; }
  bool operator!=(const Action& o) const { return name_ != o.name_; }
  bool operator<(const Action& o) const { return name_ < o.name_; }

 private:
  std::string name_;
};

struct Transition {
  StateId from;
  ActionId action;
  StateId to;
  auto operator<=>(const Transition&) const = default;
};

/// A finite labeled transition system. Immutable after construction and
/// safe to share across concurrent checks. The alphabet is an explicit,
/// ordered set; it may declare actions that label no transition.
class Lts {
 public:
  Lts(std::uint32_t num_states, std::vector<Action> alphabet,
      const std::vector<std::tuple<StateId, std::string, StateId>>& transitions,
      std::optional<StateId> initial = std::nullopt)
      : n_(num_states), alphabet_(std::move(alphabet)), initial_(initial) {
    for (ActionId i = 0; i < alphabet_.size(); ++i) {
      if (!action_ids_.emplace(alphabet_[i].name(), i).second)
        throw error("duplicate action in alphabet: " + alphabet_[i].name());
    }
    succ_.assign(alphabet_.size(), std::vector<Bits>(n_, Bits(n_)));
    pred_.assign(alphabet_.size(), std::vector<Bits>(n_, Bits(n_)));
    init_acts_.assign(n_, Bits(std::uint32_t(alphabet_.size())));
    trans_.reserve(transitions.size());
    std::set<Transition> seen;
    for (const auto& [from, label, to] : transitions) {
      auto it = action_ids_.find(label);
      if (it == action_ids_.end())
        throw error("transition label '" + label + "' is not in the alphabet");
      if (from >= n_ || to >= n_)
        throw error("transition endpoint out of range: (" + std::to_string(from) + ",\"" +
                    label + "\"," + std::to_string(to) + ") with " + std::to_string(n_) +
                    " states");
      Transition t{from, it->second, to};
      if (!seen.insert(t).second)
        throw error("duplicate transition: (" + std::to_string(from) + ",\"" + label + "\"," +
                    std::to_string(to) + ")");
      trans_.push_back(t);
      succ_[t.action][from].set(to);
      pred_[t.action][to].set(from);
      init_acts_[from].set(t.action);
    }
    if (initial_ && *initial_ >= n_ && n_ > 0)
      throw error("initial state out of range: " + std::to_string(*initial_));
  }

  std::uint32_t num_states() const { return n_; }
  const std::vector<Action>& alphabet() const { return alphabet_; }
  const std::vector<Transition>& transitions() const { return trans_; }
  std::optional<StateId> initial_state() const { return initial_; }

  std::optional<ActionId> action_id(std::string_view name) const {
    auto it = action_ids_.find(std::string(name));
    if (it == action_ids_.end()) return std::nullopt;
    return it->second;
  }

  ActionId require_action(std::string_view name) const {
    auto id = action_id(name);
    if (!id) throw error("unknown action: '" + std::string(name) + "'");
    return *id;
  }

  void require_state(StateId p) const {
    if (p >= n_) throw error("unknown state: " + std::to_string(p));
  }

  /// { q | (p,a,q) in transitions }
  const Bits& successors(StateId p, ActionId a) const { return succ_[a][p]; }
  const Bits& predecessors(StateId q, ActionId a) const { return pred_[a][q]; }

  std::vector<StateId> successor_set(StateId p, const Action& a) const {
    require_state(p);
    ActionId id = require_action(a.name());
    std::vector<StateId> out;
    succ_[id][p].for_each([&](std::uint32_t q) { out.push_back(q); });
    return out;
  }

  /// { a | successors(p,a) nonempty }, as a bit set over action ids.
  const Bits& initial_actions(StateId p) const { return init_acts_[p]; }

  std::vector<Action> initial_action_set(StateId p) const {
    require_state(p);
    std::vector<Action> out;
    init_acts_[p].for_each([&](std::uint32_t a) { out.push_back(alphabet_[a]); });
    return out;
  }

  bool deadlocked(StateId p) const { return init_acts_[p].none(); }

  /// { p | exists q in target with (p,a,q) in transitions }
  Bits pre_image(ActionId a, const Bits& target) const {
    Bits out(n_);
    target.for_each([&](std::uint32_t q) { out |= pred_[a][q]; });
    return out;
  }

  Bits pre_image(const Action& a, const Bits& target) const {
    return pre_image(require_action(a.name()), target);
  }

  Bits all_states() const { return Bits(n_, true); }

  bool same_alphabet(const Lts& o) const {
    if (alphabet_.size() != o.alphabet_.size()) return false;
    for (const auto& a : alphabet_)
      if (!o.action_id(a.name())) return false;
    return true;
  }

  /// Structural equality: same states, same alphabet (order included),
  /// same transition set.
  bool operator==(const Lts& o) const {
    if (n_ != o.n_ || alphabet_ != o.alphabet_) return false;
    auto key = [](const Lts& l) {
      std::set<std::tuple<StateId, std::string, StateId>> s;
      for (const auto& t : l.trans_) s.emplace(t.from, l.alphabet_[t.action].name(), t.to);
      return s;
    };
    return key(*this) == key(o);
  }

 private:
  std::uint32_t n_;
  std::vector<Action> alphabet_;
  std::map<std::string, ActionId> action_ids_;
  std::vector<Transition> trans_;
  std::vector<std::vector<Bits>> succ_, pred_;  // [action][state]
  std::vector<Bits> init_acts_;
  std::optional<StateId> initial_;
};

namespace detail {

struct AutCursor {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line = 1;
  std::size_t col = 1;

  SourceLoc loc() const { return {line, col}; }
  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_blanks() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
  }

  void expect(char c, const char* what) {
    skip_blanks();
    if (eof() || peek() != c)
      throw parse_error(std::string("expected '") + c + "' in " + what, loc());
    advance();
  }

  std::uint64_t number(const char* what) {
    skip_blanks();
    if (eof() || peek() < '0' || peek() > '9')
      throw parse_error(std::string("expected number in ") + what, loc());
    std::uint64_t v = 0;
    while (!eof() && peek() >= '0' && peek() <= '9') {
      v = v * 10 + std::uint64_t(peek() - '0');
      if (v > 0xffffffffull) throw parse_error("number too large", loc());
      advance();
    }
    return v;
  }

  std::string quoted_label() {
    skip_blanks();
    if (eof() || peek() != '"') throw parse_error("expected '\"' before label", loc());
    advance();
    std::string s;
    while (!eof() && peek() != '"') {
      s += peek();
      advance();
    }
    if (eof()) throw parse_error("unterminated label", loc());
    advance();
    if (!Action::valid(s)) throw parse_error("invalid label: '" + s + "'", loc());
    return s;
  }

  void end_of_line(const char* what) {
    skip_blanks();
    if (!eof() && peek() != '\n')
      throw parse_error(std::string("trailing characters after ") + what, loc());
    if (!eof()) advance();
  }
};

}  // namespace detail

/// Parses Aldebaran (.aut) text: a header `des (i0, m, n)` followed by m
/// lines `(from, "label", to)`. The header's initial state is kept as
/// metadata only. When a declared alphabet is given it must cover every
/// label used; otherwise the alphabet is the set of labels that appear,
/// in first-occurrence order.
inline Lts parse_aut(std::string_view text,
                     const std::optional<std::vector<Action>>& declared_alphabet = std::nullopt) {
  detail::AutCursor c{text};
  c.skip_blanks();
  if (text.substr(c.pos, 3) != "des") throw parse_error("expected 'des' header", c.loc());
  c.pos += 3;
  c.col += 3;
  c.expect('(', "header");
  std::uint64_t i0 = c.number("header");
  c.expect(',', "header");
  std::uint64_t m = c.number("header");
  c.expect(',', "header");
  std::uint64_t n = c.number("header");
  c.expect(')', "header");
  c.end_of_line("header");

  std::vector<std::tuple<StateId, std::string, StateId>> trans;
  std::vector<Action> alphabet;
  std::set<std::string> seen_labels;
  for (std::uint64_t k = 0; k < m; ++k) {
    c.skip_blanks();
    while (!c.eof() && c.peek() == '\n') {
      c.advance();
      c.skip_blanks();
    }
    if (c.eof())
      throw parse_error("expected " + std::to_string(m) + " transitions, got " +
                            std::to_string(k),
                        c.loc());
    c.expect('(', "transition");
    std::uint64_t from = c.number("transition");
    c.expect(',', "transition");
    std::string label = c.quoted_label();
    c.expect(',', "transition");
    std::uint64_t to = c.number("transition");
    c.expect(')', "transition");
    c.end_of_line("transition");
    if (from >= n || to >= n)
      throw parse_error("state index out of range in transition " + std::to_string(k + 1),
                        c.loc());
    if (declared_alphabet) {
      bool found = false;
      for (const auto& a : *declared_alphabet) found |= a.name() == label;
      if (!found)
        throw parse_error("label '" + label + "' is not in the declared alphabet", c.loc());
    } else if (seen_labels.insert(label).second) {
      alphabet.emplace_back(label);
    }
    trans.emplace_back(StateId(from), label, StateId(to));
  }
  c.skip_blanks();
  while (!c.eof() && c.peek() == '\n') {
    c.advance();
    c.skip_blanks();
  }
  if (!c.eof()) throw parse_error("unexpected text after transitions", c.loc());

  if (declared_alphabet) alphabet = *declared_alphabet;
  std::optional<StateId> initial;
  if (n > 0) {
    if (i0 >= n) throw parse_error("initial state out of range in header", {1, 1});
    initial = StateId(i0);
  }
  return Lts(StateId(n), std::move(alphabet), trans, initial);
}

inline std::string write_aut(const Lts& lts) {
  std::string out = "des (" + std::to_string(lts.initial_state().value_or(0)) + "," +
                    std::to_string(lts.transitions().size()) + "," +
                    std::to_string(lts.num_states()) + ")\n";
  for (const auto& t : lts.transitions()) {
    out += "(" + std::to_string(t.from) + ",\"" + lts.alphabet()[t.action].name() + "\"," +
           std::to_string(t.to) + ")\n";
  }
  return out;
}

}  // namespace ltbt
