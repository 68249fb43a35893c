#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ltbt/errors.hpp"
#include "ltbt/formula.hpp"

namespace ltbt {
namespace detail {

enum class Tok {
  End, Ident, Int, True, False, Mu, Lambda, Nu,
  LParen, RParen, Dot, Comma, Colon, Amp, Pipe, Bang, Caret,
  Arrow, Plus, Minus, Diamond, Box,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;       // Ident; Diamond/Box: action
  std::uint64_t number = 0;  // Int; Diamond/Box: index
  Variance arrow_variance = Variance::Monotone;
  SourceLoc loc;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { next(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    next();
    return t;
  }

 private:
  void next() {
    skip_space();
    tok_ = Token{};
    tok_.loc = loc();
    if (pos_ >= text_.size()) {
      tok_.kind = Tok::End;
      return;
    }
    char c = text_[pos_];
    if (is_ident_start(c)) {
      std::string s;
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) s += get();
      tok_.text = s;
      if (s == "true") tok_.kind = Tok::True;
      else if (s == "false") tok_.kind = Tok::False;
      else if (s == "mu") tok_.kind = Tok::Mu;
      else if (s == "lambda") tok_.kind = Tok::Lambda;
      else if (s == "nu") tok_.kind = Tok::Nu;
      else tok_.kind = Tok::Ident;
      return;
    }
    if (c >= '0' && c <= '9') {
      tok_.kind = Tok::Int;
      tok_.number = lex_number();
      return;
    }
    switch (c) {
      case '(': get(); tok_.kind = Tok::LParen; return;
      case ')': get(); tok_.kind = Tok::RParen; return;
      case '.': get(); tok_.kind = Tok::Dot; return;
      case ',': get(); tok_.kind = Tok::Comma; return;
      case ':': get(); tok_.kind = Tok::Colon; return;
      case '&': get(); tok_.kind = Tok::Amp; return;
      case '|': get(); tok_.kind = Tok::Pipe; return;
      case '!': get(); tok_.kind = Tok::Bang; return;
      case '^': get(); tok_.kind = Tok::Caret; return;
      case '+': get(); tok_.kind = Tok::Plus; return;
      case '-':
        get();
        if (pos_ < text_.size() && text_[pos_] == '>') {
          get();
          tok_.kind = Tok::Arrow;
          // an immediately following mark annotates the arrow's variance
          if (pos_ < text_.size()) {
            char v = text_[pos_];
            if (v == '+') { get(); tok_.arrow_variance = Variance::Monotone; }
            else if (v == '-') { get(); tok_.arrow_variance = Variance::Antitone; }
            else if (v == '0') { get(); tok_.arrow_variance = Variance::Arbitrary; }
          }
          return;
        }
        tok_.kind = Tok::Minus;
        return;
      case '<': lex_modal('>', Tok::Diamond); return;
      case '[': lex_modal(']', Tok::Box); return;
      default:
        throw parse_error(std::string("unexpected character '") + c + "'", loc());
    }
  }

  void lex_modal(char close, Tok kind) {
    get();  // opening bracket
    std::string action;
    while (pos_ < text_.size() && text_[pos_] != close) {
      char c = text_[pos_];
      if (c <= ' ') throw parse_error("whitespace in modality action", loc());
      action += get();
    }
    if (pos_ >= text_.size()) throw parse_error("unterminated modality", loc());
    get();  // closing bracket
    if (!Action::valid(action))
      throw parse_error("invalid action in modality: '" + action + "'", tok_.loc);
    if (pos_ >= text_.size() || text_[pos_] < '0' || text_[pos_] > '9')
      throw parse_error("modality needs a component index, e.g. <a>1", loc());
    tok_.kind = kind;
    tok_.text = action;
    tok_.number = lex_number();
  }

  std::uint64_t lex_number() {
    std::uint64_t v = 0;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
      v = v * 10 + std::uint64_t(text_[pos_] - '0');
      if (v > 1000000) throw parse_error("number too large", loc());
      get();
    }
    return v;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        get();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') get();
      } else {
        break;
      }
    }
  }

  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9') || c == '\'';
  }

  char get() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  SourceLoc loc() const { return {line_, col_}; }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1, col_ = 1;
  Token tok_;
};

class FormulaParser {
 public:
  FormulaParser(std::string_view text, int dim, std::set<std::string> allowed_free)
      : lex_(text), dim_(dim), free_ok_(std::move(allowed_free)) {
    used_ = free_ok_;
  }

  Formula parse() {
    Formula f = formula();
    if (lex_.peek().kind != Tok::End)
      throw parse_error("unexpected trailing input", lex_.peek().loc);
    return f;
  }

 private:
  struct Binding {
    std::string surface;
    std::string unique;
  };

  Formula formula() {
    Tok k = lex_.peek().kind;
    if (k == Tok::Mu || k == Tok::Nu) return fixpoint();
    if (k == Tok::Lambda) return lambda();
    return implication();
  }

  Formula fixpoint() {
    Token kw = lex_.take();
    Token name = expect(Tok::Ident, "fixpoint variable");
    std::vector<std::pair<std::string, Variance>> params;
    if (lex_.peek().kind == Tok::LParen) {
      lex_.take();
      for (;;) {
        Token pn = expect(Tok::Ident, "parameter name");
        expect(Tok::Colon, "':' after parameter name");
        Variance v = variance();
        params.emplace_back(pn.text, v);
        if (lex_.peek().kind == Tok::Comma) {
          lex_.take();
          continue;
        }
        expect(Tok::RParen, "')' after parameter list");
        break;
      }
    }
    expect(Tok::Colon, "':' before fixpoint type");
    LogicType ty = type();
    // the parameter list overrides the variances on the type's arrow spine
    if (!params.empty()) {
      if (std::size_t(ty.arity()) < params.size())
        throw parse_error("fixpoint type has fewer arrows than parameters", name.loc);
      std::vector<LogicType> spine;
      LogicType rest = ty;
      for (std::size_t i = 0; i < params.size(); ++i) {
        spine.push_back(rest.param());
        rest = rest.result();
      }
      for (std::size_t i = params.size(); i-- > 0;)
        rest = LogicType::arrow(spine[i], params[i].second, rest);
      ty = rest;
    }
    expect(Tok::Dot, "'.' after fixpoint type");
    if (kw.kind == Tok::Nu && !ty.is_prop())
      throw parse_error("nu is only available at proposition types", kw.loc);

    std::string unique = push(name.text);
    std::vector<std::string> param_unique;
    for (auto& [pn, pv] : params) param_unique.push_back(push(pn));
    Formula body = formula();
    for (std::size_t i = params.size(); i-- > 0;) pop();
    pop();

    // desugar the parameter list into a lambda chain
    LogicType rest = ty;
    std::vector<LogicType> ptypes;
    for (std::size_t i = 0; i < params.size(); ++i) {
      ptypes.push_back(rest.param());
      rest = rest.result();
    }
    for (std::size_t i = params.size(); i-- > 0;)
      body = Formula::lambda(param_unique[i], params[i].second, ptypes[i], body, name.loc);

    if (kw.kind == Tok::Nu) {
      // nu x. phi  =  ! mu x. ! phi[!x / x]
      Formula flipped = substitute(body, unique, Formula::neg(Formula::var(unique)));
      return Formula::neg(Formula::mu(unique, ty, Formula::neg(flipped, kw.loc), kw.loc),
                          kw.loc);
    }
    return Formula::mu(unique, ty, body, kw.loc);
  }

  Formula lambda() {
    Token kw = lex_.take();
    Token name = expect(Tok::Ident, "lambda variable");
    expect(Tok::Colon, "':' after lambda variable");
    Variance v = variance();
    expect(Tok::Colon, "':' before lambda type");
    LogicType ty = type();
    expect(Tok::Dot, "'.' after lambda type");
    std::string unique = push(name.text);
    Formula body = formula();
    pop();
    return Formula::lambda(unique, v, ty, body, kw.loc);
  }

  Variance variance() {
    Token t = lex_.take();
    if (t.kind == Tok::Plus) return Variance::Monotone;
    if (t.kind == Tok::Minus) return Variance::Antitone;
    if (t.kind == Tok::Int && t.number == 0) return Variance::Arbitrary;
    throw parse_error("expected variance mark '+', '-' or '0'", t.loc);
  }

  LogicType type() {
    LogicType lhs = type_prim();
    if (lex_.peek().kind == Tok::Arrow) {
      Token arr = lex_.take();
      LogicType rhs = type();  // right-associative
      return LogicType::arrow(lhs, arr.arrow_variance, rhs);
    }
    return lhs;
  }

  LogicType type_prim() {
    Token t = lex_.take();
    if (t.kind == Tok::LParen) {
      LogicType inner = type();
      expect(Tok::RParen, "')' in type");
      return inner;
    }
    if (t.kind == Tok::Ident && t.text.size() >= 2 && t.text[0] == 'P') {
      int d = 0;
      for (std::size_t i = 1; i < t.text.size(); ++i) {
        if (t.text[i] < '0' || t.text[i] > '9') d = -1;
        if (d < 0) break;
        d = d * 10 + (t.text[i] - '0');
      }
      if (d >= 1) return LogicType::prop(d);
    }
    throw parse_error("expected a type (P<d> or parenthesised arrow)", t.loc);
  }

  Formula implication() {
    Formula l = disjunction();
    if (lex_.peek().kind == Tok::Arrow) {
      SourceLoc loc = lex_.take().loc;
      Formula r = lex_.peek().kind == Tok::Mu || lex_.peek().kind == Tok::Nu ||
                          lex_.peek().kind == Tok::Lambda
                      ? formula()
                      : implication();
      return Formula::implies(l, r, loc);
    }
    return l;
  }

  Formula disjunction() {
    Formula out = xorexpr();
    while (lex_.peek().kind == Tok::Pipe) {
      SourceLoc loc = lex_.take().loc;
      out = Formula::disj(out, xorexpr(), loc);
    }
    return out;
  }

  Formula xorexpr() {
    Formula out = conjunction();
    while (lex_.peek().kind == Tok::Caret) {
      SourceLoc loc = lex_.take().loc;
      out = Formula::xor_(out, conjunction(), loc);
    }
    return out;
  }

  Formula conjunction() {
    Formula out = application();
    while (lex_.peek().kind == Tok::Amp) {
      SourceLoc loc = lex_.take().loc;
      out = Formula::conj(out, application(), loc);
    }
    return out;
  }

  bool starts_arg() const {
    switch (lex_.peek().kind) {
      case Tok::Bang:
      case Tok::Diamond:
      case Tok::Box:
      case Tok::True:
      case Tok::False:
      case Tok::Ident:
      case Tok::LParen:
        return true;
      default:
        return false;
    }
  }

  Formula application() {
    Formula out = argument();
    while (starts_arg()) out = Formula::app(out, argument());
    return out;
  }

  Formula argument() {
    Token t = lex_.peek();
    switch (t.kind) {
      case Tok::Bang:
        lex_.take();
        return Formula::neg(argument(), t.loc);
      case Tok::Diamond:
        lex_.take();
        return Formula::modal(t.text, int(t.number), argument(), t.loc);
      case Tok::Box:
        lex_.take();
        return Formula::box(t.text, int(t.number), argument(), t.loc);
      default:
        return atom();
    }
  }

  Formula atom() {
    Token t = lex_.take();
    switch (t.kind) {
      case Tok::True: return Formula::top(dim_, t.loc);
      case Tok::False: return Formula::bottom(dim_, t.loc);
      case Tok::Ident: {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
          if (it->surface == t.text) return Formula::var(it->unique, t.loc);
        if (free_ok_.count(t.text)) return Formula::var(t.text, t.loc);
        throw parse_error("unbound variable '" + t.text + "'", t.loc);
      }
      case Tok::LParen: {
        Formula f = formula();
        expect(Tok::RParen, "')'");
        return f;
      }
      default:
        throw parse_error("expected a formula", t.loc);
    }
  }

  Token expect(Tok kind, const char* what) {
    Token t = lex_.take();
    if (t.kind != kind) throw parse_error(std::string("expected ") + what, t.loc);
    return t;
  }

  std::string push(const std::string& surface) {
    std::string unique = detail::fresh_name(surface, used_);
    used_.insert(unique);
    scope_.push_back({surface, unique});
    return unique;
  }

  void pop() { scope_.pop_back(); }

  Lexer lex_;
  int dim_;
  std::set<std::string> free_ok_;
  std::set<std::string> used_;
  std::vector<Binding> scope_;
};

}  // namespace detail

/// Parses surface syntax into a desugared, alpha-uniquified AST. `true`,
/// `false`, `!`, `&`, `|`, `^`, `->`, `<a>i`, `[a]i`, `mu`, `nu`, `lambda`
/// with variance marks `+ - 0` on binders, `P<d>` for proposition types,
/// juxtaposition for application. `dim` fixes the dimension of `true` and
/// `false`. Free variables are rejected unless listed in `allowed_free`.
inline Formula parse_formula(std::string_view text, int dim = 2,
                             std::set<std::string> allowed_free = {}) {
  return detail::FormulaParser(text, dim, std::move(allowed_free)).parse();
}

}  // namespace ltbt
