#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ltbt {

/// Position in a source text (1-based; 0 means "unknown").
struct SourceLoc {
  std::size_t line = 0;
  std::size_t col = 0;

  bool known() const { return line != 0; }
  std::string to_string() const {
    return known() ? std::to_string(line) + ":" + std::to_string(col) : std::string("?");
  }
};

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input text (.aut files, formula text).
struct parse_error : error {
  parse_error(const std::string& msg, SourceLoc where)
      : error(where.to_string() + ": " + msg), loc(where) {}
  SourceLoc loc;
};

/// Ill-typed formula (mismatch, variance violation, bad modal index).
struct type_error : error {
  type_error(const std::string& msg, SourceLoc where)
      : error(where.known() ? where.to_string() + ": " + msg : msg), loc(where) {}
  SourceLoc loc;
};

/// Evaluation refused or failed (fragment violation, guardrail, budget).
struct eval_error : error {
  using error::error;
};

}  // namespace ltbt
