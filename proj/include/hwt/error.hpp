#pragma once

#include <stdexcept>
#include <string>

namespace hwt {

class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Parse diagnostics carry a category so callers can distinguish a malformed
// statement from a structurally broken netlist.
enum class ParseErrorKind { Syntax, DuplicateDriver, UndrivenNet, Cycle };

class ParseError : public Error {
  public:
    ParseError(ParseErrorKind kind, int line, int col, const std::string& what)
        : Error("line " + std::to_string(line) + ":" + std::to_string(col) + ": " + what),
          kind_(kind),
          line_(line),
          col_(col) {}

    ParseErrorKind kind() const { return kind_; }
    int line() const { return line_; }
    int col() const { return col_; }

  private:
    ParseErrorKind kind_;
    int line_;
    int col_;
};

}  // namespace hwt
