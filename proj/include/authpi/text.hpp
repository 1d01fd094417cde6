#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "authpi/process.hpp"

namespace authpi {

struct ParseError {
  SourceSpan span;
  std::string message;
  std::vector<std::string> expected;

  /// `line:col: message (expected ...)`
  std::string render() const;
};

using ParseResult = std::variant<Process, ParseError>;

/// Parses `.authpi` concrete syntax:
///
///     process := term ("|" term)*
///     term    := "0" | "(" process ")" | "new" NAME "." term
///              | "[" NAME "]" term | prefix "." term
///     prefix  := NAME "!" NAME | NAME "?" NAME
///              | NAME "!" "[" NAME "]" | NAME "?" "[" NAME "]"
///
/// `#` starts a line comment. Free names are interned; every binder gets a
/// fresh name.
ParseResult parse(std::string_view text);

/// Parses or throws std::invalid_argument with the rendered error. For tests
/// and literals in code.
Process parse_or_throw(std::string_view text);

/// Concrete syntax with minimal parentheses. Binders whose text would capture
/// or be confused with another name are printed with a numeric suffix.
std::string print(const Process& p);

/// Renders a single prefix, e.g. `a![b]`, using the names' texts.
std::string print_action(const Action& a);

/// AST document with fixed field order.
nlohmann::ordered_json to_json(const Process& p);

}  // namespace authpi
