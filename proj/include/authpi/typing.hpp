#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "authpi/process.hpp"

namespace authpi {

/// Names the process acts on without an enclosing authorization.
struct TypeContext {
  NameSet rho;

  friend bool operator==(const TypeContext&, const TypeContext&) = default;
};

/// The three rules with side conditions.
enum class TypingRule { tnew, trecv, tdeleg };

const char* rule_name(TypingRule r);

struct TypeError {
  TypingRule rule = TypingRule::tnew;
  /// Child indices from the root: 0 = left/body/continuation, 1 = right.
  std::vector<std::size_t> location;
  Name offending;
  std::string message;
  /// Source span of the offending subterm, when the term came from the parser.
  std::optional<SourceSpan> span;

  std::string render() const;
};

using InferResult = std::variant<TypeContext, TypeError>;

/// Bottom-up computation of the unique rho with `rho |- p`. Fails with the
/// first violated side condition in post-order, left to right.
InferResult infer(const Process& p);

struct Diagnostics {
  /// rho computed as if every side condition held.
  NameSet rho;
  /// Every violated side condition, post-order, left to right.
  std::vector<TypeError> errors;
};

Diagnostics infer_all(const Process& p);

/// `{} |- p`.
bool well_typed(const Process& p);

/// Renders a name set as `{a, b}` in display order.
std::string render_names(const NameSet& names);

}  // namespace authpi
