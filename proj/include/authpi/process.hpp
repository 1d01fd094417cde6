#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace authpi {

/// A channel name. Identity is the uid; the text is only for display.
///
/// Names obtained from `Name::global` are interned by text, so every free
/// occurrence of `a` in a parsed file is the same name. Binders are created
/// with `Name::fresh`, which never collides with anything else.
class Name {
 public:
  Name() = default;

  static Name global(std::string_view text);
  static Name fresh(std::string_view text);

  const std::string& text() const { return text_; }
  std::uint64_t uid() const { return uid_; }
  bool is_global() const { return global_; }
  bool valid() const { return uid_ != 0; }

  friend bool operator==(const Name& a, const Name& b) { return a.uid_ == b.uid_; }
  friend auto operator<=>(const Name& a, const Name& b) { return a.uid_ <=> b.uid_; }

 private:
  Name(std::string text, std::uint64_t uid, bool global)
      : text_(std::move(text)), uid_(uid), global_(global) {}

  std::string text_;
  std::uint64_t uid_ = 0;
  bool global_ = false;
};

/// True for `[a-zA-Z][a-zA-Z0-9_]*` other than the keyword `new`.
bool is_identifier(std::string_view text);

using NameSet = std::set<Name>;

/// Names of a set ordered by text (then uid), for display.
std::vector<Name> sorted_for_display(const NameSet& names);

enum class ActionKind { output, input, send_auth, recv_auth };

/// A communication prefix. For `input` the object is the binder.
struct Action {
  ActionKind kind = ActionKind::output;
  Name channel;
  Name object;

  static Action output(Name chan, Name obj) { return {ActionKind::output, chan, obj}; }
  static Action input(Name chan, Name binder) { return {ActionKind::input, chan, binder}; }
  static Action send_auth(Name chan, Name obj) { return {ActionKind::send_auth, chan, obj}; }
  static Action recv_auth(Name chan, Name obj) { return {ActionKind::recv_auth, chan, obj}; }

  bool binds() const { return kind == ActionKind::input; }

  friend bool operator==(const Action&, const Action&) = default;
};

/// Byte offsets plus 1-based line/column of the start.
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t line = 1;
  std::size_t column = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class ProcessKind { nil, par, restrict, auth, prefix };

/// Immutable process term. Copies share structure.
///
/// Structural operations never look at source spans; they are carried only so
/// that diagnostics can point back into the input.
class Process {
 public:
  /// The inactive process.
  Process();

  static Process nil();
  static Process par(Process left, Process right);
  static Process restrict(Name binder, Process body);
  static Process auth(Name scope, Process body);
  static Process prefix(Action action, Process continuation);

  /// Left-nested parallel composition of `parts`; `0` when empty.
  static Process par_all(const std::vector<Process>& parts);

  ProcessKind kind() const;
  bool is_nil() const { return kind() == ProcessKind::nil; }

  /// Binder of a restriction or scope of an authorization.
  const Name& name() const;
  const Action& action() const;

  /// `par`: left branch. `restrict`/`auth`: body. `prefix`: continuation.
  const Process& first() const;
  /// `par`: right branch.
  const Process& second() const;

  const Process& body() const { return first(); }
  const Process& continuation() const { return first(); }
  const Process& left() const { return first(); }
  const Process& right() const { return second(); }

  const std::optional<SourceSpan>& span() const;
  Process with_span(SourceSpan span) const;

  /// Same node identity (cheap pointer comparison).
  bool same_node(const Process& other) const { return node_ == other.node_; }

 private:
  struct Node;
  explicit Process(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

NameSet free_names(const Process& p);

/// Capture-avoiding substitution of `replacement` for free `target`.
Process substitute(const Process& p, const Name& target, const Name& replacement);

/// Simultaneous capture-avoiding renaming of free names.
using Renaming = std::unordered_map<std::uint64_t, Name>;
Process rename(const Process& p, const Renaming& renaming);

/// Equality up to consistent renaming of restriction and input binders.
bool alpha_eq(const Process& p, const Process& q);

/// Binder-independent structural encoding: equal strings iff alpha-equivalent.
std::string alpha_key(const Process& p);

/// Number of prefix nodes.
std::size_t prefix_count(const Process& p);

/// Syntax-tree size, counting every constructor and every name occurrence
/// (binders included).
std::size_t node_count(const Process& p);

/// Name as it appears in structural keys: the text for interned names,
/// text plus uid otherwise.
std::string free_name_token(const Name& n);

}  // namespace authpi
