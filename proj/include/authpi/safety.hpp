#pragma once

#include <string>
#include <vector>

#include "authpi/process.hpp"

namespace authpi {

enum class FrameKind { par_branch, restriction, auth };

struct Frame {
  FrameKind kind = FrameKind::par_branch;
  /// Binder for `restriction`, scope for `auth`; unused for `par_branch`.
  Name name;

  static Frame par_branch() { return {FrameKind::par_branch, {}}; }
  static Frame restriction(Name n) { return {FrameKind::restriction, n}; }
  static Frame auth(Name n) { return {FrameKind::auth, n}; }
};

/// Frames of an active context from the root down to the hole.
using ContextPath = std::vector<Frame>;

/// auth(C, a): some `[a]` frame encloses the hole.
bool context_authorizes(const ContextPath& path, const Name& a);

struct ActivePrefix {
  ContextPath path;
  Action action;
  Process continuation;
};

/// Every prefix reachable from the root without crossing another prefix, in
/// left-to-right order, exactly as presented (no normalisation).
std::vector<ActivePrefix> active_prefixes(const Process& p);

struct Violation {
  ContextPath path;
  Action action;
  /// 1: the channel is not authorized. 2: a delegated name is not authorized.
  int clause = 1;
  Name offending;

  /// `error[clause N] at <prefix>: name <n> not authorized`
  std::string render() const;
};

struct ErrorReport {
  std::vector<Violation> violations;

  bool is_error() const { return !violations.empty(); }
};

/// Unauthorized active prefixes of this particular presentation of `p`.
ErrorReport presentation_errors(const Process& p);

/// Authorization errors of `p`, checked on `canonicalize(p)`.
ErrorReport is_error(const Process& p);

}  // namespace authpi
