#pragma once

#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "authpi/process.hpp"

namespace authpi {

/// Authorization scopes held by one component, with multiplicity.
class AuthMultiset {
 public:
  AuthMultiset() = default;
  AuthMultiset(std::initializer_list<Name> names) {
    for (const Name& n : names) add(n);
  }

  void add(const Name& n, std::size_t times = 1) {
    if (times > 0) counts_[n] += times;
  }
  /// Removes one occurrence; returns false when `n` is absent.
  bool remove_one(const Name& n);

  std::size_t count(const Name& n) const {
    auto it = counts_.find(n);
    return it == counts_.end() ? 0 : it->second;
  }
  bool contains(const Name& n) const { return count(n) > 0; }
  bool empty() const { return counts_.empty(); }
  std::size_t total() const;
  NameSet support() const;
  const std::map<Name, std::size_t>& counts() const { return counts_; }

  /// Every occurrence, ordered by display text.
  std::vector<Name> expanded() const;

  friend bool operator==(const AuthMultiset&, const AuthMultiset&) = default;

 private:
  std::map<Name, std::size_t> counts_;
};

/// One `[a1]...[ak] alpha.P` component of a normal form.
struct Component {
  AuthMultiset auths;
  Action action;
  Process continuation;
};

/// `(new c1)...(new cn)(C1 | ... | Ck)` where every Ci is a Component.
struct NormalForm {
  std::vector<Name> restricted;
  std::vector<Component> components;
};

/// Hoists restrictions (freshening every binder) and distributes
/// authorization scopes onto the prefixes they cover. Continuations are left
/// as they are. Unused restrictions are kept.
NormalForm normal_form(const Process& p);

/// The process denoted by a normal form. Scopes are emitted in display order.
Process rebuild(const NormalForm& nf);

/// Normal form of `canonicalize(p)`: only used restrictions, components in
/// canonical order, continuations canonical.
NormalForm canonical_normal_form(const Process& p);

/// Congruent representative: normal form at every level, garbage removed,
/// components and scopes sorted, restricted names in canonical order. Binder
/// texts are kept from the input; equality of canonical forms is alpha_eq.
Process canonicalize(const Process& p);

/// Alpha-invariant key of `canonicalize(p)`; equal keys iff canonical forms are
/// alpha-equivalent.
std::string canonical_key(const Process& p);

/// canonicalize(p) together with its canonical_key, computed once.
std::pair<Process, std::string> canonicalize_with_key(const Process& p);

/// Sound check for structural congruence (see canonicalize).
bool congruent(const Process& p, const Process& q);

struct EnumerationOptions {
  /// Maximum number of distinct terms collected.
  std::size_t node_budget = 2000;
  /// Terms larger than node_count(p) + extra_nodes are not explored.
  std::size_t extra_nodes = 2;
  /// Names that `0 -> [a]0` may introduce. Defaults to fn(p) when unset.
  std::optional<NameSet> probes;
};

struct Enumeration {
  std::vector<Process> members;
  /// The budget was hit; `members` is a lower bound of the bounded class.
  bool truncated = false;
};

/// Terms reachable from `p` by applying the congruence axioms at any
/// position, in both directions, up to alpha-equivalence. `P | 0 -> P` and
/// `new a.0 -> 0` are applied only left to right; `0 -> [a]0` only for probe
/// names. Test oracle for small terms.
Enumeration enumerate_congruent(const Process& p, const EnumerationOptions& options);
Enumeration enumerate_congruent(const Process& p, std::size_t node_budget);

}  // namespace authpi
