#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "authpi/congruence.hpp"
#include "authpi/process.hpp"

namespace authpi {

enum class RedexKind { comm, auth };

/// A synchronisation between two components of `canonical_normal_form(p)`.
/// `object` is the communicated name for comm and the delegated
/// authorization for auth.
struct Redex {
  RedexKind kind = RedexKind::comm;
  std::size_t sender = 0;
  std::size_t receiver = 0;
  Name channel;
  Name object;

  friend bool operator==(const Redex&, const Redex&) = default;
};

/// `comm a carrying b` or `auth a delegating b`.
std::string describe(const Redex& r);
nlohmann::ordered_json to_json(const Redex& r);

class InvalidRedex : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Enabled synchronisations of `p`, ordered by (sender, receiver).
///
/// comm: sender `b!c` and receiver `b?x` both hold a scope on `b`.
/// auth: sender `b![c]` holds scopes on `b` and `c` (two on `b` when c = b),
/// receiver `b?[c]` holds a scope on `b`.
std::vector<Redex> redexes(const Process& p);

/// Redexes of an already computed normal form.
std::vector<Redex> redexes(const NormalForm& nf);

/// Fires `r`. Throws InvalidRedex when `r` is not a redex of `p`.
Process step(const Process& p, const Redex& r);

struct Edge {
  std::size_t from = 0;
  Redex redex;
  std::size_t to = 0;
};

struct ReductionGraph {
  /// Canonical representatives, pairwise non-congruent.
  std::vector<Process> states;
  std::vector<Edge> edges;
  std::size_t root = 0;
  /// Exploration stopped at max_states with unexplored successors.
  bool truncated = false;

  std::vector<std::size_t> terminal_states() const;
  /// Edges from the root to `state` along the breadth-first tree.
  std::vector<Edge> path_to(std::size_t state) const;
};

/// Breadth-first closure of `p` under `step`. Requires max_states >= 1.
ReductionGraph reduction_graph(const Process& p, std::size_t max_states);

/// `{"root":..,"truncated":..,"states":[..],"edges":[{"from","redex","to"}]}`
nlohmann::ordered_json to_json(const ReductionGraph& g);

}  // namespace authpi
