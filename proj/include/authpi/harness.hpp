#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "authpi/process.hpp"

namespace authpi {

struct GenConfig {
  std::uint64_t seed = 1;
  std::size_t max_prefixes = 6;
  std::size_t name_pool_size = 3;
  /// Probability of wrapping a generated subterm in an authorization scope.
  double auth_density = 0.35;
  bool well_typed_only = false;
};

/// Throws std::invalid_argument on an out-of-range field.
void validate(const GenConfig& config);

/// Free names available to the generator: a, b, c, ...
std::vector<Name> name_pool(std::size_t size);

/// Pseudo-random process, deterministic in `config.seed`. With
/// `well_typed_only`, untypable draws are rejected and the pending
/// authorizations of a typable draw are closed with outer scopes.
Process generate(const GenConfig& config);

/// Every alpha-class of processes with at most `max_nodes` syntax nodes (see
/// node_count) over the first `pool_size` pool names.
std::vector<Process> enumerate_terms(std::size_t max_nodes, std::size_t pool_size);

/// Outcome of one property on one process.
struct Verdict {
  bool skipped = false;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  static Verdict skip() { return {true, {}}; }
};

Verdict check_round_trip(const Process& p);
/// rebuild(normal_form(p)) is congruent to p, every component is guarded,
/// and canonicalize is idempotent.
Verdict check_normal_form(const Process& p);
/// rho is included in fn(p) whenever inference succeeds.
Verdict check_free_names_bound(const Process& p);
/// infer(p) and infer(canonicalize(p)) agree.
Verdict check_subject_congruence(const Process& p);
/// infer(p{a/b}) = infer(p){a/b} for a free `b`.
Verdict check_substitution(const Process& p, const Name& b, const Name& a);
/// infer is preserved by every enabled redex of `p`. Skips untypable `p`.
Verdict check_subject_reduction(const Process& p);
/// No reachable state is an error. Skips processes that are not well typed;
/// a truncated exploration is reported as a violation.
Verdict check_type_safety(const Process& p, std::size_t max_states);
/// Active prefixes on names outside rho are authorized by their context.
Verdict check_error_free(const Process& p);
/// Every member of the bounded congruence class has p's canonical key.
Verdict check_congruence_oracle(const Process& p, std::size_t budget);
/// Error verdicts are constant across the bounded congruence class.
Verdict check_error_oracle(const Process& p, std::size_t budget);
/// Prefixes reported by is_error take part in no redex.
Verdict check_error_dynamics(const Process& p);

/// Greedy subterm removal: repeatedly replaces a subterm by a smaller one
/// while `fails` keeps holding.
Process minimize(const Process& p, const std::function<bool(const Process&)>& fails);

struct Counterexample {
  std::size_t case_index = 0;
  std::uint64_t seed = 0;
  std::string term;
  std::string minimized;
  std::string detail;
};

struct PropertyReport {
  std::string name;
  std::size_t cases = 0;
  std::size_t skipped = 0;
  std::vector<Counterexample> violations;
  double elapsed_ms = 0;
};

struct SuiteReport {
  GenConfig config;
  std::size_t cases = 0;
  std::vector<PropertyReport> properties;

  std::size_t violation_count() const;
  std::string render_text(bool with_timing = true) const;
  nlohmann::ordered_json to_json(bool with_timing = true) const;
};

struct SuiteOptions {
  std::size_t cases = 1000;
  std::size_t max_states = 5000;
  /// Congruence-class oracles only run on terms up to this many nodes.
  std::size_t oracle_max_nodes = 12;
  std::size_t oracle_budget = 4000;
};

/// Runs every property over `options.cases` generated processes.
SuiteReport run_suite(const GenConfig& config, const SuiteOptions& options = {});

/// Seed of case `index` of a suite seeded with `seed`.
std::uint64_t case_seed(std::uint64_t seed, std::size_t index);

}  // namespace authpi
