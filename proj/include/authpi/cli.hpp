#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace authpi::cli {

enum class Format { text, json };

struct CliConfig {
  /// One of parse, fmt, check, errors, step, run, explore, canon, suite.
  std::string command;
  /// Source file; `-` reads standard input.
  std::string input = "-";
  Format format = Format::text;
  std::optional<std::uint64_t> seed;
  std::size_t max_steps = 100;
  std::size_t max_states = 10000;
  /// `check`: report every violated side condition instead of the first.
  bool all_diagnostics = false;

  // suite only
  std::size_t cases = 1000;
  std::size_t max_prefixes = 12;
  std::size_t name_pool_size = 3;
  double auth_density = 0.35;
  bool well_typed_only = false;
  bool timing = true;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int findings = 1;
inline constexpr int usage = 2;
}  // namespace exit_code

/// Runs one command. `in` is standard input: the program source when
/// `config.input` is `-`, and the redex choices of `step`.
int dispatch(const CliConfig& config, std::istream& in, std::ostream& out, std::ostream& err);

/// Parses `args` (without the program name) and dispatches.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace authpi::cli
