#include "authpi/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "authpi/congruence.hpp"
#include "authpi/dynamics.hpp"
#include "authpi/harness.hpp"
#include "authpi/safety.hpp"
#include "authpi/text.hpp"
#include "authpi/typing.hpp"

namespace authpi::cli {

namespace {

using json = nlohmann::ordered_json;

const std::vector<std::string> kCommands = {"parse", "fmt",     "check", "errors", "step",
                                            "run",   "explore", "canon", "suite"};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json names_json(const NameSet& names) {
  json j = json::array();
  for (const Name& n : sorted_for_display(names)) j.push_back(n.text());
  return j;
}

json violation_json(const Violation& v) {
  return json{{"clause", v.clause}, {"prefix", print_action(v.action)}, {"name", v.offending.text()},
              {"text", v.render()}};
}

json type_error_json(const TypeError& e) {
  json j{{"rule", rule_name(e.rule)}, {"location", e.location}, {"name", e.offending.text()},
         {"message", e.message}};
  if (e.span) {
    j["line"] = e.span->line;
    j["column"] = e.span->column;
  }
  j["text"] = e.render();
  return j;
}

class Session {
 public:
  Session(const CliConfig& config, std::istream& in, std::ostream& out, std::ostream& err)
      : config_(config), in_(in), out_(out), err_(err) {}

  int run() {
    const std::string& c = config_.command;
    if (c == "suite") return suite();
    if ((c == "run") && !config_.seed) throw UsageError("`run` requires --seed");
    std::optional<Process> p = load();
    if (!p) return exit_code::usage;
    if (c == "parse") return parse_cmd(*p);
    if (c == "fmt") return fmt(*p);
    if (c == "check") return check(*p);
    if (c == "errors") return errors(*p);
    if (c == "step") return step_cmd(*p);
    if (c == "run") return run_cmd(*p);
    if (c == "explore") return explore(*p);
    if (c == "canon") return canon(*p);
    throw UsageError("unknown command `" + c + "`");
  }

 private:
  bool json_mode() const { return config_.format == Format::json; }

  std::optional<Process> load() {
    std::string source;
    std::string origin = config_.input;
    if (config_.input == "-") {
      origin = "<stdin>";
      if (config_.command == "step") {
        std::getline(in_, source);
      } else {
        std::ostringstream buf;
        buf << in_.rdbuf();
        source = buf.str();
      }
    } else {
      std::ifstream file(config_.input);
      if (!file) throw UsageError("cannot open `" + config_.input + "`");
      std::ostringstream buf;
      buf << file.rdbuf();
      source = buf.str();
    }
    ParseResult r = parse(source);
    if (auto* e = std::get_if<ParseError>(&r)) {
      if (json_mode()) {
        out_ << json{{"error", "parse"},
                     {"line", e->span.line},
                     {"column", e->span.column},
                     {"message", e->message},
                     {"expected", e->expected}}
                    .dump(2)
             << '\n';
      }
      err_ << origin << ':' << e->render() << '\n';
      return std::nullopt;
    }
    return std::get<Process>(std::move(r));
  }

  int parse_cmd(const Process& p) {
    out_ << to_json(p).dump(2) << '\n';
    return exit_code::ok;
  }

  int fmt(const Process& p) {
    if (json_mode())
      out_ << json{{"source", print(p)}}.dump(2) << '\n';
    else
      out_ << print(p) << '\n';
    return exit_code::ok;
  }

  int canon(const Process& p) {
    auto [c, key] = canonicalize_with_key(p);
    if (json_mode())
      out_ << json{{"canonical", print(c)}, {"key", key}}.dump(2) << '\n';
    else
      out_ << print(c) << '\n';
    return exit_code::ok;
  }

  int check(const Process& p) {
    std::vector<TypeError> errors;
    NameSet rho;
    if (config_.all_diagnostics) {
      Diagnostics d = infer_all(p);
      errors = std::move(d.errors);
      rho = std::move(d.rho);
    } else {
      InferResult r = infer(p);
      if (auto* e = std::get_if<TypeError>(&r))
        errors.push_back(*e);
      else
        rho = std::get<TypeContext>(r).rho;
    }
    std::string verdict = !errors.empty() ? "ill-typed" : rho.empty() ? "well-typed" : "requires-authorizations";
    if (json_mode()) {
      json j{{"verdict", verdict}};
      if (errors.empty() || config_.all_diagnostics) j["rho"] = names_json(rho);
      j["errors"] = json::array();
      for (const TypeError& e : errors) j["errors"].push_back(type_error_json(e));
      out_ << j.dump(2) << '\n';
    } else if (!errors.empty()) {
      for (const TypeError& e : errors) out_ << e.render() << '\n';
    } else if (rho.empty()) {
      out_ << "well-typed\n";
    } else {
      out_ << "requires authorizations: " << render_names(rho) << '\n';
    }
    return verdict == "well-typed" ? exit_code::ok : exit_code::findings;
  }

  int errors(const Process& p) {
    ErrorReport report = is_error(p);
    if (json_mode()) {
      json j{{"errors", json::array()}};
      for (const Violation& v : report.violations) j["errors"].push_back(violation_json(v));
      out_ << j.dump(2) << '\n';
    } else if (report.violations.empty()) {
      out_ << "no errors\n";
    } else {
      for (const Violation& v : report.violations) out_ << v.render() << '\n';
    }
    return report.is_error() ? exit_code::findings : exit_code::ok;
  }

  int step_cmd(Process current) {
    json trace = json::array();
    for (;;) {
      auto rs = redexes(current);
      if (!json_mode()) {
        out_ << "state: " << print(current) << '\n';
        if (rs.empty()) {
          out_ << "no redexes\n";
          break;
        }
        for (std::size_t i = 0; i < rs.size(); ++i) out_ << "  [" << i + 1 << "] " << describe(rs[i]) << '\n';
        out_ << "choose> " << std::flush;
      }
      if (rs.empty()) break;
      std::optional<std::size_t> choice = read_choice(rs.size());
      if (!choice) {
        if (!json_mode()) out_ << "\nend of input\n";
        break;
      }
      Process next = step(current, rs[*choice]);
      if (json_mode())
        trace.push_back(json{{"before", print(current)}, {"redex", to_json(rs[*choice])}, {"after", print(next)}});
      current = next;
    }
    if (json_mode()) {
      out_ << json{{"steps", trace}, {"final", print(current)}, {"terminal", redexes(current).empty()}}.dump(2)
           << '\n';
    }
    return exit_code::ok;
  }

  // Zero-based index of the next valid choice, or nothing at end of input.
  std::optional<std::size_t> read_choice(std::size_t count) {
    std::string line;
    while (std::getline(in_, line)) {
      line.erase(0, line.find_first_not_of(" \t\r"));
      line.erase(line.find_last_not_of(" \t\r") + 1);
      if (line.empty()) continue;
      std::size_t used = 0;
      long long k = -1;
      try {
        k = std::stoll(line, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == line.size() && k >= 1 && static_cast<std::size_t>(k) <= count) return k - 1;
      err_ << "invalid choice `" << line << "`: enter a number between 1 and " << count << '\n';
      if (!json_mode()) out_ << "choose> " << std::flush;
    }
    return std::nullopt;
  }

  int run_cmd(Process current) {
    std::mt19937_64 rng(*config_.seed);
    json steps = json::array();
    if (!json_mode()) out_ << "start: " << print(current) << '\n';
    std::size_t n = 0;
    bool terminal = false;
    for (;;) {
      auto rs = redexes(current);
      if (rs.empty()) {
        terminal = true;
        break;
      }
      if (n == config_.max_steps) break;
      const Redex& r = rs[std::uniform_int_distribution<std::size_t>(0, rs.size() - 1)(rng)];
      Process next = step(current, r);
      ++n;
      if (json_mode())
        steps.push_back(json{{"index", n}, {"before", print(current)}, {"redex", to_json(r)}, {"after", print(next)}});
      else
        out_ << n << ". " << describe(r) << ": " << print(current) << "  -->  " << print(next) << '\n';
      current = next;
    }
    ErrorReport report = is_error(current);
    if (json_mode()) {
      json j{{"seed", *config_.seed}, {"steps", steps}, {"final", print(current)}, {"terminal", terminal}};
      j["errors"] = json::array();
      for (const Violation& v : report.violations) j["errors"].push_back(violation_json(v));
      out_ << j.dump(2) << '\n';
    } else {
      out_ << (terminal ? "terminal: " : "stopped after " + std::to_string(n) + " steps: ") << print(current)
           << '\n';
      for (const Violation& v : report.violations) out_ << v.render() << '\n';
    }
    return report.is_error() ? exit_code::findings : exit_code::ok;
  }

  int explore(const Process& p) {
    if (config_.max_states == 0) throw UsageError("--max-states must be positive");
    ReductionGraph g = reduction_graph(p, config_.max_states);
    auto terminals = g.terminal_states();
    std::vector<std::pair<std::size_t, Violation>> found;
    for (std::size_t i = 0; i < g.states.size(); ++i)
      for (const Violation& v : is_error(g.states[i]).violations) found.emplace_back(i, v);

    if (json_mode()) {
      json j = to_json(g);
      j["terminal"] = terminals;
      j["errors"] = json::array();
      for (const auto& [state, v] : found) {
        json e = violation_json(v);
        e["state"] = state;
        j["errors"].push_back(e);
      }
      out_ << j.dump(2) << '\n';
    } else {
      out_ << "states: " << g.states.size() << '\n'
           << "edges: " << g.edges.size() << '\n'
           << "truncated: " << (g.truncated ? "yes" : "no") << '\n'
           << "terminal states: " << terminals.size() << '\n';
      for (std::size_t t : terminals) out_ << "  " << print(g.states[t]) << '\n';
      out_ << "errors found: " << found.size() << '\n';
      for (const auto& [state, v] : found) out_ << "  in " << print(g.states[state]) << ": " << v.render() << '\n';
    }
    return found.empty() ? exit_code::ok : exit_code::findings;
  }

  int suite() {
    if (!config_.seed) throw UsageError("`suite` requires --seed");
    GenConfig gen;
    gen.seed = *config_.seed;
    gen.max_prefixes = config_.max_prefixes;
    gen.name_pool_size = config_.name_pool_size;
    gen.auth_density = config_.auth_density;
    gen.well_typed_only = config_.well_typed_only;
    try {
      validate(gen);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    SuiteOptions options;
    options.cases = config_.cases;
    options.max_states = config_.max_states;
    SuiteReport report = run_suite(gen, options);
    if (json_mode())
      out_ << report.to_json(config_.timing).dump(2) << '\n';
    else
      out_ << report.render_text(config_.timing);
    return report.violation_count() == 0 ? exit_code::ok : exit_code::findings;
  }

  const CliConfig& config_;
  std::istream& in_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int dispatch(const CliConfig& config, std::istream& in, std::ostream& out, std::ostream& err) {
  try {
    return Session(config, in, out, err).run();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::usage;
  }
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Authorization-scoped pi-calculus toolkit", "authpi"};
  CliConfig config;
  std::string format = "text";
  std::uint64_t seed = 0;
  bool no_timing = false;

  app.add_option("command", config.command, "parse | fmt | check | errors | step | run | explore | canon | suite")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("input", config.input, "source file, or - for standard input")->capture_default_str();
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "random seed (run, suite)");
  app.add_option("--max-steps", config.max_steps, "step limit for run")->capture_default_str();
  app.add_option("--max-states", config.max_states, "state limit for explore and suite")->capture_default_str();
  app.add_flag("--all", config.all_diagnostics, "check: report every violated side condition");
  app.add_option("--cases", config.cases, "suite: number of generated processes")->capture_default_str();
  app.add_option("--max-prefixes", config.max_prefixes, "suite: prefixes per generated process")
      ->capture_default_str();
  app.add_option("--pool", config.name_pool_size, "suite: free-name pool size")->capture_default_str();
  app.add_option("--auth-density", config.auth_density, "suite: probability of scope wrapping")
      ->capture_default_str();
  app.add_flag("--well-typed-only", config.well_typed_only, "suite: generate well-typed processes only");
  app.add_flag("--no-timing", no_timing, "suite: omit timing fields");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::usage;
  }
  config.format = format == "json" ? Format::json : Format::text;
  if (seed_opt->count() > 0) config.seed = seed;
  config.timing = !no_timing;
  return dispatch(config, in, out, err);
}

}  // namespace authpi::cli
