#include "authpi/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "authpi/congruence.hpp"
#include "authpi/dynamics.hpp"
#include "authpi/safety.hpp"
#include "authpi/text.hpp"
#include "authpi/typing.hpp"

namespace authpi {

void validate(const GenConfig& config) {
  if (config.name_pool_size == 0) throw std::invalid_argument("name_pool_size must be positive");
  if (!(config.auth_density >= 0.0 && config.auth_density <= 1.0))
    throw std::invalid_argument("auth_density must lie in [0, 1]");
}

std::vector<Name> name_pool(std::size_t size) {
  std::vector<Name> pool;
  for (std::size_t i = 0; i < size; ++i) {
    if (i < 26)
      pool.push_back(Name::global(std::string(1, static_cast<char>('a' + i))));
    else
      pool.push_back(Name::global("n" + std::to_string(i)));
  }
  return pool;
}

std::uint64_t case_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 of (seed, index)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

class Generator {
 public:
  Generator(const GenConfig& config, std::mt19937_64& rng)
      : config_(config), rng_(rng), pool_(name_pool(config.name_pool_size)) {}

  Process draw() {
    std::size_t n = config_.max_prefixes == 0 ? 0 : uniform(1, config_.max_prefixes);
    return term(n, 0);
  }

 private:
  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }

  Name pick_name() {
    if (!bound_.empty() && coin(0.4)) return bound_[uniform(0, bound_.size() - 1)];
    return pool_[uniform(0, pool_.size() - 1)];
  }

  Name fresh_input_binder() {
    static const char* texts[] = {"x", "y", "z"};
    return Name::fresh(texts[uniform(0, 2)]);
  }

  Name fresh_restriction_binder() {
    if (coin(0.5)) return Name::fresh(pool_[uniform(0, pool_.size() - 1)].text());
    return Name::fresh("k");
  }

  Process prefix_free(std::size_t depth) {
    if (depth > 2) return Process::nil();
    double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    if (r < 0.6) return Process::nil();
    if (r < 0.75) return Process::auth(pick_name(), prefix_free(depth + 1));
    if (r < 0.85) {
      Name b = fresh_restriction_binder();
      bound_.push_back(b);
      Process body = prefix_free(depth + 1);
      bound_.pop_back();
      return Process::restrict(b, body);
    }
    return Process::par(prefix_free(depth + 1), prefix_free(depth + 1));
  }

  // A sender and a receiver on a shared channel, each usually holding the
  // scopes the rules ask for, so that generated terms actually reduce.
  Process matched_pair(std::size_t n, std::size_t depth) {
    Name chan = pick_name();
    Name obj = pick_name();
    bool delegation = coin(0.5);
    std::size_t k = uniform(0, n - 2);
    Process send_cont = term(k, depth + 1);
    Process sender = Process::prefix(
        delegation ? Action::send_auth(chan, obj) : Action::output(chan, obj), send_cont);
    Process receiver;
    if (delegation) {
      receiver = Process::prefix(Action::recv_auth(chan, obj), term(n - 2 - k, depth + 1));
    } else {
      Name x = fresh_input_binder();
      bound_.push_back(x);
      Process cont = term(n - 2 - k, depth + 1);
      bound_.pop_back();
      receiver = Process::prefix(Action::input(chan, x), cont);
    }
    if (delegation && coin(0.8)) sender = Process::auth(obj, sender);
    if (coin(0.85)) sender = Process::auth(chan, sender);
    if (coin(0.85)) receiver = Process::auth(chan, receiver);
    return Process::par(sender, receiver);
  }

  // A term with exactly `n` prefixes.
  Process term(std::size_t n, std::size_t depth) {
    if (n == 0) return prefix_free(depth);
    if (coin(config_.auth_density)) return Process::auth(pick_name(), term(n, depth + 1));
    if (coin(0.08)) {
      Name b = fresh_restriction_binder();
      bound_.push_back(b);
      Process body = term(n, depth + 1);
      bound_.pop_back();
      return Process::restrict(b, body);
    }
    if (n >= 2 && coin(0.3)) return matched_pair(n, depth);
    if (n >= 2 && coin(0.45)) {
      std::size_t k = uniform(1, n - 1);
      Process l = term(k, depth + 1);
      Process r = term(n - k, depth + 1);
      return Process::par(l, r);
    }
    Name chan = pick_name();
    switch (uniform(0, 3)) {
      case 0:
        return Process::prefix(Action::output(chan, pick_name()), term(n - 1, depth + 1));
      case 1: {
        Name x = fresh_input_binder();
        bound_.push_back(x);
        Process cont = term(n - 1, depth + 1);
        bound_.pop_back();
        return Process::prefix(Action::input(chan, x), cont);
      }
      case 2:
        return Process::prefix(Action::send_auth(chan, pick_name()), term(n - 1, depth + 1));
      default:
        return Process::prefix(Action::recv_auth(chan, pick_name()), term(n - 1, depth + 1));
    }
  }

  const GenConfig& config_;
  std::mt19937_64& rng_;
  std::vector<Name> pool_;
  std::vector<Name> bound_;
};

}  // namespace

Process generate(const GenConfig& config) {
  validate(config);
  std::mt19937_64 rng(config.seed);
  Generator gen(config, rng);
  if (!config.well_typed_only) return gen.draw();
  for (;;) {
    Process p = gen.draw();
    auto result = infer(p);
    auto* ctx = std::get_if<TypeContext>(&result);
    if (!ctx) continue;
    auto pending = sorted_for_display(ctx->rho);
    for (std::size_t i = pending.size(); i-- > 0;) p = Process::auth(pending[i], p);
    if (well_typed(p)) return p;
  }
}

// ---------------------------------------------------------------------------

namespace {

class TermEnumerator {
 public:
  explicit TermEnumerator(std::size_t pool_size) : pool_(name_pool(pool_size)) {}

  std::vector<Process> exactly(std::size_t n) {
    std::vector<Process> out;
    if (n == 1) out.push_back(Process::nil());
    std::vector<Name> names = pool_;
    names.insert(names.end(), bound_.begin(), bound_.end());

    for (std::size_t l = 1; l + 2 <= n; ++l) {
      auto lefts = exactly(l);
      auto rights = exactly(n - 1 - l);
      for (const Process& a : lefts)
        for (const Process& b : rights) out.push_back(Process::par(a, b));
    }
    if (n >= 3) {
      Name b = Name::fresh("n");
      bound_.push_back(b);
      for (const Process& body : exactly(n - 2)) out.push_back(Process::restrict(b, body));
      bound_.pop_back();
      for (const Name& s : names)
        for (const Process& body : exactly(n - 2)) out.push_back(Process::auth(s, body));
    }
    if (n >= 4) {
      auto conts = exactly(n - 3);
      for (const Name& c : names)
        for (const Name& o : names)
          for (const Process& k : conts) {
            out.push_back(Process::prefix(Action::output(c, o), k));
            out.push_back(Process::prefix(Action::send_auth(c, o), k));
            out.push_back(Process::prefix(Action::recv_auth(c, o), k));
          }
      Name x = Name::fresh("x");
      bound_.push_back(x);
      auto bound_conts = exactly(n - 3);
      bound_.pop_back();
      for (const Name& c : names)
        for (const Process& k : bound_conts) out.push_back(Process::prefix(Action::input(c, x), k));
    }
    return out;
  }

 private:
  std::vector<Name> pool_;
  std::vector<Name> bound_;
};

}  // namespace

std::vector<Process> enumerate_terms(std::size_t max_nodes, std::size_t pool_size) {
  TermEnumerator e(pool_size);
  std::vector<Process> out;
  for (std::size_t n = 1; n <= max_nodes; ++n) {
    auto batch = e.exactly(n);
    out.insert(out.end(), batch.begin(), batch.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Properties

namespace {

std::string describe_infer(const InferResult& r) {
  if (auto* ctx = std::get_if<TypeContext>(&r)) return "rho = " + render_names(ctx->rho);
  return std::get<TypeError>(r).render();
}

}  // namespace

Verdict check_round_trip(const Process& p) {
  Verdict v;
  std::string text = print(p);
  auto parsed = parse(text);
  if (auto* err = std::get_if<ParseError>(&parsed)) {
    v.violations.push_back("printed form does not parse: " + err->render() + " in `" + text + "`");
  } else if (!alpha_eq(p, std::get<Process>(parsed))) {
    v.violations.push_back("parse(print(p)) differs from p: `" + text + "` reparses as `" +
                           print(std::get<Process>(parsed)) + "`");
  }
  return v;
}

Verdict check_normal_form(const Process& p) {
  Verdict v;
  NormalForm nf = normal_form(p);
  NameSet fn = free_names(p);
  for (const Name& r : nf.restricted)
    if (fn.count(r)) v.violations.push_back("restricted name " + r.text() + " clashes with a free name");
  std::string key = canonical_key(p);
  Process rebuilt = rebuild(nf);
  if (canonical_key(rebuilt) != key)
    v.violations.push_back("rebuilt normal form `" + print(rebuilt) + "` is not congruent to p");
  Process canon = canonicalize(p);
  if (canonical_key(canon) != key) v.violations.push_back("canonical key changes under canonicalize");
  Process twice = canonicalize(canon);
  if (!alpha_eq(twice, canon))
    v.violations.push_back("canonicalize is not idempotent: `" + print(canon) + "` then `" + print(twice) + "`");
  return v;
}

Verdict check_free_names_bound(const Process& p) {
  Verdict v;
  auto r = infer(p);
  auto* ctx = std::get_if<TypeContext>(&r);
  if (!ctx) return Verdict::skip();
  NameSet fn = free_names(p);
  for (const Name& n : ctx->rho)
    if (!fn.count(n)) v.violations.push_back("rho contains " + n.text() + " which is not free");
  return v;
}

Verdict check_subject_congruence(const Process& p) {
  Verdict v;
  Process canon = canonicalize(p);
  auto a = infer(p);
  auto b = infer(canon);
  auto* ca = std::get_if<TypeContext>(&a);
  auto* cb = std::get_if<TypeContext>(&b);
  if (bool(ca) != bool(cb) || (ca && !(*ca == *cb)))
    v.violations.push_back("infer(p): " + describe_infer(a) + "; infer(canonicalize(p)) of `" + print(canon) +
                           "`: " + describe_infer(b));
  return v;
}

Verdict check_substitution(const Process& p, const Name& b, const Name& a) {
  if (!free_names(p).count(b)) return Verdict::skip();
  auto r = infer(p);
  auto* ctx = std::get_if<TypeContext>(&r);
  if (!ctx) return Verdict::skip();
  NameSet expected;
  for (const Name& n : ctx->rho) expected.insert(n == b ? a : n);
  Process q = substitute(p, b, a);
  auto rq = infer(q);
  auto* cq = std::get_if<TypeContext>(&rq);
  Verdict v;
  if (!cq || !(cq->rho == expected))
    v.violations.push_back("{" + a.text() + "/" + b.text() + "}: expected rho = " + render_names(expected) +
                           " for `" + print(q) + "`, got " + describe_infer(rq));
  return v;
}

Verdict check_subject_reduction(const Process& p) {
  auto r = infer(p);
  auto* ctx = std::get_if<TypeContext>(&r);
  if (!ctx) return Verdict::skip();
  Verdict v;
  for (const Redex& rx : redexes(p)) {
    Process q = step(p, rx);
    auto rq = infer(q);
    auto* cq = std::get_if<TypeContext>(&rq);
    if (!cq || !(cq->rho == ctx->rho))
      v.violations.push_back(describe(rx) + " leads to `" + print(canonicalize(q)) + "` with " + describe_infer(rq) +
                             ", expected rho = " + render_names(ctx->rho));
  }
  return v;
}

Verdict check_type_safety(const Process& p, std::size_t max_states) {
  if (!well_typed(p)) return Verdict::skip();
  Verdict v;
  ReductionGraph g = reduction_graph(p, max_states);
  if (g.truncated)
    v.violations.push_back("exploration truncated at " + std::to_string(max_states) + " states");
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    ErrorReport e = is_error(g.states[i]);
    if (!e.is_error()) continue;
    std::string trace;
    for (const Edge& edge : g.path_to(i)) trace += " -> " + describe(edge.redex);
    v.violations.push_back("reachable error `" + print(g.states[i]) + "` (" + e.violations.front().render() +
                           ") via" + (trace.empty() ? " root" : trace));
  }
  return v;
}

Verdict check_error_free(const Process& p) {
  auto r = infer(p);
  auto* ctx = std::get_if<TypeContext>(&r);
  if (!ctx) return Verdict::skip();
  Verdict v;
  for (const ActivePrefix& ap : active_prefixes(p)) {
    const Name& chan = ap.action.channel;
    if (!ctx->rho.count(chan) && !context_authorizes(ap.path, chan))
      v.violations.push_back("channel of " + print_action(ap.action) + " is outside rho but unauthorized");
    if (ap.action.kind == ActionKind::send_auth && !ctx->rho.count(ap.action.object) &&
        !context_authorizes(ap.path, ap.action.object))
      v.violations.push_back("object of " + print_action(ap.action) + " is outside rho but unauthorized");
  }
  return v;
}

Verdict check_congruence_oracle(const Process& p, std::size_t budget) {
  Verdict v;
  std::string key = canonical_key(p);
  Enumeration e = enumerate_congruent(p, budget);
  for (const Process& q : e.members)
    if (canonical_key(q) != key) {
      v.violations.push_back("`" + print(q) + "` is congruent to p but canonicalizes to `" +
                             print(canonicalize(q)) + "` instead of `" + print(canonicalize(p)) + "`");
      break;
    }
  return v;
}

Verdict check_error_oracle(const Process& p, std::size_t budget) {
  Verdict v;
  bool expected = is_error(p).is_error();
  Enumeration e = enumerate_congruent(p, budget);
  for (const Process& q : e.members)
    if (presentation_errors(q).is_error() != expected) {
      v.violations.push_back("presentation `" + print(q) + "` has error verdict " +
                             (expected ? "false" : "true") + " but is_error(p) says " +
                             (expected ? "true" : "false"));
      break;
    }
  return v;
}

Verdict check_error_dynamics(const Process& p) {
  Verdict v;
  NormalForm nf = canonical_normal_form(p);
  auto rs = redexes(nf);
  std::size_t unauthorized = 0;
  for (std::size_t i = 0; i < nf.components.size(); ++i) {
    const Component& c = nf.components[i];
    bool bad = !c.auths.contains(c.action.channel) ||
               (c.action.kind == ActionKind::send_auth && !c.auths.contains(c.action.object));
    if (!bad) continue;
    ++unauthorized;
    for (const Redex& r : rs)
      if (r.sender == i || r.receiver == i)
        v.violations.push_back("unauthorized prefix " + print_action(c.action) + " takes part in " + describe(r));
  }
  std::size_t reported = is_error(p).violations.size();
  if ((unauthorized == 0) != (reported == 0))
    v.violations.push_back("is_error disagrees with the normal-form authorization check");
  return v;
}

// ---------------------------------------------------------------------------

namespace {

// Candidate replacements for every subterm, smallest first.
void shrink_candidates(const Process& p, std::vector<Process>& out) {
  auto rebuild_with = [&](auto make, const Process& child) {
    std::vector<Process> sub;
    shrink_candidates(child, sub);
    for (const Process& s : sub) out.push_back(make(s));
  };
  switch (p.kind()) {
    case ProcessKind::nil:
      return;
    case ProcessKind::par:
      out.push_back(Process::nil());
      out.push_back(p.left());
      out.push_back(p.right());
      rebuild_with([&](const Process& s) { return Process::par(s, p.right()); }, p.left());
      rebuild_with([&](const Process& s) { return Process::par(p.left(), s); }, p.right());
      return;
    case ProcessKind::restrict:
      out.push_back(Process::nil());
      if (!free_names(p.body()).count(p.name())) out.push_back(p.body());
      rebuild_with([&](const Process& s) { return Process::restrict(p.name(), s); }, p.body());
      return;
    case ProcessKind::auth:
      out.push_back(Process::nil());
      out.push_back(p.body());
      rebuild_with([&](const Process& s) { return Process::auth(p.name(), s); }, p.body());
      return;
    case ProcessKind::prefix:
      out.push_back(Process::nil());
      if (!p.action().binds() || !free_names(p.continuation()).count(p.action().object))
        out.push_back(p.continuation());
      rebuild_with([&](const Process& s) { return Process::prefix(p.action(), s); }, p.continuation());
      return;
  }
}

}  // namespace

Process minimize(const Process& p, const std::function<bool(const Process&)>& fails) {
  Process cur = p;
  bool progress = true;
  while (progress) {
    progress = false;
    std::vector<Process> cands;
    shrink_candidates(cur, cands);
    std::size_t size = node_count(cur);
    for (const Process& c : cands) {
      if (node_count(c) >= size) continue;
      if (fails(c)) {
        cur = c;
        progress = true;
        break;
      }
    }
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Suite

std::size_t SuiteReport::violation_count() const {
  std::size_t n = 0;
  for (const auto& p : properties) n += p.violations.size();
  return n;
}

std::string SuiteReport::render_text(bool with_timing) const {
  std::ostringstream os;
  os << "suite seed=" << config.seed << " cases=" << cases << " max_prefixes=" << config.max_prefixes
     << " pool=" << config.name_pool_size << " auth_density=" << config.auth_density
     << " well_typed_only=" << (config.well_typed_only ? "true" : "false") << '\n';
  for (const auto& p : properties) {
    os << (p.violations.empty() ? "PASS " : "FAIL ") << p.name << ": " << p.cases << " checked, " << p.skipped
       << " skipped, " << p.violations.size() << " violations";
    if (with_timing) os << " (" << static_cast<long long>(p.elapsed_ms) << " ms)";
    os << '\n';
    std::size_t shown = 0;
    for (const auto& c : p.violations) {
      if (shown++ == 5) {
        os << "    ... " << (p.violations.size() - 5) << " more\n";
        break;
      }
      os << "    case " << c.case_index << " seed " << c.seed << ": `" << c.term << "`\n"
         << "      " << c.detail << '\n';
      if (!c.minimized.empty() && c.minimized != c.term) os << "      minimized: `" << c.minimized << "`\n";
    }
  }
  os << "total violations: " << violation_count() << '\n';
  return os.str();
}

nlohmann::ordered_json SuiteReport::to_json(bool with_timing) const {
  nlohmann::ordered_json j;
  j["seed"] = config.seed;
  j["cases"] = cases;
  j["max_prefixes"] = config.max_prefixes;
  j["name_pool_size"] = config.name_pool_size;
  j["auth_density"] = config.auth_density;
  j["well_typed_only"] = config.well_typed_only;
  j["properties"] = nlohmann::ordered_json::array();
  for (const auto& p : properties) {
    nlohmann::ordered_json pj;
    pj["name"] = p.name;
    pj["cases"] = p.cases;
    pj["skipped"] = p.skipped;
    pj["violations"] = nlohmann::ordered_json::array();
    for (const auto& c : p.violations) {
      nlohmann::ordered_json cj;
      cj["case"] = c.case_index;
      cj["seed"] = c.seed;
      cj["term"] = c.term;
      cj["minimized"] = c.minimized;
      cj["detail"] = c.detail;
      pj["violations"].push_back(cj);
    }
    if (with_timing) pj["elapsed_ms"] = p.elapsed_ms;
    j["properties"].push_back(pj);
  }
  j["total_violations"] = violation_count();
  return j;
}

namespace {

constexpr std::size_t kMinimizeLimit = 5;

class SuiteRunner {
 public:
  SuiteRunner(const GenConfig& config, const SuiteOptions& options) : config_(config), options_(options) {
    for (const char* name : {"round_trip", "normal_form", "free_names_bound", "subject_congruence", "substitution",
                             "subject_reduction", "type_safety", "error_free", "congruence_oracle", "error_oracle",
                             "error_dynamics"}) {
      PropertyReport r;
      r.name = name;
      report_.properties.push_back(r);
    }
    report_.config = config;
  }

  SuiteReport run() {
    validate(config_);
    auto pool = name_pool(config_.name_pool_size);
    for (std::size_t i = 0; i < options_.cases; ++i) {
      GenConfig gc = config_;
      gc.seed = case_seed(config_.seed, i);
      Process p = generate(gc);
      std::mt19937_64 rng(gc.seed ^ 0x5bd1e995ULL);
      current_ = {i, gc.seed};

      record(0, p, check_round_trip);
      record(1, p, check_normal_form);
      record(2, p, check_free_names_bound);
      record(3, p, check_subject_congruence);

      auto fn = sorted_for_display(free_names(p));
      if (fn.empty()) {
        skip(4);
      } else {
        Name b = fn[std::uniform_int_distribution<std::size_t>(0, fn.size() - 1)(rng)];
        std::vector<Name> targets = pool;
        for (const Name& n : fn)
          if (std::find(targets.begin(), targets.end(), n) == targets.end()) targets.push_back(n);
        Name a = targets[std::uniform_int_distribution<std::size_t>(0, targets.size() - 1)(rng)];
        record(4, p, [&](const Process& q) {
          if (!free_names(q).count(b)) return Verdict::skip();
          return check_substitution(q, b, a);
        });
      }

      // Subject reduction at every reachable state of a typable case.
      if (std::holds_alternative<TypeContext>(infer(p))) {
        auto start = Clock::now();
        ReductionGraph g = reduction_graph(p, options_.max_states);
        elapsed_[5] += Clock::now() - start;
        for (const Process& s : g.states) record(5, s, check_subject_reduction, p);
      } else {
        skip(5);
      }

      record(6, p, [&](const Process& q) { return check_type_safety(q, options_.max_states); });
      record(7, p, check_error_free);
      if (node_count(p) <= options_.oracle_max_nodes) {
        record(8, p, [&](const Process& q) { return check_congruence_oracle(q, options_.oracle_budget); });
        record(9, p, [&](const Process& q) { return check_error_oracle(q, options_.oracle_budget); });
      } else {
        skip(8);
        skip(9);
      }
      record(10, p, check_error_dynamics);
    }
    report_.cases = options_.cases;
    for (std::size_t k = 0; k < report_.properties.size(); ++k)
      report_.properties[k].elapsed_ms = std::chrono::duration<double, std::milli>(elapsed_[k]).count();
    return report_;
  }

 private:
  using Clock = std::chrono::steady_clock;

  struct Current {
    std::size_t index = 0;
    std::uint64_t seed = 0;
  };

  void skip(std::size_t k) { ++report_.properties[k].skipped; }

  template <typename Check>
  void record(std::size_t k, const Process& p, Check check, std::optional<Process> origin = std::nullopt) {
    auto start = Clock::now();
    Verdict v = check(p);
    PropertyReport& r = report_.properties[k];
    if (v.skipped) {
      ++r.skipped;
    } else {
      ++r.cases;
      for (const std::string& detail : v.violations) {
        Counterexample c;
        c.case_index = current_.index;
        c.seed = current_.seed;
        c.term = print(origin ? *origin : p);
        c.detail = origin ? "at reachable state `" + print(p) + "`: " + detail : detail;
        if (r.violations.size() < kMinimizeLimit) {
          Process small = minimize(p, [&](const Process& q) {
            Verdict w = check(q);
            return !w.skipped && !w.ok();
          });
          c.minimized = print(small);
        }
        r.violations.push_back(std::move(c));
        break;
      }
    }
    elapsed_[k] += Clock::now() - start;
  }

  GenConfig config_;
  SuiteOptions options_;
  SuiteReport report_;
  Current current_;
  std::array<Clock::duration, 11> elapsed_{};
};

}  // namespace

SuiteReport run_suite(const GenConfig& config, const SuiteOptions& options) {
  return SuiteRunner(config, options).run();
}

}  // namespace authpi
