#include "authpi/congruence.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_set>

namespace authpi {

bool AuthMultiset::remove_one(const Name& n) {
  auto it = counts_.find(n);
  if (it == counts_.end()) return false;
  if (--it->second == 0) counts_.erase(it);
  return true;
}

std::size_t AuthMultiset::total() const {
  std::size_t t = 0;
  for (const auto& [n, c] : counts_) t += c;
  return t;
}

NameSet AuthMultiset::support() const {
  NameSet out;
  for (const auto& [n, c] : counts_) out.insert(n);
  return out;
}

std::vector<Name> AuthMultiset::expanded() const {
  std::vector<Name> out;
  for (const Name& n : sorted_for_display(support()))
    for (std::size_t i = 0; i < count(n); ++i) out.push_back(n);
  return out;
}

// ---------------------------------------------------------------------------
// Normal form

namespace {

void normal_form_rec(const Process& p, Renaming& sigma, std::vector<Name>& scopes, NormalForm& out) {
  switch (p.kind()) {
    case ProcessKind::nil:
      return;
    case ProcessKind::par:
      normal_form_rec(p.left(), sigma, scopes, out);
      normal_form_rec(p.right(), sigma, scopes, out);
      return;
    case ProcessKind::restrict: {
      Name fresh = Name::fresh(p.name().text());
      out.restricted.push_back(fresh);
      auto saved = sigma.find(p.name().uid()) == sigma.end()
                       ? std::optional<Name>{}
                       : std::optional<Name>{sigma.at(p.name().uid())};
      sigma[p.name().uid()] = fresh;
      normal_form_rec(p.body(), sigma, scopes, out);
      if (saved)
        sigma[p.name().uid()] = *saved;
      else
        sigma.erase(p.name().uid());
      return;
    }
    case ProcessKind::auth: {
      auto it = sigma.find(p.name().uid());
      scopes.push_back(it == sigma.end() ? p.name() : it->second);
      normal_form_rec(p.body(), sigma, scopes, out);
      scopes.pop_back();
      return;
    }
    case ProcessKind::prefix: {
      Process renamed = rename(p, sigma);
      Component c;
      for (const Name& s : scopes) c.auths.add(s);
      c.action = renamed.action();
      c.continuation = renamed.continuation();
      out.components.push_back(std::move(c));
      return;
    }
  }
}

Process component_process(const Component& c, const std::vector<Name>& scope_order) {
  Process p = Process::prefix(c.action, c.continuation);
  for (std::size_t i = scope_order.size(); i-- > 0;) p = Process::auth(scope_order[i], p);
  return p;
}

}  // namespace

NormalForm normal_form(const Process& p) {
  NormalForm out;
  Renaming sigma;
  std::vector<Name> scopes;
  normal_form_rec(p, sigma, scopes, out);
  return out;
}

Process rebuild(const NormalForm& nf) {
  std::vector<Process> parts;
  parts.reserve(nf.components.size());
  for (const Component& c : nf.components) parts.push_back(component_process(c, c.auths.expanded()));
  Process body = Process::par_all(parts);
  for (std::size_t i = nf.restricted.size(); i-- > 0;) body = Process::restrict(nf.restricted[i], body);
  return body;
}

// ---------------------------------------------------------------------------
// Canonical forms
//
// Bound names are written as `#level` where the level counts enclosing
// binders, so keys are independent of binder identity. The restricted names
// of a form are assigned consecutive levels in the order that minimises the
// form's key; above kMaxPermuted names a first-occurrence order is used.

namespace {

constexpr std::size_t kMaxPermuted = 5;

struct CanonComponent;

struct CanonForm {
  std::vector<Name> restricted;
  std::vector<CanonComponent> components;
  std::string key;
};

struct CanonComponent {
  AuthMultiset auths;
  std::vector<Name> scope_order;
  Action action;
  CanonForm continuation;
  std::string key;
};

using Env = std::vector<std::uint64_t>;

std::string token(const Env& env, const Name& n) {
  for (std::size_t i = env.size(); i-- > 0;)
    if (env[i] == n.uid()) return "#" + std::to_string(i);
  return free_name_token(n);
}

const char* tag_of(ActionKind k) {
  switch (k) {
    case ActionKind::output:
      return "out";
    case ActionKind::input:
      return "in";
    case ActionKind::send_auth:
      return "sa";
    case ActionKind::recv_auth:
      return "ra";
  }
  return "?";
}

CanonForm canon(const Process& p, Env& env);

CanonComponent canon_component(const Component& c, Env& env) {
  CanonComponent out;
  out.auths = c.auths;
  out.action = c.action;

  std::vector<std::pair<std::string, Name>> scopes;
  for (const Name& n : c.auths.expanded()) scopes.emplace_back(token(env, n), n);
  std::stable_sort(scopes.begin(), scopes.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::string key = tag_of(c.action.kind);
  key += '(';
  key += token(env, c.action.channel);
  key += ',';
  if (c.action.binds()) {
    key += '_';
    env.push_back(c.action.object.uid());
    out.continuation = canon(c.continuation, env);
    env.pop_back();
  } else {
    key += token(env, c.action.object);
    out.continuation = canon(c.continuation, env);
  }
  key += ").[";
  key += out.continuation.key;
  key += "]{";
  for (std::size_t i = 0; i < scopes.size(); ++i) {
    if (i > 0) key += ',';
    key += scopes[i].first;
    out.scope_order.push_back(scopes[i].second);
  }
  key += '}';
  out.key = std::move(key);
  return out;
}

// Free names that survive garbage collection: a scope over 0 disappears, so
// only names reachable from some prefix count.
NameSet live_names(const Process& p) {
  NameSet out;
  for (const Component& c : normal_form(p).components) {
    for (const Name& n : c.auths.support()) out.insert(n);
    out.insert(c.action.channel);
    NameSet inner = live_names(c.continuation);
    if (c.action.binds())
      inner.erase(c.action.object);
    else
      out.insert(c.action.object);
    out.insert(inner.begin(), inner.end());
  }
  return out;
}

bool mentions(const Component& c, const Name& n) {
  if (c.auths.contains(n) || c.action.channel == n) return true;
  if (!c.action.binds()) return c.action.object == n || live_names(c.continuation).count(n) > 0;
  if (c.action.object == n) return false;
  return live_names(c.continuation).count(n) > 0;
}

// Components and key for one choice of restricted-name order.
std::pair<std::vector<CanonComponent>, std::string> arrange(const std::vector<Component>& comps,
                                                            const std::vector<Name>& order, Env& env) {
  for (const Name& n : order) env.push_back(n.uid());
  std::vector<CanonComponent> out;
  out.reserve(comps.size());
  for (const Component& c : comps) out.push_back(canon_component(c, env));
  env.resize(env.size() - order.size());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  std::string key;
  if (out.empty()) {
    key = "0";
  } else {
    key = "v" + std::to_string(order.size()) + ":";
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (i > 0) key += '|';
      key += out[i].key;
    }
  }
  return {std::move(out), std::move(key)};
}

// Order restricted names by first occurrence in components sorted with all
// restricted names anonymised.
std::vector<Name> heuristic_order(const std::vector<Component>& comps, const std::vector<Name>& used,
                                  Env& env) {
  Name anon = Name::global("$restricted");
  Renaming to_anon;
  for (const Name& n : used) to_anon[n.uid()] = anon;
  std::vector<std::pair<std::string, std::size_t>> keyed;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    Component c = comps[i];
    Process renamed = rename(Process::prefix(c.action, c.continuation), to_anon);
    AuthMultiset auths;
    for (const auto& [n, k] : c.auths.counts())
      auths.add(to_anon.count(n.uid()) ? anon : n, k);
    Component anon_c{auths, renamed.action(), renamed.continuation()};
    keyed.emplace_back(canon_component(anon_c, env).key, i);
  }
  std::stable_sort(keyed.begin(), keyed.end());
  std::vector<Name> order;
  for (const auto& [k, i] : keyed) {
    const Component& c = comps[i];
    auto note = [&](const Name& n) {
      if (std::find(used.begin(), used.end(), n) != used.end() &&
          std::find(order.begin(), order.end(), n) == order.end())
        order.push_back(n);
    };
    note(c.action.channel);
    if (!c.action.binds()) note(c.action.object);
    for (const Name& n : c.auths.expanded()) note(n);
    for (const Name& n : sorted_for_display(free_names(c.continuation))) note(n);
  }
  for (const Name& n : used)
    if (std::find(order.begin(), order.end(), n) == order.end()) order.push_back(n);
  return order;
}

CanonForm canon(const Process& p, Env& env) {
  NormalForm nf = normal_form(p);
  std::vector<Name> used;
  for (const Name& r : nf.restricted) {
    bool is_used = std::any_of(nf.components.begin(), nf.components.end(),
                               [&](const Component& c) { return mentions(c, r); });
    if (is_used) used.push_back(r);
  }

  CanonForm best;
  if (used.size() <= kMaxPermuted) {
    std::vector<std::size_t> perm(used.size());
    std::iota(perm.begin(), perm.end(), 0);
    bool first = true;
    do {
      std::vector<Name> order;
      for (std::size_t i : perm) order.push_back(used[i]);
      auto [comps, key] = arrange(nf.components, order, env);
      if (first || key < best.key) {
        best.restricted = std::move(order);
        best.components = std::move(comps);
        best.key = std::move(key);
        first = false;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    std::vector<Name> order = heuristic_order(nf.components, used, env);
    auto [comps, key] = arrange(nf.components, order, env);
    best.restricted = std::move(order);
    best.components = std::move(comps);
    best.key = std::move(key);
  }
  return best;
}

Process to_process(const CanonForm& f);

Component to_component(const CanonComponent& c) {
  return Component{c.auths, c.action, to_process(c.continuation)};
}

Process to_process(const CanonForm& f) {
  std::vector<Process> parts;
  for (const CanonComponent& c : f.components)
    parts.push_back(component_process(to_component(c), c.scope_order));
  Process body = Process::par_all(parts);
  for (std::size_t i = f.restricted.size(); i-- > 0;) body = Process::restrict(f.restricted[i], body);
  return body;
}

CanonForm canon_root(const Process& p) {
  Env env;
  return canon(p, env);
}

}  // namespace

NormalForm canonical_normal_form(const Process& p) {
  CanonForm f = canon_root(p);
  NormalForm out;
  out.restricted = f.restricted;
  for (const CanonComponent& c : f.components) out.components.push_back(to_component(c));
  return out;
}

Process canonicalize(const Process& p) { return to_process(canon_root(p)); }

std::string canonical_key(const Process& p) { return canon_root(p).key; }

std::pair<Process, std::string> canonicalize_with_key(const Process& p) {
  CanonForm f = canon_root(p);
  return {to_process(f), std::move(f.key)};
}

bool congruent(const Process& p, const Process& q) { return alpha_eq(canonicalize(p), canonicalize(q)); }

// ---------------------------------------------------------------------------
// Bounded congruence-class enumeration

namespace {

bool free_in(const Name& n, const Process& p) { return free_names(p).count(n) > 0; }

// Results of applying one axiom, in either direction, at the root of `p`.
void root_rewrites(const Process& p, const NameSet& probes, std::vector<Process>& out) {
  switch (p.kind()) {
    case ProcessKind::nil:
      for (const Name& a : probes) out.push_back(Process::auth(a, Process::nil()));
      return;
    case ProcessKind::par: {
      const Process& l = p.left();
      const Process& r = p.right();
      if (r.is_nil()) out.push_back(l);
      out.push_back(Process::par(r, l));
      if (l.kind() == ProcessKind::par) out.push_back(Process::par(l.left(), Process::par(l.right(), r)));
      if (r.kind() == ProcessKind::par) out.push_back(Process::par(Process::par(l, r.left()), r.right()));
      if (r.kind() == ProcessKind::restrict) {
        // P | new a.Q  ->  new a.(P | Q), alpha-converting a when it is free in P.
        Name a = r.name();
        Process q = r.body();
        if (free_in(a, l)) {
          Name fresh = Name::fresh(a.text());
          q = substitute(q, a, fresh);
          a = fresh;
        }
        out.push_back(Process::restrict(a, Process::par(l, q)));
      }
      if (l.kind() == ProcessKind::auth && r.kind() == ProcessKind::auth && l.name() == r.name())
        out.push_back(Process::auth(l.name(), Process::par(l.body(), r.body())));
      return;
    }
    case ProcessKind::restrict: {
      const Name& a = p.name();
      const Process& body = p.body();
      if (body.is_nil()) out.push_back(Process::nil());
      if (body.kind() == ProcessKind::restrict)
        out.push_back(Process::restrict(body.name(), Process::restrict(a, body.body())));
      if (body.kind() == ProcessKind::par) {
        // new a.(P | Q)  ->  P | new a.Q  when a is not free in P
        if (!free_in(a, body.left()))
          out.push_back(Process::par(body.left(), Process::restrict(a, body.right())));
      }
      if (body.kind() == ProcessKind::auth && body.name() != a)
        out.push_back(Process::auth(body.name(), Process::restrict(a, body.body())));
      return;
    }
    case ProcessKind::auth: {
      const Name& a = p.name();
      const Process& body = p.body();
      if (body.is_nil()) out.push_back(Process::nil());
      if (body.kind() == ProcessKind::auth)
        out.push_back(Process::auth(body.name(), Process::auth(a, body.body())));
      if (body.kind() == ProcessKind::par)
        out.push_back(Process::par(Process::auth(a, body.left()), Process::auth(a, body.right())));
      if (body.kind() == ProcessKind::restrict) {
        Name b = body.name();
        Process inner = body.body();
        if (b == a) {
          Name fresh = Name::fresh(b.text());
          inner = substitute(inner, b, fresh);
          b = fresh;
        }
        out.push_back(Process::restrict(b, Process::auth(a, inner)));
      }
      return;
    }
    case ProcessKind::prefix:
      return;
  }
}

void all_rewrites(const Process& p, const NameSet& probes, std::vector<Process>& out) {
  root_rewrites(p, probes, out);
  std::vector<Process> sub;
  switch (p.kind()) {
    case ProcessKind::nil:
      return;
    case ProcessKind::par:
      all_rewrites(p.left(), probes, sub);
      for (const Process& s : sub) out.push_back(Process::par(s, p.right()));
      sub.clear();
      all_rewrites(p.right(), probes, sub);
      for (const Process& s : sub) out.push_back(Process::par(p.left(), s));
      return;
    case ProcessKind::restrict:
      all_rewrites(p.body(), probes, sub);
      for (const Process& s : sub) out.push_back(Process::restrict(p.name(), s));
      return;
    case ProcessKind::auth:
      all_rewrites(p.body(), probes, sub);
      for (const Process& s : sub) out.push_back(Process::auth(p.name(), s));
      return;
    case ProcessKind::prefix:
      all_rewrites(p.continuation(), probes, sub);
      for (const Process& s : sub) out.push_back(Process::prefix(p.action(), s));
      return;
  }
}

}  // namespace

Enumeration enumerate_congruent(const Process& p, const EnumerationOptions& options) {
  const NameSet probes = options.probes ? *options.probes : free_names(p);
  const std::size_t max_nodes = node_count(p) + options.extra_nodes;

  Enumeration result;
  std::unordered_set<std::string> seen;
  std::deque<Process> queue;
  seen.insert(alpha_key(p));
  result.members.push_back(p);
  queue.push_back(p);
  std::vector<Process> next;
  while (!queue.empty()) {
    Process cur = queue.front();
    queue.pop_front();
    next.clear();
    all_rewrites(cur, probes, next);
    for (const Process& q : next) {
      if (node_count(q) > max_nodes) continue;
      if (!seen.insert(alpha_key(q)).second) continue;
      if (result.members.size() >= options.node_budget) {
        result.truncated = true;
        return result;
      }
      result.members.push_back(q);
      queue.push_back(q);
    }
  }
  return result;
}

Enumeration enumerate_congruent(const Process& p, std::size_t node_budget) {
  EnumerationOptions options;
  options.node_budget = node_budget;
  return enumerate_congruent(p, options);
}

}  // namespace authpi
