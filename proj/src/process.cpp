#include "authpi/process.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <mutex>
#include <stdexcept>

namespace authpi {

namespace {

std::atomic<std::uint64_t> g_next_uid{1};

struct InternTable {
  std::mutex mutex;
  std::unordered_map<std::string, std::uint64_t> uids;
};

InternTable& intern_table() {
  static InternTable table;
  return table;
}

}  // namespace

Name Name::global(std::string_view text) {
  auto& table = intern_table();
  std::lock_guard lock(table.mutex);
  auto [it, inserted] = table.uids.try_emplace(std::string(text), 0);
  if (inserted) it->second = g_next_uid.fetch_add(1);
  return Name(std::string(text), it->second, true);
}

Name Name::fresh(std::string_view text) {
  return Name(std::string(text), g_next_uid.fetch_add(1), false);
}

bool is_identifier(std::string_view text) {
  if (text.empty() || text == "new") return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(text.front())) return false;
  return std::all_of(text.begin() + 1, text.end(),
                     [&](char c) { return alpha(c) || digit(c) || c == '_'; });
}

std::vector<Name> sorted_for_display(const NameSet& names) {
  std::vector<Name> out(names.begin(), names.end());
  std::sort(out.begin(), out.end(), [](const Name& a, const Name& b) {
    if (a.text() != b.text()) return a.text() < b.text();
    return a.uid() < b.uid();
  });
  return out;
}

std::string free_name_token(const Name& n) {
  if (n.is_global()) return n.text();
  return n.text() + "'" + std::to_string(n.uid());
}

// ---------------------------------------------------------------------------

struct Process::Node {
  ProcessKind kind = ProcessKind::nil;
  Name name;
  Action action;
  Process first{std::shared_ptr<const Node>{}};
  Process second{std::shared_ptr<const Node>{}};
  std::optional<SourceSpan> span;
};

Process::Process() : Process(nil()) {}

Process Process::nil() {
  static const auto node = std::make_shared<const Node>();
  return Process(node);
}

Process Process::par(Process left, Process right) {
  auto n = std::make_shared<Node>();
  n->kind = ProcessKind::par;
  n->first = std::move(left);
  n->second = std::move(right);
  return Process(std::move(n));
}

Process Process::restrict(Name binder, Process body) {
  auto n = std::make_shared<Node>();
  n->kind = ProcessKind::restrict;
  n->name = std::move(binder);
  n->first = std::move(body);
  return Process(std::move(n));
}

Process Process::auth(Name scope, Process body) {
  auto n = std::make_shared<Node>();
  n->kind = ProcessKind::auth;
  n->name = std::move(scope);
  n->first = std::move(body);
  return Process(std::move(n));
}

Process Process::prefix(Action action, Process continuation) {
  auto n = std::make_shared<Node>();
  n->kind = ProcessKind::prefix;
  n->action = std::move(action);
  n->first = std::move(continuation);
  return Process(std::move(n));
}

Process Process::par_all(const std::vector<Process>& parts) {
  if (parts.empty()) return nil();
  Process acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = par(acc, parts[i]);
  return acc;
}

ProcessKind Process::kind() const { return node_ ? node_->kind : ProcessKind::nil; }
const Name& Process::name() const { return node_->name; }
const Action& Process::action() const { return node_->action; }
const Process& Process::first() const { return node_->first; }
const Process& Process::second() const { return node_->second; }
const std::optional<SourceSpan>& Process::span() const { return node_->span; }

Process Process::with_span(SourceSpan span) const {
  auto n = std::make_shared<Node>(*node_);
  n->span = span;
  return Process(std::move(n));
}

// ---------------------------------------------------------------------------

namespace {

void collect_free(const Process& p, std::vector<Name>& bound, NameSet& out) {
  auto add = [&](const Name& n) {
    if (std::find(bound.begin(), bound.end(), n) == bound.end()) out.insert(n);
  };
  switch (p.kind()) {
    case ProcessKind::nil:
      return;
    case ProcessKind::par:
      collect_free(p.left(), bound, out);
      collect_free(p.right(), bound, out);
      return;
    case ProcessKind::restrict:
      bound.push_back(p.name());
      collect_free(p.body(), bound, out);
      bound.pop_back();
      return;
    case ProcessKind::auth:
      add(p.name());
      collect_free(p.body(), bound, out);
      return;
    case ProcessKind::prefix: {
      const Action& a = p.action();
      add(a.channel);
      if (a.binds()) {
        bound.push_back(a.object);
        collect_free(p.continuation(), bound, out);
        bound.pop_back();
      } else {
        add(a.object);
        collect_free(p.continuation(), bound, out);
      }
      return;
    }
  }
}

bool renaming_touches(const Renaming& r, const Process& p) {
  if (r.empty()) return false;
  for (const Name& n : free_names(p))
    if (r.count(n.uid())) return true;
  return false;
}

bool in_range(const Renaming& r, const Name& n) {
  return std::any_of(r.begin(), r.end(), [&](const auto& kv) { return kv.second == n; });
}

Name apply_renaming(const Renaming& r, const Name& n) {
  auto it = r.find(n.uid());
  return it == r.end() ? n : it->second;
}

Process rename_rec(const Process& p, const Renaming& r);

// Renames under a binder. Returns the (possibly freshened) binder and body.
std::pair<Name, Process> rename_under(const Name& binder, const Process& body,
                                      const Renaming& r) {
  Renaming inner = r;
  inner.erase(binder.uid());
  if (!renaming_touches(inner, body)) return {binder, body};
  if (in_range(inner, binder)) {
    Name fresh = Name::fresh(binder.text());
    inner[binder.uid()] = fresh;
    return {fresh, rename_rec(body, inner)};
  }
  return {binder, rename_rec(body, inner)};
}

Process rename_rec(const Process& p, const Renaming& r) {
  switch (p.kind()) {
    case ProcessKind::nil:
      return p;
    case ProcessKind::par: {
      Process l = rename_rec(p.left(), r);
      Process rr = rename_rec(p.right(), r);
      if (l.same_node(p.left()) && rr.same_node(p.right())) return p;
      return Process::par(l, rr);
    }
    case ProcessKind::restrict: {
      auto [b, body] = rename_under(p.name(), p.body(), r);
      if (b == p.name() && body.same_node(p.body())) return p;
      return Process::restrict(b, body);
    }
    case ProcessKind::auth: {
      Name s = apply_renaming(r, p.name());
      Process body = rename_rec(p.body(), r);
      if (s == p.name() && body.same_node(p.body())) return p;
      return Process::auth(s, body);
    }
    case ProcessKind::prefix: {
      Action a = p.action();
      a.channel = apply_renaming(r, a.channel);
      Process cont;
      if (a.binds()) {
        auto [b, c] = rename_under(a.object, p.continuation(), r);
        a.object = b;
        cont = c;
      } else {
        a.object = apply_renaming(r, a.object);
        cont = rename_rec(p.continuation(), r);
      }
      if (a == p.action() && cont.same_node(p.continuation())) return p;
      return Process::prefix(a, cont);
    }
  }
  return p;
}

struct AlphaEnv {
  std::vector<std::uint64_t> left;
  std::vector<std::uint64_t> right;

  // Level of the innermost binder for `n`, or -1 when free.
  static long level(const std::vector<std::uint64_t>& env, const Name& n) {
    for (std::size_t i = env.size(); i-- > 0;)
      if (env[i] == n.uid()) return static_cast<long>(i);
    return -1;
  }

  bool same(const Name& a, const Name& b) const {
    long la = level(left, a);
    long lb = level(right, b);
    if (la < 0 && lb < 0) return a == b;
    return la == lb;
  }
};

bool alpha_rec(const Process& p, const Process& q, AlphaEnv& env) {
  if (p.kind() != q.kind()) return false;
  switch (p.kind()) {
    case ProcessKind::nil:
      return true;
    case ProcessKind::par:
      return alpha_rec(p.left(), q.left(), env) && alpha_rec(p.right(), q.right(), env);
    case ProcessKind::restrict: {
      env.left.push_back(p.name().uid());
      env.right.push_back(q.name().uid());
      bool ok = alpha_rec(p.body(), q.body(), env);
      env.left.pop_back();
      env.right.pop_back();
      return ok;
    }
    case ProcessKind::auth:
      return env.same(p.name(), q.name()) && alpha_rec(p.body(), q.body(), env);
    case ProcessKind::prefix: {
      const Action& a = p.action();
      const Action& b = q.action();
      if (a.kind != b.kind || !env.same(a.channel, b.channel)) return false;
      if (!a.binds()) {
        return env.same(a.object, b.object) &&
               alpha_rec(p.continuation(), q.continuation(), env);
      }
      env.left.push_back(a.object.uid());
      env.right.push_back(b.object.uid());
      bool ok = alpha_rec(p.continuation(), q.continuation(), env);
      env.left.pop_back();
      env.right.pop_back();
      return ok;
    }
  }
  return false;
}

const char* action_tag(ActionKind k) {
  switch (k) {
    case ActionKind::output:
      return "o";
    case ActionKind::input:
      return "i";
    case ActionKind::send_auth:
      return "s";
    case ActionKind::recv_auth:
      return "r";
  }
  return "?";
}

void key_rec(const Process& p, std::vector<std::uint64_t>& env, std::string& out) {
  auto token = [&](const Name& n) {
    long lvl = AlphaEnv::level(env, n);
    if (lvl >= 0) {
      out += '#';
      out += std::to_string(lvl);
    } else {
      out += free_name_token(n);
    }
  };
  switch (p.kind()) {
    case ProcessKind::nil:
      out += '0';
      return;
    case ProcessKind::par:
      out += '(';
      key_rec(p.left(), env, out);
      out += '|';
      key_rec(p.right(), env, out);
      out += ')';
      return;
    case ProcessKind::restrict:
      out += "v(";
      env.push_back(p.name().uid());
      key_rec(p.body(), env, out);
      env.pop_back();
      out += ')';
      return;
    case ProcessKind::auth:
      out += '[';
      token(p.name());
      out += ']';
      key_rec(p.body(), env, out);
      return;
    case ProcessKind::prefix: {
      const Action& a = p.action();
      out += action_tag(a.kind);
      token(a.channel);
      out += ',';
      if (a.binds()) {
        out += "_.";
        env.push_back(a.object.uid());
        key_rec(p.continuation(), env, out);
        env.pop_back();
      } else {
        token(a.object);
        out += '.';
        key_rec(p.continuation(), env, out);
      }
      return;
    }
  }
}

}  // namespace

NameSet free_names(const Process& p) {
  NameSet out;
  std::vector<Name> bound;
  collect_free(p, bound, out);
  return out;
}

Process substitute(const Process& p, const Name& target, const Name& replacement) {
  if (target == replacement) return p;
  return rename_rec(p, Renaming{{target.uid(), replacement}});
}

Process rename(const Process& p, const Renaming& renaming) {
  Renaming r;
  for (const auto& [uid, n] : renaming)
    if (n.uid() != uid) r.emplace(uid, n);
  if (r.empty()) return p;
  return rename_rec(p, r);
}

bool alpha_eq(const Process& p, const Process& q) {
  AlphaEnv env;
  return alpha_rec(p, q, env);
}

std::string alpha_key(const Process& p) {
  std::string out;
  std::vector<std::uint64_t> env;
  key_rec(p, env, out);
  return out;
}

std::size_t prefix_count(const Process& p) {
  switch (p.kind()) {
    case ProcessKind::nil:
      return 0;
    case ProcessKind::par:
      return prefix_count(p.left()) + prefix_count(p.right());
    case ProcessKind::restrict:
    case ProcessKind::auth:
      return prefix_count(p.body());
    case ProcessKind::prefix:
      return 1 + prefix_count(p.continuation());
  }
  return 0;
}

std::size_t node_count(const Process& p) {
  switch (p.kind()) {
    case ProcessKind::nil:
      return 1;
    case ProcessKind::par:
      return 1 + node_count(p.left()) + node_count(p.right());
    case ProcessKind::restrict:
    case ProcessKind::auth:
      return 2 + node_count(p.body());
    case ProcessKind::prefix:
      return 3 + node_count(p.continuation());
  }
  return 0;
}

}  // namespace authpi
