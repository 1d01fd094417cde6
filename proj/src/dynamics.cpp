#include "authpi/dynamics.hpp"

#include <algorithm>

#include <deque>
#include <unordered_map>

#include "authpi/text.hpp"

namespace authpi {

std::string describe(const Redex& r) {
  if (r.kind == RedexKind::comm) return "comm " + r.channel.text() + " carrying " + r.object.text();
  return "auth " + r.channel.text() + " delegating " + r.object.text();
}

nlohmann::ordered_json to_json(const Redex& r) {
  nlohmann::ordered_json j;
  j["kind"] = r.kind == RedexKind::comm ? "comm" : "auth";
  j["sender"] = r.sender;
  j["receiver"] = r.receiver;
  j["chan"] = r.channel.text();
  j["obj"] = r.object.text();
  j["text"] = describe(r);
  return j;
}

namespace {

bool sender_can_delegate(const Component& c) {
  const Name& chan = c.action.channel;
  const Name& obj = c.action.object;
  if (chan == obj) return c.auths.count(chan) >= 2;
  return c.auths.contains(chan) && c.auths.contains(obj);
}

std::optional<Redex> match(const NormalForm& nf, std::size_t i, std::size_t j) {
  const Component& s = nf.components[i];
  const Component& r = nf.components[j];
  const Name& chan = s.action.channel;
  if (r.action.channel != chan) return std::nullopt;
  if (!s.auths.contains(chan) || !r.auths.contains(chan)) return std::nullopt;
  if (s.action.kind == ActionKind::output && r.action.kind == ActionKind::input)
    return Redex{RedexKind::comm, i, j, chan, s.action.object};
  if (s.action.kind == ActionKind::send_auth && r.action.kind == ActionKind::recv_auth &&
      s.action.object == r.action.object && sender_can_delegate(s))
    return Redex{RedexKind::auth, i, j, chan, s.action.object};
  return std::nullopt;
}

}  // namespace

std::vector<Redex> redexes(const NormalForm& nf) {
  std::vector<Redex> out;
  for (std::size_t i = 0; i < nf.components.size(); ++i)
    for (std::size_t j = 0; j < nf.components.size(); ++j)
      if (i != j)
        if (auto r = match(nf, i, j)) out.push_back(*r);
  return out;
}

std::vector<Redex> redexes(const Process& p) { return redexes(canonical_normal_form(p)); }

Process step(const Process& p, const Redex& r) {
  NormalForm nf = canonical_normal_form(p);
  if (r.sender >= nf.components.size() || r.receiver >= nf.components.size() || r.sender == r.receiver)
    throw InvalidRedex("redex refers to a missing component");
  auto found = match(nf, r.sender, r.receiver);
  // Restricted names are re-freshened on every normalisation, so they match by text.
  auto same = [&](const Name& mine, const Name& theirs) {
    if (mine == theirs) return true;
    bool restricted = std::find(nf.restricted.begin(), nf.restricted.end(), mine) != nf.restricted.end();
    return restricted && mine.text() == theirs.text();
  };
  if (!found || found->kind != r.kind || !same(found->channel, r.channel) || !same(found->object, r.object))
    throw InvalidRedex("not a redex of this process: " + describe(r));
  const Redex& fired = *found;

  Component& sender = nf.components[r.sender];
  Component& receiver = nf.components[r.receiver];
  Process sender_cont = sender.continuation;
  Process receiver_cont = receiver.continuation;
  if (r.kind == RedexKind::comm) {
    receiver_cont = substitute(receiver_cont, receiver.action.object, fired.object);
  } else {
    sender.auths.remove_one(fired.object);
    receiver.auths.add(fired.object);
  }

  // Components that proceed as `[a..]P`; P may itself be a composition.
  std::vector<Process> parts;
  for (std::size_t k = 0; k < nf.components.size(); ++k) {
    const Component& c = nf.components[k];
    Process body;
    if (k == r.sender)
      body = sender_cont;
    else if (k == r.receiver)
      body = receiver_cont;
    else
      body = Process::prefix(c.action, c.continuation);
    std::vector<Name> scopes = c.auths.expanded();
    for (std::size_t i = scopes.size(); i-- > 0;) body = Process::auth(scopes[i], body);
    parts.push_back(body);
  }
  Process out = Process::par_all(parts);
  for (std::size_t i = nf.restricted.size(); i-- > 0;) out = Process::restrict(nf.restricted[i], out);
  return out;
}

std::vector<std::size_t> ReductionGraph::terminal_states() const {
  std::vector<bool> has_out(states.size(), false);
  for (const Edge& e : edges) has_out[e.from] = true;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < states.size(); ++i)
    if (!has_out[i]) out.push_back(i);
  return out;
}

std::vector<Edge> ReductionGraph::path_to(std::size_t state) const {
  // States are numbered in discovery order, so the first edge reaching a
  // state is its breadth-first tree edge.
  std::vector<std::optional<Edge>> parent(states.size());
  for (const Edge& e : edges)
    if (!parent[e.to] && e.to != root && e.from < e.to) parent[e.to] = e;
  std::vector<Edge> path;
  std::size_t cur = state;
  while (cur != root && parent[cur]) {
    path.push_back(*parent[cur]);
    cur = parent[cur]->from;
  }
  return {path.rbegin(), path.rend()};
}

ReductionGraph reduction_graph(const Process& p, std::size_t max_states) {
  if (max_states == 0) throw std::invalid_argument("max_states must be at least 1");
  ReductionGraph g;
  std::unordered_map<std::string, std::size_t> index;
  std::deque<std::size_t> queue;

  auto [root, root_key] = canonicalize_with_key(p);
  g.states.push_back(root);
  index.emplace(std::move(root_key), 0);
  queue.push_back(0);

  while (!queue.empty()) {
    std::size_t cur = queue.front();
    queue.pop_front();
    const Process state = g.states[cur];
    for (const Redex& r : redexes(state)) {
      auto [next, key] = canonicalize_with_key(step(state, r));
      auto it = index.find(key);
      if (it == index.end()) {
        if (g.states.size() >= max_states) {
          g.truncated = true;
          continue;
        }
        std::size_t id = g.states.size();
        g.states.push_back(next);
        index.emplace(std::move(key), id);
        queue.push_back(id);
        g.edges.push_back({cur, r, id});
      } else {
        g.edges.push_back({cur, r, it->second});
      }
    }
  }
  return g;
}

nlohmann::ordered_json to_json(const ReductionGraph& g) {
  nlohmann::ordered_json j;
  j["root"] = g.root;
  j["truncated"] = g.truncated;
  j["states"] = nlohmann::ordered_json::array();
  for (const Process& s : g.states) j["states"].push_back(print(s));
  j["edges"] = nlohmann::ordered_json::array();
  for (const Edge& e : g.edges) {
    nlohmann::ordered_json ej;
    ej["from"] = e.from;
    ej["redex"] = to_json(e.redex);
    ej["to"] = e.to;
    j["edges"].push_back(ej);
  }
  return j;
}

}  // namespace authpi
