#include <doctest.h>

#include <functional>

#include "authpi/harness.hpp"
#include "authpi/text.hpp"
#include "support.hpp"

using namespace authpi;
using json = nlohmann::ordered_json;
using test_support::N;
using test_support::P;

namespace {

ParseError parse_error(std::string_view text) {
  auto r = parse(text);
  REQUIRE(std::holds_alternative<ParseError>(r));
  return std::get<ParseError>(r);
}

// Checks a document against the AST schema. Returns an empty string when
// valid, otherwise a description of the first problem.
std::string validate_ast(const json& j) {
  auto keys_are = [](const json& o, std::vector<std::string> keys) {
    if (!o.is_object() || o.size() != keys.size()) return false;
    std::size_t i = 0;
    for (auto it = o.begin(); it != o.end(); ++it, ++i)
      if (it.key() != keys[i]) return false;
    return true;
  };
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) return "missing kind";
  std::string kind = j["kind"];
  auto name_ok = [](const json& n) { return n.is_string() && is_identifier(n.get<std::string>()); };
  if (kind == "nil") return keys_are(j, {"kind"}) ? "" : "nil has extra fields";
  if (kind == "par") {
    if (!keys_are(j, {"kind", "left", "right"})) return "bad par fields";
    std::string l = validate_ast(j["left"]);
    return l.empty() ? validate_ast(j["right"]) : l;
  }
  if (kind == "new" || kind == "auth") {
    if (!keys_are(j, {"kind", "name", "body"})) return "bad " + kind + " fields";
    if (!name_ok(j["name"])) return "bad name";
    return validate_ast(j["body"]);
  }
  if (kind == "prefix") {
    if (!keys_are(j, {"kind", "action", "cont"})) return "bad prefix fields";
    const json& a = j["action"];
    if (!keys_are(a, {"tag", "chan", "obj"})) return "bad action fields";
    std::string tag = a["tag"];
    if (tag != "out" && tag != "in" && tag != "sendauth" && tag != "recvauth") return "bad tag " + tag;
    if (!name_ok(a["chan"]) || !name_ok(a["obj"])) return "bad action name";
    return validate_ast(j["cont"]);
  }
  return "unknown kind " + kind;
}

}  // namespace

TEST_CASE("parses the delegation example") {
  Process s = P("[a](a?[b].0 | [b]a![b].0)");
  REQUIRE(s.kind() == ProcessKind::auth);
  CHECK(s.name() == N("a"));
  const Process& par = s.body();
  REQUIRE(par.kind() == ProcessKind::par);
  REQUIRE(par.left().kind() == ProcessKind::prefix);
  CHECK(par.left().action() == Action::recv_auth(N("a"), N("b")));
  CHECK(par.left().continuation().is_nil());
  REQUIRE(par.right().kind() == ProcessKind::auth);
  CHECK(par.right().name() == N("b"));
  REQUIRE(par.right().body().kind() == ProcessKind::prefix);
  CHECK(par.right().body().action() == Action::send_auth(N("a"), N("b")));
}

TEST_CASE("unary operators bind tighter than parallel composition") {
  Process p = P("[a] a!b.0 | c?x.0");
  REQUIRE(p.kind() == ProcessKind::par);
  CHECK(p.left().kind() == ProcessKind::auth);
  CHECK(p.right().kind() == ProcessKind::prefix);
  CHECK(p.right().action().kind == ActionKind::input);

  Process q = P("new a.a!b.0 | a!b.0");
  REQUIRE(q.kind() == ProcessKind::par);
  CHECK(free_names(q).count(N("a")));
}

TEST_CASE("parallel composition is left associative") {
  Process p = P("a!a.0 | b!b.0 | c!c.0");
  REQUIRE(p.kind() == ProcessKind::par);
  CHECK(p.left().kind() == ProcessKind::par);
  CHECK(p.right().kind() == ProcessKind::prefix);
}

TEST_CASE("comments and whitespace") {
  CHECK(alpha_eq(P("# example\n  a!b.0   # trailing\n"), P("a!b.0")));
  CHECK(P("0").is_nil());
}

TEST_CASE("input binds its object, receive-authorization does not") {
  Process p = P("a?x.x!x.0");
  CHECK(p.action().object != N("x"));
  CHECK(P("a?[x].x!x.0").action().object == N("x"));
}

TEST_CASE("printer output") {
  CHECK(print(Process::nil()) == "0");
  CHECK(print(Process::auth(N("a"), Process::prefix(Action::output(N("a"), N("b")), Process::nil()))) ==
        "[a]a!b.0");
  CHECK(print(Process::par(Process::nil(), Process::nil())) == "0 | 0");
  CHECK(print(P("[a](a?[b].0 | [b]a![b].0)")) == "[a](a?[b].0 | [b]a![b].0)");
  CHECK(print(P("a!b.0 | (b!c.0 | c!d.0)")) == "a!b.0 | (b!c.0 | c!d.0)");
  CHECK(print(P("(a!b.0 | b!c.0) | c!d.0")) == "a!b.0 | b!c.0 | c!d.0");
  CHECK(print(P("new k.k!a.0")) == "new k.k!a.0");
  CHECK(print(P("a?x.x!b.0")) == "a?x.x!b.0");
}

TEST_CASE("printer renames binders that would capture") {
  // A bound `a` under which the free `a` also occurs.
  Name bound = Name::fresh("a");
  Process p = Process::restrict(bound, Process::prefix(Action::output(bound, N("a")), Process::nil()));
  std::string text = print(p);
  CHECK(text != "new a.a!a.0");
  CHECK(alpha_eq(P(text), p));
}

TEST_CASE("parse errors carry positions") {
  ParseError e = parse_error("a!b.");
  CHECK(e.span.line == 1);
  CHECK(e.span.column == 5);
  CHECK_FALSE(e.message.empty());
  CHECK_FALSE(e.expected.empty());

  ParseError on_line_two = parse_error("a!b.0 |\n  ?");
  CHECK(on_line_two.span.line == 2);
  CHECK(on_line_two.span.column == 3);

  CHECK_FALSE(parse_error("").message.empty());
  CHECK_FALSE(parse_error("a!b").message.empty());
  CHECK_FALSE(parse_error("new.0").message.empty());
  CHECK_FALSE(parse_error("[new]0").message.empty());
  CHECK_FALSE(parse_error("a!!b.0").message.empty());
  CHECK_FALSE(parse_error("0 0").message.empty());
}

TEST_CASE("unbalanced delimiters point at the opener") {
  ParseError open = parse_error("  (a!b.0 | 0");
  CHECK(open.message.find("'('") != std::string::npos);
  CHECK(open.message.find("1:3") != std::string::npos);

  ParseError bracket = parse_error("[a a!b.0");
  CHECK(bracket.message.find("'['") != std::string::npos);

  ParseError close = parse_error("a!b.0)");
  CHECK(close.message.find("')'") != std::string::npos);
  CHECK(close.span.column == 6);
}

TEST_CASE("json export examples") {
  CHECK(to_json(P("0")).dump() == R"({"kind":"nil"})");
  CHECK(to_json(P("[a]0")).dump() == R"({"kind":"auth","name":"a","body":{"kind":"nil"}})");
  CHECK(to_json(P("a!b.0")).dump() ==
        R"({"kind":"prefix","action":{"tag":"out","chan":"a","obj":"b"},"cont":{"kind":"nil"}})");
  CHECK(to_json(P("new k.k?x.[x]k![x].k?[x].0")).dump() ==
        R"({"kind":"new","name":"k","body":{"kind":"prefix","action":{"tag":"in","chan":"k","obj":"x"},)"
        R"("cont":{"kind":"auth","name":"x","body":{"kind":"prefix","action":{"tag":"sendauth","chan":"k","obj":"x"},)"
        R"("cont":{"kind":"prefix","action":{"tag":"recvauth","chan":"k","obj":"x"},"cont":{"kind":"nil"}}}}}})");
}

TEST_CASE("json export is schema-valid and byte stable") {
  for (const Process& t : enumerate_terms(7, 3)) {
    json j = to_json(t);
    CHECK(validate_ast(j) == "");
    std::string text = print(t);
    CHECK(to_json(P(text)).dump() == to_json(P(text)).dump());
  }
}

TEST_CASE("round trip on the exhaustive corpus") {
  for (const Process& t : enumerate_terms(8, 3)) {
    std::string text = print(t);
    auto r = parse(text);
    REQUIRE(std::holds_alternative<Process>(r));
    CHECK(alpha_eq(std::get<Process>(r), t));
  }
}

TEST_CASE("round trip on generated processes") {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    GenConfig c;
    c.seed = seed;
    c.max_prefixes = 12;
    Process p = generate(c);
    CHECK(alpha_eq(P(print(p)), p));
  }
}

TEST_CASE("printing is a fixed point after one round trip") {
  for (const Process& t : enumerate_terms(7, 3)) {
    std::string once = print(t);
    CHECK(print(P(once)) == once);
  }
}
