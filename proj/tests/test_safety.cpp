#include <doctest.h>

#include "authpi/congruence.hpp"
#include "authpi/dynamics.hpp"
#include "authpi/harness.hpp"
#include "authpi/safety.hpp"
#include "support.hpp"

using namespace authpi;
using test_support::N;
using test_support::P;

TEST_CASE("context authorization") {
  CHECK_FALSE(context_authorizes({}, N("a")));
  CHECK(context_authorizes({Frame::auth(N("a"))}, N("a")));
  CHECK_FALSE(context_authorizes({Frame::auth(N("b")), Frame::restriction(N("c")), Frame::par_branch()}, N("a")));
  CHECK(context_authorizes({Frame::par_branch(), Frame::auth(N("a")), Frame::par_branch()}, N("a")));
}

TEST_CASE("active prefixes stop at the first prefix") {
  auto ap = active_prefixes(P("[a](a!b.c!d.0 | new k.k?x.0)"));
  REQUIRE(ap.size() == 2);
  CHECK(ap[0].action == Action::output(N("a"), N("b")));
  REQUIRE(ap[0].path.size() == 2);
  CHECK(ap[0].path[0].kind == FrameKind::auth);
  CHECK(ap[0].path[1].kind == FrameKind::par_branch);
  CHECK(ap[1].path.back().kind == FrameKind::restriction);
}

TEST_CASE("error examples") {
  ErrorReport plain = is_error(P("a!b.0"));
  REQUIRE(plain.violations.size() == 1);
  CHECK(plain.violations[0].clause == 1);
  CHECK(plain.violations[0].offending == N("a"));
  CHECK(plain.violations[0].render() == "error[clause 1] at a!b: name a not authorized");

  ErrorReport deleg = is_error(P("[a]a![b].0"));
  REQUIRE(deleg.violations.size() == 1);
  CHECK(deleg.violations[0].clause == 2);
  CHECK(deleg.violations[0].offending == N("b"));

  CHECK_FALSE(is_error(P("[a][b]a![b].0")).is_error());
  CHECK_FALSE(is_error(P("[b][a]b?x.x!c.0")).is_error());
  // Only active prefixes count.
  CHECK_FALSE(is_error(P("[a]a!b.c!d.0")).is_error());
  // Presence is boolean here, although delegating the channel needs two copies.
  CHECK_FALSE(is_error(P("[a]a![a].0")).is_error());
}

TEST_CASE("a restriction does not pick up an outer scope of the same text") {
  CHECK(is_error(P("[a]new a.a!b.0")).is_error());
  CHECK_FALSE(is_error(P("new a.[a]a!b.0")).is_error());
}

TEST_CASE("error verdicts are constant across congruence classes") {
  for (const Process& t : enumerate_terms(7, 3)) {
    bool expected = is_error(t).is_error();
    CHECK(presentation_errors(canonicalize(t)).is_error() == expected);
    for (const Process& q : enumerate_congruent(t, 1000).members)
      CHECK_MESSAGE(presentation_errors(q).is_error() == expected, print(t) << " ~ " << print(q));
  }
}

TEST_CASE("unauthorized prefixes never synchronise") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    GenConfig c;
    c.seed = seed;
    c.max_prefixes = 10;
    CHECK(check_error_dynamics(generate(c)).ok());
  }
}

TEST_CASE("name passing keeps the example authorization safe") {
  Process p = P("[b][a]b?x.x!c.0 | [b]b!a.0");
  CHECK_FALSE(is_error(p).is_error());
  Process q = step(p, redexes(p).at(0));
  CHECK_FALSE(is_error(q).is_error());
}
