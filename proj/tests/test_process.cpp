#include <doctest.h>

#include <map>
#include <set>

#include "authpi/harness.hpp"
#include "authpi/process.hpp"
#include "support.hpp"

using namespace authpi;
using test_support::N;
using test_support::P;

TEST_CASE("global names are interned by text, fresh names never collide") {
  CHECK(Name::global("a") == Name::global("a"));
  CHECK(Name::global("a") != Name::global("b"));
  Name f = Name::fresh("a");
  CHECK(f != Name::global("a"));
  CHECK(f != Name::fresh("a"));
  CHECK(f.text() == "a");
  CHECK(Name::global("a").is_global());
  CHECK_FALSE(f.is_global());
  CHECK_FALSE(Name().valid());
}

TEST_CASE("identifiers") {
  CHECK(is_identifier("a"));
  CHECK(is_identifier("chan_2"));
  CHECK_FALSE(is_identifier(""));
  CHECK_FALSE(is_identifier("2a"));
  CHECK_FALSE(is_identifier("new"));
  CHECK(is_identifier("newer"));
}

TEST_CASE("free names") {
  CHECK(free_names(P("0")).empty());
  CHECK(free_names(P("a!b.0")) == NameSet{N("a"), N("b")});
  CHECK(free_names(P("a?x.x!c.0")) == NameSet{N("a"), N("c")});
  CHECK(free_names(P("new a.a!b.0")) == NameSet{N("b")});
  // Scopes do not bind.
  CHECK(free_names(P("[a]0")) == NameSet{N("a")});
  CHECK(free_names(P("a?[b].0")) == NameSet{N("a"), N("b")});
  CHECK(free_names(P("new a.0 | a!a.0")) == NameSet{N("a")});
}

TEST_CASE("substitution replaces free occurrences only") {
  CHECK(alpha_eq(substitute(P("a!b.0"), N("b"), N("c")), P("a!c.0")));
  CHECK(alpha_eq(substitute(P("[b]b![b].0"), N("b"), N("c")), P("[c]c![c].0")));
  CHECK(alpha_eq(substitute(P("new b.b!b.0 | b!a.0"), N("b"), N("c")), P("new b.b!b.0 | c!a.0")));
  CHECK(alpha_eq(substitute(P("a?b.b!b.0"), N("b"), N("c")), P("a?b.b!b.0")));
}

TEST_CASE("substitution avoids capture") {
  Process p = P("new c.b!c.0");
  Process q = substitute(p, N("b"), N("c"));
  // The bound c must be renamed so the substituted c stays free.
  CHECK(free_names(q) == NameSet{N("c")});
  CHECK_FALSE(alpha_eq(q, P("new c.c!c.0")));
  CHECK(alpha_eq(q, P("new d.c!d.0")));

  Process r = substitute(P("a?x.b!x.0"), N("b"), N("x"));
  CHECK(alpha_eq(r, P("a?y.x!y.0")));
}

TEST_CASE("simultaneous renaming swaps names") {
  Renaming swap{{N("a").uid(), N("b")}, {N("b").uid(), N("a")}};
  CHECK(alpha_eq(rename(P("a!b.[a]0"), swap), P("b!a.[b]0")));
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha_eq(P("new a.a!b.0"), P("new c.c!b.0")));
  CHECK(alpha_eq(P("a?x.x!x.0"), P("a?y.y!y.0")));
  CHECK_FALSE(alpha_eq(P("a?x.x!b.0"), P("a?x.b!x.0")));
  CHECK_FALSE(alpha_eq(P("new a.a!b.0"), P("a!b.0")));
  CHECK_FALSE(alpha_eq(P("0 | a!b.0"), P("a!b.0 | 0")));
  // Scopes are not binders.
  CHECK_FALSE(alpha_eq(P("[a]a!b.0"), P("[c]c!b.0")));
  CHECK(alpha_key(P("new a.a!b.0")) == alpha_key(P("new z.z!b.0")));
}

TEST_CASE("node and prefix counts") {
  CHECK(node_count(P("0")) == 1);
  CHECK(node_count(P("0 | 0")) == 3);
  CHECK(node_count(P("[a]0")) == 3);
  CHECK(node_count(P("new a.0")) == 3);
  CHECK(node_count(P("a!b.0")) == 4);
  CHECK(node_count(P("[a](a?[b].0 | [b]a![b].0)")) == 13);
  CHECK(prefix_count(P("[a](a?[b].0 | [b]a![b].0)")) == 2);
  CHECK(prefix_count(P("new a.[a]0")) == 0);
}

TEST_CASE("source spans do not affect structure") {
  Process a = P("a!b.0");
  Process b = P("   a!b.0");
  REQUIRE(a.span());
  REQUIRE(b.span());
  CHECK(a.span()->column != b.span()->column);
  CHECK(alpha_eq(a, b));
}

namespace {

// Number of terms with exactly n nodes when `bound` binders are in scope,
// following the grammar clause by clause.
std::size_t count_terms(std::size_t n, std::size_t bound, std::size_t pool,
                        std::map<std::pair<std::size_t, std::size_t>, std::size_t>& memo) {
  auto key = std::make_pair(n, bound);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::size_t names = pool + bound;
  std::size_t total = n == 1 ? 1 : 0;
  for (std::size_t l = 1; l + 2 <= n; ++l)
    total += count_terms(l, bound, pool, memo) * count_terms(n - 1 - l, bound, pool, memo);
  if (n >= 3) total += count_terms(n - 2, bound + 1, pool, memo) + names * count_terms(n - 2, bound, pool, memo);
  if (n >= 4)
    total += 3 * names * names * count_terms(n - 3, bound, pool, memo) +
             names * count_terms(n - 3, bound + 1, pool, memo);
  memo[key] = total;
  return total;
}

}  // namespace

TEST_CASE("exhaustive enumeration matches the grammar count and is alpha-distinct") {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::size_t expected = 0;
  for (std::size_t n = 1; n <= 6; ++n) expected += count_terms(n, 0, 3, memo);
  auto terms = enumerate_terms(6, 3);
  CHECK(terms.size() == expected);
  CHECK(terms.size() == 422);

  std::set<std::string> keys;
  for (const Process& t : terms) {
    CHECK(node_count(t) <= 6);
    keys.insert(alpha_key(t));
  }
  CHECK(keys.size() == terms.size());
}

TEST_CASE("alpha_key agrees with alpha_eq on the small corpus") {
  auto terms = enumerate_terms(5, 2);
  // Pair every term with a copy whose binders are renamed.
  for (const Process& t : terms) {
    Process copy = rename(t, {});
    CHECK(alpha_eq(t, copy));
  }
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = 0; j < terms.size(); ++j)
      CHECK((alpha_key(terms[i]) == alpha_key(terms[j])) == alpha_eq(terms[i], terms[j]));
}

TEST_CASE("substitution of a fresh name is invertible") {
  Name z = Name::global("zz");
  for (const Process& t : enumerate_terms(6, 3)) {
    for (const Name& b : free_names(t)) {
      Process there = substitute(t, b, z);
      CHECK_FALSE(free_names(there).count(b));
      CHECK(alpha_eq(substitute(there, z, b), t));
    }
  }
}
