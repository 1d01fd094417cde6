#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "authpi/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  Outcome o;
  o.code = authpi::cli::run(args, in, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string slurp(const fs::path& path) {
  std::ifstream f(path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

const fs::path corpus_dir = AUTHPI_CORPUS_DIR;

}  // namespace

TEST_CASE("check reports well-typedness") {
  Outcome o = run_cli({"check", "-"}, "[a](a?[b].0 | [b]a![b].0)");
  CHECK(o.code == 0);
  CHECK(o.out == "well-typed\n");

  Outcome needs = run_cli({"check", "-"}, "a!b.0 | c![d].0");
  CHECK(needs.code == 1);
  CHECK(needs.out == "requires authorizations: {a, c, d}\n");

  Outcome bad = run_cli({"check", "-"}, "a?x.x!x.0 | a![b].b!b.0");
  CHECK(bad.code == 1);
  CHECK(bad.out.rfind("type error (trecv) at 1:1:", 0) == 0);
  CHECK(std::count(bad.out.begin(), bad.out.end(), '\n') == 1);

  Outcome all = run_cli({"check", "-", "--all"}, "a?x.x!x.0 | a![b].b!b.0");
  CHECK(std::count(all.out.begin(), all.out.end(), '\n') == 2);
  CHECK(all.out.find("(tdeleg)") != std::string::npos);
}

TEST_CASE("errors lists violations") {
  Outcome o = run_cli({"errors", "-"}, "a!b.0");
  CHECK(o.code == 1);
  CHECK(o.out == "error[clause 1] at a!b: name a not authorized\n");
  Outcome clean = run_cli({"errors", "-"}, "[a]a!b.0");
  CHECK(clean.code == 0);
  CHECK(clean.out == "no errors\n");
}

TEST_CASE("explore summarises the graph") {
  Outcome o = run_cli({"explore", "-"}, "[a][b](b?x.x!b.0 | b!a.0 | a?y.0)");
  CHECK(o.code == 0);
  CHECK(o.out.find("states: 3\n") != std::string::npos);
  CHECK(o.out.find("terminal states: 1\n  0\n") != std::string::npos);
  CHECK(o.out.find("errors found: 0\n") != std::string::npos);

  Outcome capped = run_cli({"explore", "-", "--max-states", "2"}, "[a](a!a.0 | a?x.0 | a!b.0 | a?y.0)");
  CHECK(capped.out.find("states: 2\n") != std::string::npos);
  CHECK(capped.out.find("truncated: yes") != std::string::npos);

  Outcome j = run_cli({"explore", "-", "--format", "json"}, "[a](a?[b].0 | [b]a![b].0)");
  auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["states"].size() == 2);
  CHECK(doc["terminal"] == nlohmann::json::array({1}));
  CHECK(doc["edges"][0]["redex"]["text"] == "auth a delegating b");
}

TEST_CASE("parse emits the AST document") {
  Outcome o = run_cli({"parse", "-"}, "[a]0");
  CHECK(o.code == 0);
  CHECK(nlohmann::ordered_json::parse(o.out).dump() == R"({"kind":"auth","name":"a","body":{"kind":"nil"}})");
}

TEST_CASE("fmt and canon") {
  CHECK(run_cli({"fmt", "-"}, "[a] ( a!b.0|0 )").out == "[a](a!b.0 | 0)\n");
  CHECK(run_cli({"canon", "-"}, "[b][a]a!c.0 | 0").out == "[a][b]a!c.0\n");
  auto doc = nlohmann::json::parse(run_cli({"canon", "-", "--format", "json"}, "[a]0").out);
  CHECK(doc["canonical"] == "0");
}

TEST_CASE("step follows the choices read from input") {
  Outcome o = run_cli({"step", "-"}, "[a](a!b.0 | a?x.[x]x!x.0 | a?y.0)\n2\n");
  CHECK(o.code == 0);
  CHECK(o.out.find("[1] comm a carrying b") != std::string::npos);
  CHECK(o.out.find("[2] comm a carrying b") != std::string::npos);
  CHECK(o.out.find("no redexes") != std::string::npos);

  Outcome retry = run_cli({"step", "-"}, "[a](a?[b].0 | [b]a![b].0)\nzero\n5\n1\n");
  CHECK(retry.err.find("invalid choice `zero`") != std::string::npos);
  CHECK(retry.err.find("invalid choice `5`") != std::string::npos);
  CHECK(retry.out.find("auth a delegating b") != std::string::npos);
  CHECK(retry.out.find("no redexes") != std::string::npos);

  Outcome eof = run_cli({"step", "-"}, "[a](a?[b].0 | [b]a![b].0)\n");
  CHECK(eof.code == 0);
  CHECK(eof.out.find("end of input") != std::string::npos);
}

TEST_CASE("run is reproducible for a seed") {
  std::string src = "[a](a!b.0 | a!c.0 | a?x.[x]x!x.0 | a?y.[y]y!y.0 | [b]b?z.0 | [c]c?z.0)";
  Outcome a = run_cli({"run", "-", "--seed", "11"}, src);
  Outcome b = run_cli({"run", "-", "--seed", "11"}, src);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("terminal: ") != std::string::npos);
  bool differs = false;
  for (int seed = 0; seed < 20 && !differs; ++seed)
    differs = run_cli({"run", "-", "--seed", std::to_string(seed)}, src).out != a.out;
  CHECK(differs);

  Outcome limited = run_cli({"run", "-", "--seed", "1", "--max-steps", "1"}, src);
  CHECK(limited.out.find("stopped after 1 steps") != std::string::npos);

  auto doc = nlohmann::json::parse(run_cli({"run", "-", "--seed", "11", "--format", "json"}, src).out);
  CHECK(doc["seed"] == 11);
  CHECK(doc["terminal"] == true);
  CHECK(doc["steps"][0].contains("before"));
  CHECK(doc["steps"][0].contains("after"));
}

TEST_CASE("usage and parse failures exit with 2") {
  CHECK(run_cli({"frobnicate", "-"}).code == 2);
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"check", "-", "--bogus"}).code == 2);
  CHECK(run_cli({"check", "/no/such/file.authpi"}).code == 2);
  CHECK(run_cli({"run", "-"}, "0").code == 2);
  CHECK(run_cli({"suite"}).code == 2);
  CHECK(run_cli({"check", "-", "--format", "xml"}, "0").code == 2);

  Outcome e = run_cli({"fmt", "-"}, "(a!b.0");
  CHECK(e.code == 2);
  CHECK(e.err.find("unclosed '('") != std::string::npos);
  CHECK(e.out.empty());
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("suite runs and reports") {
  Outcome o = run_cli({"suite", "--seed", "5", "--cases", "40", "--max-prefixes", "4", "--no-timing",
                       "--format", "json"});
  auto doc = nlohmann::json::parse(o.out);
  CHECK(doc["cases"] == 40);
  CHECK(doc["properties"].size() == 11);
  CHECK_FALSE(doc["properties"][0].contains("elapsed_ms"));
  CHECK(o.code == (doc["total_violations"] == 0 ? 0 : 1));
  Outcome again = run_cli({"suite", "--seed", "5", "--cases", "40", "--max-prefixes", "4", "--no-timing",
                           "--format", "json"});
  CHECK(o.out == again.out);
}

TEST_CASE("golden outputs for the corpus") {
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(corpus_dir)) {
    if (entry.path().extension() != ".authpi") continue;
    std::string stem = entry.path().stem().string();
    for (const char* command : {"fmt", "canon", "check", "errors", "explore"}) {
      fs::path golden = corpus_dir / "expected" / (stem + "." + command + ".txt");
      REQUIRE_MESSAGE(fs::exists(golden), golden.string());
      Outcome o = run_cli({command, entry.path().string()});
      CHECK_MESSAGE(o.out == slurp(golden), stem << " " << command);
      ++compared;
    }
    // Reading from standard input gives the same result.
    CHECK(run_cli({"canon", "-"}, slurp(entry.path())).out == run_cli({"canon", entry.path().string()}).out);
  }
  CHECK(compared >= 40);
}
