#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "selfnorm/cli.hpp"
#include "selfnorm/errors.hpp"

using namespace selfnorm;

namespace {

const GroupContext& f2() {
  static const GroupContext ctx = GroupContext::parse("a|b");
  return ctx;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("selfnorm_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct Run {
  int status;
  std::string output;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string(SELFNORM_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r{0, {}};
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buffer[4096];
  std::size_t n;
  while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0) r.output.append(buffer, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

}  // namespace

TEST_CASE("parse_element examples") {
  const auto x = parse_element("1/2*e + 1/2*a", f2());
  CHECK(x.size() == 2);
  CHECK(norms(x).l1 == 1);
  CHECK(parse_element("a.a^-1", f2()) == AlgebraElement::monomial(f2(), f2().identity()));
  CHECK(parse_element("2*a + -2*a", f2()).is_zero());
  CHECK(parse_element("0", f2()).is_zero());
  CHECK(parse_element("a - b", f2()) == parse_element("1*a + -1*b", f2()));
  CHECK(parse_element("3 + a^-2", f2()) == parse_element("3*e + 1*a^-2", f2()));
  CHECK(parse_element("-1/2*a.b^-1 - 3/6*a.b^-1", f2()) == parse_element("-1*a.b^-1", f2()));
  const auto ctx = GroupContext::parse("x|b");
  CHECK(serialize(parse_element("1/2*e + 1/2*x + -1*b^3.x.b^-3", ctx)) == "1/2*e + 1/2*x + -1*b^3.x.b^-3");
}

TEST_CASE("parse_element diagnostics carry positions") {
  const auto expect_at = [](const char* text, std::size_t pos) {
    try {
      (void)parse_element(text, f2());
      FAIL("expected parse error for " << text);
    } catch (const ParseError& e) {
      CHECK_MESSAGE(e.position() == pos, text << ": " << e.what());
    }
  };
  expect_at("", 0);
  expect_at("a + c", 4);
  expect_at("1/0*a", 2);
  expect_at("a b", 2);
  expect_at("a + ", 4);
  expect_at("2*a^0", 4);
  expect_at("1/2*", 4);
}

TEST_CASE("parse inverts serialize on random canonical elements") {
  const auto ctx = GroupContext::parse("x|y,z|a");
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    std::vector<Term> terms;
    for (unsigned k = 0, n = rng() % 8; k < n; ++k)
      terms.push_back({oracle::to_word(ctx, oracle::random_reduced(rng, 4, rng() % 6)),
                       Rational(static_cast<long>(rng() % 41) - 20, 1 + rng() % 12)});
    const auto x = AlgebraElement::from_terms(ctx, terms);
    CHECK(parse_element(serialize(x), ctx) == x);
    CHECK(serialize(parse_element(serialize(x), ctx)) == serialize(x));
  }
}

TEST_CASE("run config validation") {
  RunConfig c;
  c.validate();
  c.m_max = 3;
  CHECK_THROWS_AS(c.validate(), HypothesisViolation);
  c.m_max = 4;
  c.budget = 0;
  CHECK_THROWS_AS(c.validate(), HypothesisViolation);
  c.budget = 1;
  c.threads = 0;
  CHECK_THROWS_AS(c.validate(), HypothesisViolation);
}

TEST_CASE("cache roundtrip: miss, hit, corruption") {
  const auto dir = temp_dir("cache");
  FileCache cache(dir);
  const auto x = parse_element("a + a^-1 + b + b^-1", f2());
  const auto base = convolve(adjoint(x), x);
  const std::string key = FileCache::key(base, 4);
  int computed = 0;
  const auto compute = [&] {
    ++computed;
    return power(base, 4);
  };
  const auto first = cache_roundtrip(cache, key, f2(), compute);
  CHECK(computed == 1);
  CHECK(cache.misses() == 1);
  const auto second = cache_roundtrip(cache, key, f2(), compute);
  CHECK(computed == 1);
  CHECK(cache.hits() == 1);
  CHECK(serialize(second) == serialize(first));

  {
    std::fstream f(cache.path_for(key), std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-5, std::ios::end);
    f.put('7');
  }
  const auto third = cache_roundtrip(cache, key, f2(), compute);
  CHECK(computed == 2);
  CHECK(cache.corrupt() == 1);
  CHECK(serialize(third) == serialize(first));
  CHECK(cache.fetch(key, f2()).status == FileCache::Status::Hit);

  // Same base and m in another group never shares an entry.
  const auto other = GroupContext::parse("a|b|c");
  CHECK(FileCache::key(parse_element("a", other), 4) != FileCache::key(parse_element("a", f2()), 4));
  std::filesystem::remove_all(dir);
}

TEST_CASE("certify_norm through the cache matches the uncached run") {
  const auto dir = temp_dir("certify");
  FileCache cache(dir);
  const auto x = parse_element("e + a + b^-1", f2());
  CertifyOptions plain;
  plain.m_max = 4;
  CertifyOptions cached = plain;
  cached.store = &cache;
  const auto reference = to_json(certify_norm(x, plain)).dump();
  CHECK(to_json(certify_norm(x, cached)).dump() == reference);
  CHECK(cache.misses() == 2);
  CHECK(to_json(certify_norm(x, cached)).dump() == reference);
  CHECK(cache.hits() == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("run_command examples") {
  RunConfig config;
  config.group = "a|b";
  config.m_max = 4;
  const auto norm = run_command("norm", "", {{"element", "1*a + 1*a^-1 + 1*b + 1*b^-1"}}, config);
  const auto& cert = norm.outputs["certificate"];
  CHECK(cert["steps"].size() == 3);
  CHECK(cert["steps"][0]["c"]["num"] == "28");
  CHECK(cert["best_lower"]["rounding"] == "down");
  CHECK(norm.to_json()["body_hash"] == norm.body_hash());

  config.group = "x|y|a";
  const auto inj = run_command("selfless", "injectivity", {{"g", "x"}, {"n", "3"}, {"radius", "3"}}, config);
  CHECK(inj.outputs["injective"] == true);
  CHECK(inj.outputs["collision_count"] == 0);

  const auto cascade =
      run_command("tree", "cascade", {{"lambda", "1"}, {"glen", "1"}, {"provider", "trivial"}}, RunConfig{});
  CHECK(cascade.outputs["C"]["num"] == "3");
  const auto def = run_command("tree", "cascade", {{"lambda", "1"}, {"glen", "1"}, {"provider", "default"}}, RunConfig{});
  CHECK(def.outputs["C"]["num"] == "5");

  config.group = "a|b";
  const auto ball = run_command("ball", "", {{"radius", "2"}, {"list", "true"}}, config);
  CHECK(ball.outputs["size"] == 17);
  CHECK(ball.outputs["words"][0] == "e");
}

TEST_CASE("reports are byte-identical across thread counts") {
  std::string reference;
  for (unsigned threads : {1u, 4u, 8u}) {
    RunConfig config;
    config.group = "a|b";
    config.threads = threads;
    const auto r = run_command("norm", "", {{"element", "e + a + b + a^-1.b"}}, config);
    if (reference.empty()) reference = r.to_json().dump();
    CHECK(r.to_json().dump() == reference);
  }
}

TEST_CASE("csv output flattens the report") {
  RunConfig config;
  config.group = "a|b";
  const auto r = run_command("tree", "length", {{"g", "a.b.a^-1"}}, config);
  const auto csv = r.to_csv();
  CHECK(csv.rfind("path,value\n", 0) == 0);
  CHECK(csv.find("outputs.translation_length,1\n") != std::string::npos);
  CHECK(csv.find("outputs.core,b\n") != std::string::npos);
}

TEST_CASE("command line tool: outputs and exit codes") {
  auto ok = run_cli("norm --group \"a|b\" --element \"1*a + 1*a^-1 + 1*b + 1*b^-1\" --m-max 4");
  CHECK(ok.status == 0);
  const auto j = Json::parse(ok.output);
  CHECK(j["command"] == "norm");
  CHECK(j["schema_version"] == 1);

  ok = run_cli("selfless --group \"x|y|a\" --g x --n 3 --check-injectivity --radius 3");
  CHECK(ok.status == 0);
  CHECK(Json::parse(ok.output)["outputs"]["injective"] == true);

  ok = run_cli("tree cascade --lambda 1 --glen 1 --provider trivial --format csv");
  CHECK(ok.status == 0);
  CHECK(ok.output.find("outputs.C.num,3") != std::string::npos);

  auto bad = run_cli("norm --group \"a|b\" --element \"a + q\"");
  CHECK(bad.status == 4);
  CHECK(Json::parse(bad.output)["error"]["kind"] == "parse_error");
  CHECK(Json::parse(bad.output)["error"]["position"] == 4);

  bad = run_cli("selfless product --group \"x|y|a\" --g x --n 1 --s \"x;x\" --p 0");
  CHECK(bad.status == 2);

  bad = run_cli("ball --group \"a|b\" --radius 20 --budget 1000");
  CHECK(bad.status == 3);
  CHECK(Json::parse(bad.output)["error"]["kind"] == "budget_exceeded");

  bad = run_cli("norm --group \"a|b\" --element a --m-max 3");
  CHECK(bad.status == 2);

  bad = run_cli("frobnicate");
  CHECK(bad.status == 4);
}

TEST_CASE("cache directory from the environment") {
  const auto dir = temp_dir("env");
  const auto run = run_cli("norm --group \"a|b\" --element \"e + a\" --m-max 4 --timing --cache-dir " + dir.string());
  CHECK(run.status == 0);
  const auto j = Json::parse(run.output);
  CHECK(j["timing"]["cache"]["misses"] == 2);
  const auto again = Json::parse(
      run_cli("norm --group \"a|b\" --element \"e + a\" --m-max 4 --timing --cache-dir " + dir.string()).output);
  CHECK(again["timing"]["cache"]["hits"] == 2);
  CHECK(again["body_hash"] == j["body_hash"]);
  ::setenv("SELFNORM_CACHE_DIR", dir.string().c_str(), 1);
  const auto env = Json::parse(run_cli("norm --group \"a|b\" --element \"e + a\" --m-max 4 --timing").output);
  ::unsetenv("SELFNORM_CACHE_DIR");
  CHECK(env["timing"]["cache"]["hits"] == 2);
  std::filesystem::remove_all(dir);
}
