#include <random>
#include <unordered_set>

#include "doctest.h"
#include "oracles.hpp"
#include "selfnorm/errors.hpp"
#include "selfnorm/words.hpp"

using namespace selfnorm;

namespace {

const GroupContext& f2() {
  static const GroupContext ctx = GroupContext::parse("a|b");
  return ctx;
}

Word w(const GroupContext& ctx, const char* text) { return ctx.parse_word(text); }

}  // namespace

TEST_CASE("group spec parsing") {
  const auto ctx = GroupContext::parse("x|y|a");
  CHECK(ctx.rank() == 3);
  CHECK(ctx.factor_count() == 3);
  CHECK(ctx.spec() == "x|y|a");
  const auto multi = GroupContext::parse("a,b|c");
  CHECK(multi.factor_count() == 2);
  CHECK(multi.factor_of(1) == 0);
  CHECK(multi.factor_of(2) == 1);
  CHECK_THROWS_AS(GroupContext::parse("a|a"), ParseError);
  CHECK_THROWS_AS(GroupContext::parse("a||b"), ParseError);
  CHECK_THROWS_AS(GroupContext::parse("e|b"), ParseError);
  CHECK_THROWS_AS(GroupContext::parse(""), ParseError);
  CHECK(GroupContext::parse("a|b") == f2());
  CHECK_FALSE(GroupContext::parse("b|a") == f2());
}

TEST_CASE("word grammar round trip and errors") {
  const auto ctx = GroupContext::parse("x|b");
  CHECK(ctx.format(w(ctx, "b^3.x.b^-3")) == "b^3.x.b^-3");
  CHECK(ctx.format(w(ctx, "e")) == "e");
  CHECK(ctx.format(w(ctx, "b.b.b^-1")) == "b");
  CHECK(w(ctx, "x.e.x") == w(ctx, "x^2"));
  CHECK_THROWS_AS(ctx.parse_word("q"), ParseError);
  CHECK_THROWS_AS(ctx.parse_word("x^0"), ParseError);
  CHECK_THROWS_AS(ctx.parse_word("x..b"), ParseError);
  CHECK_THROWS_AS(ctx.parse_word(""), ParseError);
  try {
    ctx.parse_word("x.b.zz");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
}

TEST_CASE("multiply examples") {
  const auto& ctx = f2();
  CHECK(multiply(w(ctx, "a"), w(ctx, "a^-1")).is_identity());
  CHECK(multiply(w(ctx, "a.b"), w(ctx, "b^-1.a")) == w(ctx, "a^2"));
  const auto xb = GroupContext::parse("x|b");
  const Word c = w(xb, "b^3.x.b^-3");
  CHECK(multiply(c, c) == w(xb, "b^3.x^2.b^-3"));
}

TEST_CASE("multiply rejects mixed contexts") {
  const auto other = GroupContext::parse("a|c");
  CHECK_THROWS_AS(multiply(w(f2(), "a"), w(other, "c")), ContextMismatch);
  // The identity default-constructed word is compatible with everything.
  CHECK(multiply(Word{}, w(other, "c")) == w(other, "c"));
}

TEST_CASE("invert examples") {
  const auto& ctx = f2();
  CHECK(invert(w(ctx, "e")).is_identity());
  CHECK(invert(w(ctx, "a.b^-2")) == w(ctx, "b^2.a^-1"));
  CHECK(invert(w(ctx, "b^2.a.b^-2")) == w(ctx, "b^2.a^-1.b^-2"));
}

TEST_CASE("word length examples") {
  const auto& ctx = f2();
  CHECK(word_length(w(ctx, "e")) == 0);
  for (int n = 0; n <= 6; ++n) {
    const Word g = multiply(multiply(ctx.generator("b", n ? n : 1), ctx.generator("a")), ctx.generator("b", n ? -n : -1));
    CHECK(word_length(g) == static_cast<std::size_t>(2 * (n ? n : 1) + 1));
  }
  CHECK(word_length(w(GroupContext::parse("x|b"), "b^3.x.b^-3")) == 7);
}

TEST_CASE("ball enumeration examples and closed form") {
  CHECK(enumerate_ball(f2(), 1).size() == 5);
  CHECK(enumerate_ball(f2(), 2).size() == 17);
  CHECK(enumerate_ball(GroupContext::parse("x|y|a"), 1).size() == 7);
  const auto ball1 = enumerate_ball(f2(), 1);
  CHECK(f2().format(ball1[0]) == "e");
  CHECK(f2().format(ball1[1]) == "a");
  CHECK(f2().format(ball1[2]) == "a^-1");
  CHECK(f2().format(ball1[3]) == "b");
  for (std::size_t k : {1u, 2u, 3u}) {
    std::vector<std::vector<std::string>> factors;
    for (std::size_t i = 0; i < k; ++i) factors.push_back({"g" + std::to_string(i)});
    const GroupContext ctx(factors);
    for (unsigned r = 0; r <= (k == 3 ? 6u : 8u); ++r) {
      const auto ball = enumerate_ball(ctx, r);
      CHECK(ball.size() == ball_size(k, r));
      CHECK(ball.size() == oracle::ball(static_cast<unsigned>(k), r).size());
      for (std::size_t i = 1; i < ball.size(); ++i) CHECK(shortlex_less(ball[i - 1], ball[i]));
    }
  }
  CHECK(ball_size(2, 3) == 1 + 2 * (27 - 1));
  CHECK_THROWS_AS(enumerate_ball(f2(), 12, 1000), BudgetExceeded);
}

TEST_CASE("cyclic reduction examples") {
  const auto& ctx = f2();
  auto d = cyclic_reduce(w(ctx, "a.b.a^-1"));
  CHECK(d.core == w(ctx, "b"));
  CHECK(d.conjugator == w(ctx, "a"));
  d = cyclic_reduce(w(ctx, "a.b"));
  CHECK(d.core == w(ctx, "a.b"));
  CHECK(d.conjugator.is_identity());
  for (int n = 1; n <= 5; ++n) {
    d = cyclic_reduce(multiply(multiply(ctx.generator("b", n), ctx.generator("a")), ctx.generator("b", -n)));
    CHECK(d.core == w(ctx, "a"));
    CHECK(d.conjugator == ctx.generator("b", n));
  }
}

TEST_CASE("primitive root examples") {
  const auto& ctx = f2();
  auto r = primitive_root(w(ctx, "a^3"));
  CHECK(r.root == w(ctx, "a"));
  CHECK(r.exponent == 3);
  r = primitive_root(w(ctx, "a.b"));
  CHECK(r.root == w(ctx, "a.b"));
  CHECK(r.exponent == 1);
  r = primitive_root(w(ctx, "b.a^2.b^-1"));
  CHECK(r.root == w(ctx, "b.a.b^-1"));
  CHECK(r.exponent == 2);
  r = primitive_root(w(ctx, "a.b.a.b.a.b"));
  CHECK(r.root == w(ctx, "a.b"));
  CHECK(r.exponent == 3);
  CHECK_THROWS_AS(primitive_root(w(ctx, "e")), HypothesisViolation);
}

TEST_CASE("round trip exhaustive on B(3), randomized on B(6)") {
  const auto& ctx = f2();
  const auto ball = enumerate_ball(ctx, 3);
  for (const auto& u : ball)
    for (const auto& v : ball) {
      const Word uv = multiply(u, v);
      CHECK(multiply(uv, invert(v)) == u);
      CHECK(uv.length() <= u.length() + v.length());
      const bool cancels = !u.is_identity() && !v.is_identity() && u.last_letter() == -v.first_letter();
      CHECK((uv.length() == u.length() + v.length()) == !cancels);
    }
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const Word u = oracle::to_word(ctx, oracle::random_reduced(rng, 2, rng() % 7));
    const Word v = oracle::to_word(ctx, oracle::random_reduced(rng, 2, rng() % 7));
    CHECK(multiply(multiply(u, v), invert(v)) == u);
    CHECK(multiply(u, v).letters() == oracle::concat(u.letters(), v.letters()));
  }
}

TEST_CASE("associativity and identity on random triples") {
  const auto& ctx = f2();
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const Word u = oracle::to_word(ctx, oracle::random_reduced(rng, 2, rng() % 6));
    const Word v = oracle::to_word(ctx, oracle::random_reduced(rng, 2, rng() % 6));
    const Word t = oracle::to_word(ctx, oracle::random_reduced(rng, 2, rng() % 6));
    CHECK(multiply(multiply(u, v), t) == multiply(u, multiply(v, t)));
    CHECK(multiply(ctx.identity(), u) == u);
    CHECK(multiply(u, ctx.identity()) == u);
  }
}

TEST_CASE("cyclic decomposition and roots on random words") {
  const auto ctx = GroupContext::parse("a|b|c");
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const Word g = oracle::to_word(ctx, oracle::random_reduced(rng, 3, 1 + rng() % 8));
    const auto [core, u] = cyclic_reduce(g);
    CHECK(multiply(multiply(u, core), invert(u)) == g);
    CHECK((core.is_identity() || core.first_letter() != -core.last_letter()));
    CHECK(core.length() == oracle::brute_translation_length(3, 4, g.letters()));
    const auto root = primitive_root(g);
    CHECK(power(root.root, root.exponent) == g);
    const auto again = primitive_root(root.root);
    CHECK(again.root == root.root);
    CHECK(again.exponent == 1);
    const unsigned k = 2 + rng() % 3;
    const auto pk = primitive_root(power(g, k));
    CHECK(pk.root == root.root);
    CHECK(pk.exponent == root.exponent * static_cast<long>(k));
  }
}

TEST_CASE("hash agrees with equality") {
  const auto& ctx = f2();
  const auto ball = enumerate_ball(ctx, 3);
  std::unordered_set<Word, WordHash> set(ball.begin(), ball.end());
  CHECK(set.size() == ball.size());
  CHECK(w(ctx, "a.b.b^-1").hash() == w(ctx, "a").hash());
}
