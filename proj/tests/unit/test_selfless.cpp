#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "selfnorm/cli.hpp"
#include "selfnorm/errors.hpp"
#include "selfnorm/selfless.hpp"

using namespace selfnorm;

namespace {

const GroupContext& xya() {
  static const GroupContext ctx = GroupContext::parse("x|y|a");
  return ctx;
}

Word w(const char* text) { return xya().parse_word(text); }
AlgebraElement el(const char* text) { return parse_element(text, xya()); }

Retraction ret(unsigned n, const char* g = "x") { return build_retraction(xya(), w(g), n); }

}  // namespace

TEST_CASE("build_retraction examples") {
  CHECK(ret(1).image_of_a == w("y^3.x.y^-3"));
  CHECK(ret(0).image_of_a == w("y.x.y^-1"));
  CHECK(ret(1, "x^2").image_of_a == w("y^3.x^2.y^-3"));
  CHECK(ret(1, "x^2").image_of_a.length() == 8);
  for (unsigned n = 0; n < 6; ++n) CHECK(ret(n).image_of_a.length() == 2 * (2 * n + 1) + 1);
  CHECK(ret(2).h_n == w("y^5"));
  CHECK(*ret(2).h_factor == 1);
  CHECK_THROWS_AS(build_retraction(xya(), w("e"), 1), HypothesisViolation);
  CHECK_THROWS_AS(build_retraction(xya(), w("x.y"), 1), HypothesisViolation);
  CHECK_THROWS_AS(build_retraction(xya(), w("a"), 1), HypothesisViolation);
}

TEST_CASE("retraction spec strings") {
  const auto spec = parse_retraction_spec(xya(), "g=x^2;H=y;n=3");
  CHECK(spec.g == w("x^2"));
  CHECK(spec.n == 3);
  CHECK(*spec.layout.h_factor == 1);
  const auto swapped = parse_retraction_spec(xya(), "g=y;H=x");
  CHECK(RetractionFamily{xya(), swapped.g, swapped.layout}.at(1).image_of_a == w("x^3.y.x^-3"));
  CHECK_THROWS_AS(parse_retraction_spec(xya(), "g=x;H=7"), ParseError);
  CHECK_THROWS_AS(parse_retraction_spec(xya(), "g=x;bogus=1"), ParseError);
}

TEST_CASE("apply examples") {
  const auto r = ret(1);
  for (const auto& v : enumerate_ball(GroupContext::parse("x|y"), 4)) {
    // Same letters in the larger context.
    const Word u = Word::from_letters(xya().fingerprint(), v.letters());
    CHECK(apply(r, u) == u);
  }
  CHECK(apply(r, w("a^2")) == w("y^3.x^2.y^-3"));
  const auto image = apply(r, el("1/2*x + 1/2*a"));
  CHECK(image == el("1/2*x + 1/2*y^3.x.y^-3"));
  CHECK(norms(image).l1 == 1);
}

TEST_CASE("homomorphism law exhaustive on B(3) x B(3)") {
  const auto r = ret(2);
  const auto ball = enumerate_ball(xya(), 3);
  for (const auto& u : ball)
    for (const auto& v : ball) CHECK(apply(r, multiply(u, v)) == multiply(apply(r, u), apply(r, v)));
}

TEST_CASE("l1 contraction and l2 preservation on injective balls") {
  std::mt19937_64 rng(17);
  const auto r = ret(1);
  const auto collapse = custom_retraction(xya(), 2, w("x"));
  for (int i = 0; i < 40; ++i) {
    std::vector<Term> terms;
    for (int k = 0; k < 6; ++k)
      terms.push_back({oracle::to_word(xya(), oracle::random_reduced(rng, 3, rng() % 2)),
                       Rational(static_cast<long>(rng() % 9) - 4, 1 + rng() % 3)});
    const auto x = AlgebraElement::from_terms(xya(), terms);
    CHECK(norms(apply(r, x)).l1 == norms(x).l1);
    CHECK(norms(apply(r, x)).l2_squared == norms(x).l2_squared);
    CHECK(norms(apply(collapse, x)).l1 <= norms(x).l1);
  }
}

TEST_CASE("injectivity examples") {
  const auto two = check_injectivity(ret(2), 2);
  CHECK(two.injective());
  CHECK(two.collision_count == 0);
  const auto four = check_injectivity(ret(4), 4);
  CHECK(four.injective());
  CHECK(four.ball_size == 937);
  CHECK(four.max_fiber == 1);

  const auto degenerate = custom_retraction(xya(), 2, w("x"));
  const auto rep = check_injectivity(degenerate, 1);
  CHECK_FALSE(rep.injective());
  REQUIRE_FALSE(rep.collisions.empty());
  CHECK(rep.collisions[0].first == w("x"));
  CHECK(rep.collisions[0].second == w("a"));
  CHECK(rep.collision_count == 2);  // x ~ a and x^-1 ~ a^-1
}

TEST_CASE("injectivity on B(n) for n <= radius") {
  for (unsigned radius = 1; radius <= 4; ++radius)
    for (unsigned n = radius; n <= radius + 1; ++n) CHECK(check_injectivity(ret(n), radius).injective());
  // Small n with a larger radius does collide: a.y^-3... and its image coincide.
  CHECK_FALSE(check_injectivity(ret(0), 3).injective());
}

TEST_CASE("injectivity scan agrees with a naive pairwise oracle") {
  const auto r = ret(0);
  const auto ball = enumerate_ball(xya(), 3);
  std::map<oracle::Letters, std::uint64_t> fibers;
  for (const auto& v : ball) {
    oracle::Letters image;
    for (Letter l : v.letters()) {
      const auto piece = generator_of(l) == 2 ? (l > 0 ? r.image_of_a.letters() : invert(r.image_of_a).letters())
                                              : oracle::Letters{l};
      image = oracle::concat(image, piece);
    }
    ++fibers[image];
  }
  std::uint64_t collisions = 0, max_fiber = 0;
  for (const auto& [img, count] : fibers) {
    collisions += count - 1;
    max_fiber = std::max(max_fiber, count);
  }
  ScanOptions threaded;
  threaded.threads = 4;
  const auto rep = check_injectivity(r, 3, threaded);
  CHECK(rep.collision_count == collisions);
  CHECK(rep.max_fiber == max_fiber);
  const auto st = fiber_statistics(r, 3);
  CHECK(st.image_count == fibers.size());
  CHECK(st.max_fiber == max_fiber);
}

TEST_CASE("fiber statistics examples") {
  CHECK(fiber_statistics(ret(2), 2).max_fiber == 1);
  CHECK(fiber_statistics(custom_retraction(xya(), 2, w("x")), 1).max_fiber == 2);
  const auto collapse = fiber_statistics(custom_retraction(xya(), 2, w("e")), 1);
  CHECK(collapse.max_fiber == 3);
  REQUIRE(collapse.largest_fiber_image);
  CHECK(collapse.largest_fiber_image->is_identity());
  std::uint64_t total = 0;
  for (const auto& [size, count] : collapse.histogram) total += size * count;
  CHECK(total == collapse.ball_size);
}

TEST_CASE("growth profile examples") {
  const RetractionFamily family{xya(), w("x"), {}};
  const auto profile = growth_profile(family, 6);
  REQUIRE(profile.points.size() == 6);
  CHECK(profile.points[0].f == 7);
  CHECK(profile.nondecreasing);
  CHECK(profile.within_envelope);
  CHECK(profile.root_strictly_decreasing);
  for (const auto& p : profile.points) {
    CHECK(p.envelope == p.n * (4 * p.n + 3));
    CHECK(p.f == max_image_length(family.at(p.n), p.n));
  }
}

TEST_CASE("max image length agrees with enumeration") {
  const auto r = ret(2, "x^2");
  std::uint64_t best = 0;
  for (const auto& v : enumerate_ball(xya(), 3)) best = std::max<std::uint64_t>(best, apply(r, v).length());
  ScanOptions threaded;
  threaded.threads = 3;
  CHECK(max_image_length(r, 3) == best);
  CHECK(max_image_length(r, 3, threaded) == best);
}

TEST_CASE("product nontriviality examples") {
  const auto r = ret(1);
  auto p = product_nontriviality({w("e"), w("e")}, {2}, r);
  CHECK(p.product == w("y^3.x^2.y^-3"));
  CHECK(p.nontrivial);
  p = product_nontriviality({w("x"), w("x^-1")}, {1}, r);
  CHECK(p.product == w("x.y^3.x.y^-3.x^-1"));
  CHECK(p.nontrivial);
  CHECK_THROWS_AS(product_nontriviality({w("x"), w("x")}, {0}, r), HypothesisViolation);
  CHECK_THROWS_AS(product_nontriviality({w("x"), w("e"), w("x")}, {1, 1}, r), HypothesisViolation);
  CHECK_THROWS_AS(product_nontriviality({w("x^3"), w("x")}, {1}, r), HypothesisViolation);
  CHECK_THROWS_AS(product_nontriviality({w("a"), w("x")}, {1}, r), HypothesisViolation);
  CHECK_THROWS_AS(product_nontriviality({w("x")}, {1}, r), HypothesisViolation);
}

TEST_CASE("product nontriviality exhaustive for short products") {
  const auto r = ret(1);
  std::vector<Word> small;
  for (const auto& v : enumerate_ball(GroupContext::parse("x|y"), 2))
    small.push_back(Word::from_letters(xya().fingerprint(), v.letters()));
  for (const auto& s1 : small)
    for (const auto& s2 : small)
      for (const auto& s3 : small) {
        if (s2.is_identity()) continue;
        for (long p1 : {-2L, 1L})
          for (long p2 : {-1L, 3L}) {
            const auto res = product_nontriviality({s1, s2, s3}, {p1, p2}, r);
            CHECK(res.nontrivial);
            CHECK(res.regrouping_alternates);
          }
      }
}

TEST_CASE("transfer examples") {
  const RetractionFamily family{xya(), w("x"), {}};
  const auto rep = transfer_experiment(el("1/2*x + 1/2*a"), family, Rational(1, 2), {{1, 2}});
  REQUIRE(rep.points.size() == 1);
  CHECK(rep.points[0].l2_equal);
  CHECK(rep.points[0].injective_on_ball);
  CHECK(rep.points[0].chain_identity);

  const auto trivial = transfer_experiment(el("1/2*x + 1/2*y"), family, Rational(1, 2), {{1, std::nullopt}});
  CHECK(trivial.points[0].c_source == trivial.points[0].c_image);

  const auto trend = transfer_experiment(el("1/3*e + 1/3*x + 1/3*a"), family, Rational(1, 10), {{1}, {2}, {4}});
  CHECK(trend.factor_strictly_decreasing);
  for (const auto& p : trend.points) {
    CHECK(p.l2_equal);
    CHECK(p.chain_identity);
    CHECK(p.n == 2 * p.m);
    CHECK(p.factor_radicand == rapid_decay_sum_of_squares(static_cast<unsigned>(p.f)));
  }

  CHECK_THROWS_AS(transfer_experiment(el("x + a"), family, 1, {{1}}), HypothesisViolation);
  CHECK_THROWS_AS(transfer_experiment(el("1/2*x + 1/2*a"), family, 1, {{2, 3}}), HypothesisViolation);
}
