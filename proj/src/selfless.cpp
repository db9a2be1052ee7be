#include "selfnorm/selfless.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>

#include "selfnorm/errors.hpp"
#include "selfnorm/parallel.hpp"

namespace selfnorm {

namespace {

bool mentions(const Word& w, std::uint32_t generator) {
  return std::any_of(w.syllables().begin(), w.syllables().end(),
                     [&](const Syllable& s) { return s.generator == generator; });
}

std::optional<std::size_t> single_factor(const GroupContext& ctx, const Word& w) {
  std::optional<std::size_t> factor;
  for (const auto& s : w.syllables()) {
    const std::size_t f = ctx.factor_of(s.generator);
    if (factor && *factor != f) return std::nullopt;
    factor = f;
  }
  return factor;
}

void require_context(const GroupContext& ctx, const Word& w) {
  require_same_context(ctx.fingerprint(), w.context());
}

// Image letters of every letter, indexed by letter_rank.
std::vector<std::vector<Letter>> letter_images(const Retraction& ret) {
  std::vector<std::vector<Letter>> images(2 * ret.context.rank());
  const auto forward = ret.image_of_a.letters();
  const auto backward = invert(ret.image_of_a).letters();
  for (std::uint32_t g = 0; g < ret.context.rank(); ++g) {
    for (bool inv : {false, true}) {
      const Letter l = letter_of(g, inv);
      if (g == ret.fresh) {
        images[letter_rank(l)] = inv ? backward : forward;
      } else {
        images[letter_rank(l)] = {l};
      }
    }
  }
  return images;
}

// Depth-first walk over reduced words of length <= radius that keeps the
// freely reduced image on a stack.
class ImageWalker {
 public:
  ImageWalker(const Retraction& ret, unsigned radius)
      : images_(letter_images(ret)), radius_(radius) {
    for (std::uint32_t g = 0; g < ret.context.rank(); ++g) {
      alphabet_.push_back(letter_of(g, false));
      alphabet_.push_back(letter_of(g, true));
    }
  }

  const std::vector<Letter>& alphabet() const { return alphabet_; }

  // Visits the image of every ball word that starts with `first`. The
  // identity is never visited; callers account for it separately.
  template <class Visit>
  void walk_from(Letter first, Visit&& visit) {
    image_.clear();
    undo_.clear();
    descend(first, 1, visit);
  }

 private:
  template <class Visit>
  void descend(Letter l, unsigned depth, Visit& visit) {
    const std::size_t mark = undo_.size();
    for (Letter x : images_[letter_rank(l)]) {
      const Letter top = image_.empty() ? 0 : image_.back();
      undo_.push_back(push_reduced(image_, x) ? top : 0);
    }
    visit(image_);
    if (depth < radius_) {
      for (Letter next : alphabet_)
        if (next != -l) descend(next, depth + 1, visit);
    }
    while (undo_.size() > mark) {
      const Letter popped = undo_.back();
      undo_.pop_back();
      if (popped != 0) {
        image_.push_back(popped);
      } else {
        image_.pop_back();
      }
    }
  }

  std::vector<std::vector<Letter>> images_;
  std::vector<Letter> alphabet_;
  unsigned radius_;
  std::vector<Letter> image_;
  std::vector<Letter> undo_;  // letter cancelled by each push, 0 if none
};

struct ImageTable {
  std::vector<Word> ball;
  std::vector<Word> images;
};

ImageTable image_table(const Retraction& ret, unsigned radius, const ScanOptions& options) {
  ImageTable t;
  t.ball = enumerate_ball(ret.context, radius, options.budget);
  t.images.resize(t.ball.size());
  run_sharded(t.ball.size(), options.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) t.images[i] = apply(ret, t.ball[i]);
  });
  return t;
}

}  // namespace

Retraction build_retraction(const GroupContext& ctx, const Word& g, unsigned n, const RetractionLayout& layout) {
  require_context(ctx, g);
  if (g.is_identity()) throw HypothesisViolation("build_retraction: g must be nontrivial");
  const auto g_factor = single_factor(ctx, g);
  if (!g_factor) throw HypothesisViolation("build_retraction: g must lie in a single factor G");

  std::uint32_t fresh = 0;
  if (layout.fresh) {
    fresh = *layout.fresh;
  } else {
    const auto& last = ctx.factor(ctx.factor_count() - 1);
    if (last.size() != 1)
      throw HypothesisViolation("build_retraction: last factor must be the single fresh letter a");
    fresh = static_cast<std::uint32_t>(ctx.rank() - 1);
  }
  if (fresh >= ctx.rank()) throw HypothesisViolation("build_retraction: fresh letter out of range");
  const std::size_t a_factor = ctx.factor_of(fresh);
  if (ctx.factor(a_factor).size() != 1)
    throw HypothesisViolation("build_retraction: the fresh letter must generate its own factor");
  if (*g_factor == a_factor) throw HypothesisViolation("build_retraction: g must not involve the fresh letter");

  std::size_t h_factor = ctx.factor_count();
  if (layout.h_factor) {
    h_factor = *layout.h_factor;
  } else {
    for (std::size_t f = 0; f < ctx.factor_count(); ++f) {
      if (f != *g_factor && f != a_factor) {
        h_factor = f;
        break;
      }
    }
  }
  if (h_factor >= ctx.factor_count() || h_factor == *g_factor || h_factor == a_factor)
    throw HypothesisViolation("build_retraction: need a factor H distinct from G and <a>");

  Retraction ret{ctx, fresh, Word{}, g, g_factor, h_factor, n, Word{}};
  const std::uint32_t h_gen = ctx.generator_index(ctx.factor(h_factor).front());
  ret.h_n = Word::generator(ctx.fingerprint(), h_gen, static_cast<std::int32_t>(2 * n + 1));
  ret.image_of_a = multiply(multiply(ret.h_n, g), invert(ret.h_n));
  return ret;
}

Retraction custom_retraction(const GroupContext& ctx, std::uint32_t fresh, const Word& image) {
  require_context(ctx, image);
  if (fresh >= ctx.rank()) throw HypothesisViolation("custom_retraction: fresh letter out of range");
  if (mentions(image, fresh)) throw HypothesisViolation("custom_retraction: image must not involve a");
  Retraction ret{ctx, fresh, image, std::nullopt, std::nullopt, std::nullopt, std::nullopt, Word{}};
  return ret;
}

RetractionSpec parse_retraction_spec(const GroupContext& ctx, std::string_view text) {
  RetractionSpec spec;
  bool have_g = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view item = text.substr(pos, end - pos);
    const std::size_t eq = item.find('=');
    if (item.find_first_not_of(" \t") != std::string_view::npos) {
      if (eq == std::string_view::npos) throw ParseError("expected key=value in retraction spec", pos);
      std::string_view key = item.substr(0, eq);
      std::string_view value = item.substr(eq + 1);
      while (!key.empty() && key.front() == ' ') key.remove_prefix(1);
      while (!key.empty() && key.back() == ' ') key.remove_suffix(1);
      while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
      while (!value.empty() && value.back() == ' ') value.remove_suffix(1);
      if (key == "g") {
        spec.g = ctx.parse_word(value);
        have_g = true;
      } else if (key == "H") {
        if (auto gen = ctx.find_generator(value)) {
          spec.layout.h_factor = ctx.factor_of(*gen);
        } else {
          std::size_t idx = 0;
          const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), idx);
          if (ec != std::errc() || ptr != value.data() + value.size() || idx >= ctx.factor_count())
            throw ParseError("H must name a generator or a factor index", pos + eq + 1);
          spec.layout.h_factor = idx;
        }
      } else if (key == "a") {
        spec.layout.fresh = ctx.generator_index(value);
      } else if (key == "n") {
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), spec.n);
        if (ec != std::errc() || ptr != value.data() + value.size())
          throw ParseError("n must be a nonnegative integer", pos + eq + 1);
      } else {
        throw ParseError("unknown retraction key '" + std::string(key) + "'", pos);
      }
    }
    pos = end + 1;
  }
  if (!have_g) throw ParseError("retraction spec needs g=<word>", 0);
  return spec;
}

Word apply(const Retraction& ret, const Word& w) {
  require_context(ret.context, w);
  if (!mentions(w, ret.fresh)) return w;
  std::vector<Letter> stack;
  const auto forward = ret.image_of_a.letters();
  const auto backward = invert(ret.image_of_a).letters();
  for (const auto& s : w.syllables()) {
    const std::size_t count = static_cast<std::size_t>(s.exponent < 0 ? -s.exponent : s.exponent);
    if (s.generator == ret.fresh) {
      const auto& img = s.exponent < 0 ? backward : forward;
      for (std::size_t i = 0; i < count; ++i)
        for (Letter l : img) push_reduced(stack, l);
    } else {
      const Letter l = letter_of(s.generator, s.exponent < 0);
      for (std::size_t i = 0; i < count; ++i) push_reduced(stack, l);
    }
  }
  return Word::from_letters(ret.context.fingerprint(), stack);
}

AlgebraElement apply(const Retraction& ret, const AlgebraElement& x) {
  if (!(x.context() == ret.context)) throw ContextMismatch();
  std::vector<Term> terms;
  terms.reserve(x.size());
  for (const auto& t : x.terms()) terms.push_back({apply(ret, t.word), t.coefficient});
  return AlgebraElement::from_terms(ret.context, std::move(terms));
}

InjectivityReport check_injectivity(const Retraction& ret, unsigned radius, const ScanOptions& options) {
  const ImageTable t = image_table(ret, radius, options);
  InjectivityReport report;
  report.radius = radius;
  report.ball_size = t.ball.size();
  std::unordered_map<Word, std::pair<std::size_t, std::uint64_t>, WordHash> seen;
  seen.reserve(t.ball.size());
  for (std::size_t i = 0; i < t.ball.size(); ++i) {
    auto [it, inserted] = seen.try_emplace(t.images[i], i, 0);
    ++it->second.second;
    report.max_fiber = std::max(report.max_fiber, it->second.second);
    if (inserted) continue;
    ++report.collision_count;
    if (report.collisions.size() < options.max_listed_collisions)
      report.collisions.push_back({t.ball[it->second.first], t.ball[i], t.images[i]});
  }
  return report;
}

FiberStatistics fiber_statistics(const Retraction& ret, unsigned radius, const ScanOptions& options) {
  const ImageTable t = image_table(ret, radius, options);
  FiberStatistics stats;
  stats.radius = radius;
  stats.ball_size = t.ball.size();
  std::unordered_map<Word, std::pair<std::size_t, std::uint64_t>, WordHash> fibers;
  fibers.reserve(t.ball.size());
  for (std::size_t i = 0; i < t.images.size(); ++i) ++fibers.try_emplace(t.images[i], i, 0).first->second.second;
  stats.image_count = fibers.size();
  std::size_t largest_first = t.ball.size();
  for (const auto& [image, info] : fibers) {
    ++stats.histogram[info.second];
    // Ties go to the fiber whose first preimage comes first in ShortLex.
    if (info.second > stats.max_fiber || (info.second == stats.max_fiber && info.first < largest_first)) {
      stats.max_fiber = info.second;
      largest_first = info.first;
      stats.largest_fiber_image = image;
    }
  }
  return stats;
}

std::uint64_t max_image_length(const Retraction& ret, unsigned radius, const ScanOptions& options) {
  const std::uint64_t size = ball_size(ret.context.rank(), radius);
  if (size > options.budget) throw BudgetExceeded("image growth scan", size, options.budget);
  if (radius == 0) return 0;
  const std::size_t letters = 2 * ret.context.rank();
  std::vector<std::uint64_t> shard_max(std::max(1u, options.threads), 0);
  run_sharded(letters, options.threads, [&](std::size_t shard, std::size_t begin, std::size_t end) {
    ImageWalker walker(ret, radius);
    std::uint64_t best = 0;
    for (std::size_t i = begin; i < end; ++i) {
      walker.walk_from(walker.alphabet()[i], [&](const std::vector<Letter>& image) {
        best = std::max<std::uint64_t>(best, image.size());
      });
    }
    shard_max[shard] = best;
  });
  return *std::max_element(shard_max.begin(), shard_max.end());
}

GrowthProfile growth_profile(const RetractionFamily& family, unsigned radius_max, const ScanOptions& options) {
  GrowthProfile profile;
  const std::uint64_t glen = family.g.length();
  for (unsigned n = 1; n <= radius_max; ++n) {
    GrowthPoint p;
    p.n = n;
    p.f = max_image_length(family.at(n), n, options);
    p.envelope = static_cast<std::uint64_t>(n) * (4ull * n + 3 + glen - 1);
    if (p.f > p.envelope) profile.within_envelope = false;
    if (!profile.points.empty()) {
      const GrowthPoint& prev = profile.points.back();
      if (p.f < prev.f) profile.nondecreasing = false;
      if (prev.n >= 2 && compare_roots(Rational(prev.f), prev.n, Rational(p.f), p.n) <= 0)
        profile.root_strictly_decreasing = false;
    }
    profile.points.push_back(p);
  }
  return profile;
}

ProductWitness product_nontriviality(const std::vector<Word>& s_list, const std::vector<long>& p_list,
                                     const Retraction& ret) {
  if (!ret.n || !ret.g || !ret.h_factor)
    throw HypothesisViolation("product_nontriviality: needs a retraction built from (g, H, n)");
  if (s_list.size() != p_list.size() + 1)
    throw HypothesisViolation("product_nontriviality: need exactly one more s than p");
  const unsigned n = *ret.n;
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    require_context(ret.context, s_list[i]);
    if (mentions(s_list[i], ret.fresh))
      throw HypothesisViolation("product_nontriviality: s_" + std::to_string(i + 1) + " must lie in G*H");
    if (s_list[i].length() > 2 * n)
      throw HypothesisViolation("product_nontriviality: |s_" + std::to_string(i + 1) + "| exceeds 2n");
    if (i > 0 && i + 1 < s_list.size() && s_list[i].is_identity())
      throw HypothesisViolation("product_nontriviality: interior s_" + std::to_string(i + 1) + " is trivial");
  }
  for (std::size_t i = 0; i < p_list.size(); ++i)
    if (p_list[i] == 0)
      throw HypothesisViolation("product_nontriviality: exponent p_" + std::to_string(i + 1) + " is zero");

  const Word& h = ret.h_n;
  const Word h_inv = invert(h);
  ProductWitness witness;
  Word product = s_list.front();
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    const Word t = multiply(multiply(h, power(*ret.g, p_list[i])), h_inv);
    product = multiply(multiply(product, t), s_list[i + 1]);
  }
  witness.product = product;
  witness.nontrivial = !product.is_identity();

  if (p_list.empty()) {
    witness.regrouped = {s_list.front()};
    witness.regrouping_alternates = true;
    return witness;
  }
  const auto in_h = [&](Letter l) { return l != 0 && ret.context.factor_of(generator_of(l)) == *ret.h_factor; };
  witness.regrouping_alternates = true;
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    Word piece = s_list[i];
    if (i > 0) piece = multiply(h_inv, piece);
    if (i + 1 < s_list.size()) piece = multiply(piece, h);
    const bool starts_ok = i == 0 || in_h(piece.first_letter());
    const bool ends_ok = i + 1 == s_list.size() || in_h(piece.last_letter());
    if (piece.is_identity() || !starts_ok || !ends_ok) witness.regrouping_alternates = false;
    witness.regrouped.push_back(std::move(piece));
  }
  return witness;
}

TransferReport transfer_experiment(const AlgebraElement& z, const RetractionFamily& family, const Rational& epsilon,
                                   const std::vector<TransferStep>& schedule, const CertifyOptions& options,
                                   const ScanOptions& scan) {
  if (!(z.context() == family.context)) throw ContextMismatch();
  if (norms(z).l1 != 1) throw HypothesisViolation("transfer_experiment: z must satisfy ‖z‖₁ = 1");
  if (sgn(epsilon) <= 0) throw HypothesisViolation("transfer_experiment: epsilon must be positive");
  const unsigned bits = options.precision_bits;
  TransferReport report;
  report.element_hash = element_hash(z);
  report.radius = z.radius();
  report.epsilon = epsilon;

  for (const TransferStep& step : schedule) {
    if (!is_power_of_two(step.m)) throw HypothesisViolation("transfer_experiment: m must be a power of two");
    TransferPoint p;
    p.m = step.m;
    const unsigned reach = 2 * step.m * report.radius;
    p.n = step.n.value_or(reach);
    if (p.n < reach) throw HypothesisViolation("transfer_experiment: need n >= 2mR");

    const Retraction ret = family.at(p.n);
    const AlgebraElement image = apply(ret, z);
    const AlgebraElement source_power = gram_power(z, step.m, options);
    const AlgebraElement image_power = gram_power(image, step.m, options);
    p.c_source = norms(source_power).l2_squared;
    p.c_image = norms(image_power).l2_squared;
    p.l2_equal = p.c_source == p.c_image;
    p.injective_on_ball = check_injectivity(ret, reach, scan).injective();
    p.f = max_image_length(ret, reach, scan);

    const unsigned index = 4 * step.m;
    p.factor_radicand = rapid_decay_sum_of_squares(static_cast<unsigned>(p.f));
    p.factor = root_bound(Rational(p.factor_radicand), index, bits, Rounding::Up);
    p.source_lower = make_radical(p.c_source, index, bits, Rounding::Down);
    p.chain_upper = make_radical(Rational(p.factor_radicand) * p.c_image, index, bits, Rounding::Up);
    p.factor_times_lower_radicand = Rational(p.factor_radicand) * p.c_source;
    p.chain_identity = p.chain_upper.radicand == p.factor_times_lower_radicand;
    p.image_upper = root_bound(haagerup_upper(image_power, bits).best.value(), 2 * step.m, bits, Rounding::Up);

    Rational one_plus(1);
    one_plus += epsilon;
    p.success = compare_roots(Rational(p.factor_radicand), index, one_plus, 1) < 0;

    if (!report.points.empty()) {
      const TransferPoint& prev = report.points.back();
      if (compare_roots(Rational(prev.factor_radicand), 4 * prev.m, Rational(p.factor_radicand), index) <= 0)
        report.factor_strictly_decreasing = false;
    }
    report.points.push_back(std::move(p));
  }
  return report;
}

}  // namespace selfnorm
