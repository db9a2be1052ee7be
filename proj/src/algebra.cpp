#include "selfnorm/algebra.hpp"

#include <algorithm>
#include <unordered_map>

#include "selfnorm/errors.hpp"
#include "selfnorm/parallel.hpp"

namespace selfnorm {

namespace {

using Accumulator = std::unordered_map<Word, Rational, WordHash>;

AlgebraElement from_accumulator(const GroupContext& ctx, Accumulator&& acc) {
  std::vector<Term> terms;
  terms.reserve(acc.size());
  for (auto& [w, c] : acc)
    if (sgn(c) != 0) terms.push_back({w, std::move(c)});
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return shortlex_less(a.word, b.word); });
  return AlgebraElement::from_terms(ctx, std::move(terms));
}

std::size_t coefficient_bits(const Rational& q) {
  return std::max(mpz_sizeinbase(q.get_num_mpz_t(), 2), mpz_sizeinbase(q.get_den_mpz_t(), 2));
}

void require_context(const AlgebraElement& x, const AlgebraElement& y) {
  if (!(x.context() == y.context())) throw ContextMismatch();
}

}  // namespace

Rational LayeredL2Profile::total() const {
  Rational s = 0;
  for (const auto& l : layers) s += l;
  return s;
}

AlgebraElement::AlgebraElement(GroupContext context) : context_(std::move(context)) {}

AlgebraElement AlgebraElement::from_terms(GroupContext context, std::vector<Term> terms) {
  AlgebraElement out(std::move(context));
  for (auto& t : terms) {
    require_same_context(out.context_.fingerprint(), t.word.context());
    t.coefficient.canonicalize();
  }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& a, const Term& b) { return shortlex_less(a.word, b.word); });
  for (auto& t : terms) {
    if (!out.terms_.empty() && out.terms_.back().word == t.word) {
      out.terms_.back().coefficient += t.coefficient;
    } else {
      out.terms_.push_back(std::move(t));
    }
  }
  std::erase_if(out.terms_, [](const Term& t) { return sgn(t.coefficient) == 0; });
  return out;
}

AlgebraElement AlgebraElement::monomial(GroupContext context, const Word& w, const Rational& c) {
  std::vector<Term> t;
  t.push_back({w, c});
  return from_terms(std::move(context), std::move(t));
}

unsigned AlgebraElement::radius() const {
  // ShortLex order puts the longest words last.
  return terms_.empty() ? 0u : static_cast<unsigned>(terms_.back().word.length());
}

Rational AlgebraElement::coefficient(const Word& w) const {
  const auto it = std::lower_bound(terms_.begin(), terms_.end(), w,
                                   [](const Term& t, const Word& key) { return shortlex_less(t.word, key); });
  if (it != terms_.end() && it->word == w) return it->coefficient;
  return 0;
}

bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
  if (!(a.context_ == b.context_) || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i)
    if (!(a.terms_[i].word == b.terms_[i].word) || a.terms_[i].coefficient != b.terms_[i].coefficient)
      return false;
  return true;
}

AlgebraElement combine(const AlgebraElement& x, const Rational& c, const AlgebraElement& y) {
  require_context(x, y);
  std::vector<Term> terms = x.terms();
  terms.reserve(x.size() + y.size());
  for (const auto& t : y.terms()) terms.push_back({t.word, c * t.coefficient});
  return AlgebraElement::from_terms(x.context(), std::move(terms));
}

std::uint64_t predicted_terms(const AlgebraElement& x, const AlgebraElement& y) {
  const std::uint64_t ball = ball_size(x.context().rank(), x.radius() + y.radius());
  const auto nx = static_cast<std::uint64_t>(x.size());
  const auto ny = static_cast<std::uint64_t>(y.size());
  const std::uint64_t pairs = (ny != 0 && nx > UINT64_MAX / ny) ? UINT64_MAX : nx * ny;
  return std::min(ball, pairs);
}

AlgebraElement convolve(const AlgebraElement& x, const AlgebraElement& y, const ConvolveOptions& options) {
  require_context(x, y);
  const std::uint64_t predicted = predicted_terms(x, y);
  if (predicted > options.budget) throw BudgetExceeded("convolution", predicted, options.budget);

  const auto& xt = x.terms();
  const auto& yt = y.terms();
  std::vector<Accumulator> partial(std::max(1u, options.threads));
  run_sharded(xt.size(), options.threads, [&](std::size_t shard, std::size_t begin, std::size_t end) {
    Accumulator& acc = partial[shard];
    acc.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(predicted, (end - begin) * yt.size())));
    Rational product;
    for (std::size_t i = begin; i < end; ++i) {
      for (const auto& t : yt) {
        product = xt[i].coefficient * t.coefficient;
        acc[multiply(xt[i].word, t.word)] += product;
      }
    }
  });
  Accumulator merged = std::move(partial.front());
  for (std::size_t s = 1; s < partial.size(); ++s)
    for (auto& [w, c] : partial[s]) merged[w] += c;

  AlgebraElement out = from_accumulator(x.context(), std::move(merged));
  if (options.max_coefficient_bits != 0) {
    for (const auto& t : out.terms()) {
      const std::size_t bits = coefficient_bits(t.coefficient);
      if (bits > options.max_coefficient_bits) throw CoefficientGrowth(bits, options.max_coefficient_bits);
    }
  }
  return out;
}

AlgebraElement adjoint(const AlgebraElement& x) {
  std::vector<Term> terms;
  terms.reserve(x.size());
  for (const auto& t : x.terms()) terms.push_back({invert(t.word), t.coefficient});
  return AlgebraElement::from_terms(x.context(), std::move(terms));
}

Norms norms(const AlgebraElement& x) {
  Norms n;
  n.layered.layers.assign(x.radius() + 1, Rational(0));
  for (const auto& t : x.terms()) {
    n.l1 += abs(t.coefficient);
    const Rational sq = t.coefficient * t.coefficient;
    n.l2_squared += sq;
    n.layered.layers[t.word.length()] += sq;
    if (t.word.is_identity()) n.trace = t.coefficient;
  }
  return n;
}

bool is_power_of_two(unsigned m) { return m != 0 && (m & (m - 1)) == 0; }

AlgebraElement power(const AlgebraElement& x, unsigned m, const ConvolveOptions& options) {
  if (!is_power_of_two(m)) throw HypothesisViolation("power: exponent must be a power of two");
  AlgebraElement result = x;
  for (unsigned k = 1; k < m; k *= 2) result = convolve(result, result, options);
  return result;
}

std::string serialize(const AlgebraElement& x) {
  if (x.is_zero()) return "0";
  std::string out;
  for (std::size_t i = 0; i < x.terms().size(); ++i) {
    const auto& t = x.terms()[i];
    if (i) out += " + ";
    out += t.coefficient.get_str();
    out += '*';
    out += x.context().format(t.word);
  }
  return out;
}

}  // namespace selfnorm
