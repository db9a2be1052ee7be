#include "selfnorm/words.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <limits>
#include <unordered_map>

#include "selfnorm/errors.hpp"

namespace selfnorm {

namespace {

std::size_t abs_exp(std::int32_t e) { return static_cast<std::size_t>(e < 0 ? -static_cast<std::int64_t>(e) : e); }

// Appends a syllable onto a reduced syllable sequence, merging with (and
// possibly cancelling) the trailing syllable.
void append_syllable(std::vector<Syllable>& out, Syllable s) {
  if (s.exponent == 0) return;
  if (!out.empty() && out.back().generator == s.generator) {
    out.back().exponent += s.exponent;
    if (out.back().exponent == 0) out.pop_back();
    return;
  }
  out.push_back(s);
}

std::size_t total_length(const std::vector<Syllable>& syl) {
  std::size_t n = 0;
  for (const auto& s : syl) n += abs_exp(s.exponent);
  return n;
}

bool is_name_char(char c, bool first) {
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return true;
  return !first && c >= '0' && c <= '9';
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h == 0 ? 1 : h;
}

}  // namespace

// ---------------------------------------------------------------- Word

Word Word::from_letters(std::uint64_t context, std::span<const Letter> letters) {
  std::vector<Letter> stack;
  stack.reserve(letters.size());
  for (Letter l : letters) push_reduced(stack, l);
  Word w;
  w.context_ = context;
  for (Letter l : stack) append_syllable(w.syllables_, {generator_of(l), l < 0 ? -1 : 1});
  w.length_ = stack.size();
  return w;
}

Word Word::from_syllables(std::uint64_t context, std::span<const Syllable> syllables) {
  Word w;
  w.context_ = context;
  for (const auto& s : syllables) append_syllable(w.syllables_, s);
  w.length_ = total_length(w.syllables_);
  return w;
}

Word Word::generator(std::uint64_t context, std::uint32_t index, std::int32_t exponent) {
  const Syllable s{index, exponent};
  return from_syllables(context, std::span<const Syllable>(&s, 1));
}

std::vector<Letter> Word::letters() const {
  std::vector<Letter> out;
  out.reserve(length_);
  for (const auto& s : syllables_) {
    const Letter l = letter_of(s.generator, s.exponent < 0);
    for (std::size_t i = 0; i < abs_exp(s.exponent); ++i) out.push_back(l);
  }
  return out;
}

Letter Word::first_letter() const {
  if (syllables_.empty()) return 0;
  return letter_of(syllables_.front().generator, syllables_.front().exponent < 0);
}

Letter Word::last_letter() const {
  if (syllables_.empty()) return 0;
  return letter_of(syllables_.back().generator, syllables_.back().exponent < 0);
}

std::size_t Word::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& s : syllables_) {
    h ^= s.generator;
    h *= 1099511628211ull;
    h ^= static_cast<std::uint32_t>(s.exponent);
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h ^ (h >> 29));
}

void require_same_context(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b != 0 && a != b) throw ContextMismatch();
}

Word multiply(const Word& lhs, const Word& rhs) {
  require_same_context(lhs.context_, rhs.context_);
  Word out;
  out.context_ = lhs.context_ != 0 ? lhs.context_ : rhs.context_;
  out.syllables_.reserve(lhs.syllables_.size() + rhs.syllables_.size());
  out.syllables_ = lhs.syllables_;
  std::size_t i = 0;
  while (i < rhs.syllables_.size() && !out.syllables_.empty() &&
         out.syllables_.back().generator == rhs.syllables_[i].generator) {
    out.syllables_.back().exponent += rhs.syllables_[i].exponent;
    ++i;
    if (out.syllables_.back().exponent != 0) break;
    out.syllables_.pop_back();
  }
  out.syllables_.insert(out.syllables_.end(), rhs.syllables_.begin() + static_cast<std::ptrdiff_t>(i),
                        rhs.syllables_.end());
  out.length_ = total_length(out.syllables_);
  return out;
}

Word invert(const Word& w) {
  Word out;
  out.context_ = w.context_;
  out.length_ = w.length_;
  out.syllables_.reserve(w.syllables_.size());
  for (auto it = w.syllables_.rbegin(); it != w.syllables_.rend(); ++it)
    out.syllables_.push_back({it->generator, -it->exponent});
  return out;
}

Word power(const Word& w, long exponent) {
  const Word base = exponent < 0 ? invert(w) : w;
  unsigned long k = exponent < 0 ? static_cast<unsigned long>(-exponent) : static_cast<unsigned long>(exponent);
  Word result = Word::from_letters(w.context(), {});
  Word square = base;
  while (k > 0) {
    if (k & 1u) result = multiply(result, square);
    k >>= 1u;
    if (k > 0) square = multiply(square, square);
  }
  return result;
}

bool shortlex_less(const Word& a, const Word& b) {
  if (a.length() != b.length()) return a.length() < b.length();
  const auto& sa = a.syllables();
  const auto& sb = b.syllables();
  std::size_t ia = 0, ib = 0;
  std::size_t ra = sa.empty() ? 0 : abs_exp(sa[0].exponent);
  std::size_t rb = sb.empty() ? 0 : abs_exp(sb[0].exponent);
  while (ia < sa.size() && ib < sb.size()) {
    const std::uint32_t la = letter_rank(letter_of(sa[ia].generator, sa[ia].exponent < 0));
    const std::uint32_t lb = letter_rank(letter_of(sb[ib].generator, sb[ib].exponent < 0));
    if (la != lb) return la < lb;
    const std::size_t step = std::min(ra, rb);
    ra -= step;
    rb -= step;
    if (ra == 0 && ++ia < sa.size()) ra = abs_exp(sa[ia].exponent);
    if (rb == 0 && ++ib < sb.size()) rb = abs_exp(sb[ib].exponent);
  }
  return false;
}

CyclicDecomposition cyclic_reduce(const Word& w) {
  const auto letters = w.letters();
  std::size_t lo = 0, hi = letters.size();
  while (hi - lo >= 2 && letters[lo] == -letters[hi - 1]) {
    ++lo;
    --hi;
  }
  const std::span<const Letter> all(letters);
  return {Word::from_letters(w.context(), all.subspan(lo, hi - lo)),
          Word::from_letters(w.context(), all.subspan(0, lo))};
}

PrimitiveRoot primitive_root(const Word& w) {
  if (w.is_identity()) throw HypothesisViolation("primitive_root: identity has no root");
  const auto [core, conj] = cyclic_reduce(w);
  const auto letters = core.letters();
  const std::size_t n = letters.size();
  for (std::size_t period = 1; period <= n; ++period) {
    if (n % period != 0) continue;
    bool periodic = true;
    for (std::size_t i = period; i < n && periodic; ++i) periodic = letters[i] == letters[i - period];
    if (!periodic) continue;
    const Word root_core =
        Word::from_letters(w.context(), std::span<const Letter>(letters).subspan(0, period));
    return {multiply(multiply(conj, root_core), invert(conj)), static_cast<long>(n / period)};
  }
  return {w, 1};  // unreachable: period n always matches
}

// ---------------------------------------------------------------- GroupContext

struct GroupContext::Data {
  std::vector<std::vector<std::string>> factors;
  std::vector<std::string> alphabet;
  std::vector<std::size_t> factor_of;
  std::unordered_map<std::string, std::uint32_t> index;
  std::string spec;
  std::uint64_t fingerprint = 0;
};

GroupContext::GroupContext(std::vector<std::vector<std::string>> factors) {
  auto d = std::make_shared<Data>();
  if (factors.empty()) throw ParseError("group has no factors", 0);
  for (std::size_t f = 0; f < factors.size(); ++f) {
    if (factors[f].empty()) throw ParseError("empty factor", 0);
    for (const auto& name : factors[f]) {
      if (name.empty() || name == "e" || !is_name_char(name[0], true) ||
          !std::all_of(name.begin(), name.end(), [](char c) { return is_name_char(c, false); }))
        throw ParseError("invalid generator name '" + name + "'", 0);
      if (!d->index.emplace(name, static_cast<std::uint32_t>(d->alphabet.size())).second)
        throw ParseError("duplicate generator name '" + name + "'", 0);
      d->alphabet.push_back(name);
      d->factor_of.push_back(f);
    }
    if (f) d->spec += '|';
    for (std::size_t i = 0; i < factors[f].size(); ++i) {
      if (i) d->spec += ',';
      d->spec += factors[f][i];
    }
  }
  d->factors = std::move(factors);
  d->fingerprint = fnv1a(d->spec);
  data_ = std::move(d);
}

GroupContext GroupContext::parse(std::string_view spec) {
  std::vector<std::vector<std::string>> factors(1);
  std::string current;
  std::size_t pos = 0;
  auto flush = [&](std::size_t at) {
    if (current.empty()) throw ParseError("empty generator name in group spec", at);
    factors.back().push_back(current);
    current.clear();
  };
  for (; pos < spec.size(); ++pos) {
    const char c = spec[pos];
    if (c == ' ' || c == '\t') continue;
    if (c == ',') {
      flush(pos);
    } else if (c == '|') {
      flush(pos);
      factors.emplace_back();
    } else if (is_name_char(c, current.empty())) {
      current += c;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "' in group spec", pos);
    }
  }
  flush(pos);
  return GroupContext(std::move(factors));
}

std::size_t GroupContext::rank() const { return data_->alphabet.size(); }
std::size_t GroupContext::factor_count() const { return data_->factors.size(); }
const std::vector<std::string>& GroupContext::alphabet() const { return data_->alphabet; }
const std::vector<std::string>& GroupContext::factor(std::size_t i) const { return data_->factors.at(i); }
std::size_t GroupContext::factor_of(std::uint32_t g) const { return data_->factor_of.at(g); }
std::uint64_t GroupContext::fingerprint() const { return data_->fingerprint; }
std::string GroupContext::spec() const { return data_->spec; }

std::optional<std::uint32_t> GroupContext::find_generator(std::string_view name) const {
  const auto it = data_->index.find(std::string(name));
  if (it == data_->index.end()) return std::nullopt;
  return it->second;
}

std::uint32_t GroupContext::generator_index(std::string_view name) const {
  if (auto g = find_generator(name)) return *g;
  throw ParseError("unknown generator '" + std::string(name) + "'", 0);
}

Word GroupContext::generator(std::string_view name, std::int32_t exponent) const {
  return Word::generator(fingerprint(), generator_index(name), exponent);
}

Word GroupContext::identity() const { return Word::from_letters(fingerprint(), {}); }

Word GroupContext::parse_word(std::string_view text) const {
  std::size_t pos = 0;
  const auto skip_ws = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  };
  std::vector<Syllable> syllables;
  skip_ws();
  if (pos == text.size()) throw ParseError("empty word", pos);
  while (true) {
    skip_ws();
    const std::size_t start = pos;
    while (pos < text.size() && is_name_char(text[pos], pos == start)) ++pos;
    if (pos == start) throw ParseError("expected generator name", pos);
    const std::string_view name = text.substr(start, pos - start);
    std::int32_t exponent = 1;
    skip_ws();
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      skip_ws();
      const char* first = text.data() + pos;
      const char* last = text.data() + text.size();
      if (first != last && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, exponent);
      if (ec != std::errc() || ptr == first) throw ParseError("expected integer exponent", pos);
      if (exponent == 0) throw ParseError("zero exponent", pos);
      pos = static_cast<std::size_t>(ptr - text.data());
    }
    if (name == "e") {
      if (exponent != 1 && exponent != -1) throw ParseError("identity cannot carry an exponent", start);
    } else {
      const auto g = find_generator(name);
      if (!g) throw ParseError("unknown generator '" + std::string(name) + "'", start);
      syllables.push_back({*g, exponent});
    }
    skip_ws();
    if (pos == text.size()) break;
    if (text[pos] != '.') throw ParseError("expected '.' between syllables", pos);
    ++pos;
  }
  return Word::from_syllables(fingerprint(), syllables);
}

std::string GroupContext::format(const Word& w) const {
  require_same_context(fingerprint(), w.context());
  if (w.is_identity()) return "e";
  std::string out;
  for (std::size_t i = 0; i < w.syllables().size(); ++i) {
    const auto& s = w.syllables()[i];
    if (i) out += '.';
    out += data_->alphabet.at(s.generator);
    if (s.exponent != 1) {
      out += '^';
      out += std::to_string(s.exponent);
    }
  }
  return out;
}

// ---------------------------------------------------------------- balls

std::uint64_t ball_size(std::size_t rank, unsigned radius) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  if (rank == 0) return 1;
  std::uint64_t total = 1;
  std::uint64_t sphere = 2 * rank;
  for (unsigned r = 1; r <= radius; ++r) {
    if (kMax - total < sphere) return kMax;
    total += sphere;
    if (sphere > kMax / (2 * rank - 1)) {
      sphere = kMax;
    } else {
      sphere *= (2 * rank - 1);
    }
  }
  return total;
}

void for_each_in_ball(const GroupContext& ctx, unsigned radius,
                      const std::function<void(const Word&)>& visit) {
  std::vector<Letter> alphabet;
  for (std::uint32_t g = 0; g < ctx.rank(); ++g) {
    alphabet.push_back(letter_of(g, false));
    alphabet.push_back(letter_of(g, true));
  }
  std::vector<Word> layer{ctx.identity()};
  visit(layer.front());
  for (unsigned r = 1; r <= radius; ++r) {
    std::vector<Word> next;
    for (const Word& w : layer) {
      const Letter last = w.last_letter();
      for (Letter l : alphabet) {
        if (l == -last) continue;
        next.push_back(multiply(w, Word::generator(ctx.fingerprint(), generator_of(l), l < 0 ? -1 : 1)));
        visit(next.back());
      }
    }
    layer = std::move(next);
  }
}

std::vector<Word> enumerate_ball(const GroupContext& ctx, unsigned radius, std::uint64_t budget) {
  const std::uint64_t count = ball_size(ctx.rank(), radius);
  if (count > budget) throw BudgetExceeded("ball enumeration", count, budget);
  std::vector<Word> out;
  out.reserve(count);
  for_each_in_ball(ctx, radius, [&](const Word& w) { out.push_back(w); });
  return out;
}

}  // namespace selfnorm
