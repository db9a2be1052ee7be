#pragma once

// Reduced words in a free product of finitely generated free groups.
//
// The product of free groups is itself free on the concatenated alphabet, so
// every element has a unique freely reduced spelling. Words are stored as
// syllables (generator, nonzero exponent) with adjacent syllables on distinct
// generators. A letter is the signed integer +(i+1) or -(i+1) for alphabet
// index i.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace selfnorm {

using Letter = std::int32_t;

constexpr Letter letter_of(std::uint32_t generator, bool inverse) {
  const auto l = static_cast<Letter>(generator + 1);
  return inverse ? -l : l;
}
constexpr std::uint32_t generator_of(Letter l) {
  return static_cast<std::uint32_t>((l < 0 ? -l : l) - 1);
}
/// Position of a letter in the ShortLex alphabet order x0 < x0^-1 < x1 < ...
constexpr std::uint32_t letter_rank(Letter l) {
  return 2 * generator_of(l) + (l < 0 ? 1u : 0u);
}

struct Syllable {
  std::uint32_t generator = 0;
  std::int32_t exponent = 0;

  friend bool operator==(const Syllable&, const Syllable&) = default;
};

/// Canonical reduced word. The default-constructed word is the identity and
/// is compatible with every context.
class Word {
 public:
  Word() = default;

  /// Freely reduces an arbitrary letter sequence.
  static Word from_letters(std::uint64_t context, std::span<const Letter> letters);
  /// Merges and reduces an arbitrary syllable sequence (zero exponents dropped).
  static Word from_syllables(std::uint64_t context, std::span<const Syllable> syllables);
  static Word generator(std::uint64_t context, std::uint32_t index, std::int32_t exponent = 1);

  const std::vector<Syllable>& syllables() const { return syllables_; }
  std::size_t length() const { return length_; }
  bool is_identity() const { return syllables_.empty(); }
  std::uint64_t context() const { return context_; }

  std::vector<Letter> letters() const;
  Letter first_letter() const;
  Letter last_letter() const;
  std::size_t hash() const;

  friend bool operator==(const Word& a, const Word& b) { return a.syllables_ == b.syllables_; }

 private:
  friend Word multiply(const Word&, const Word&);
  friend Word invert(const Word&);

  std::uint64_t context_ = 0;
  std::vector<Syllable> syllables_;
  std::size_t length_ = 0;
};

struct WordHash {
  std::size_t operator()(const Word& w) const { return w.hash(); }
};

/// ShortLex strict order: shorter first, then lexicographic by letter_rank.
bool shortlex_less(const Word& a, const Word& b);
struct ShortLexLess {
  bool operator()(const Word& a, const Word& b) const { return shortlex_less(a, b); }
};

Word multiply(const Word& lhs, const Word& rhs);
Word invert(const Word& w);
Word power(const Word& w, long exponent);
inline std::size_t word_length(const Word& w) { return w.length(); }

/// Throws ContextMismatch when both words are bound to different contexts.
void require_same_context(std::uint64_t a, std::uint64_t b);

struct CyclicDecomposition {
  Word core;        ///< cyclically reduced
  Word conjugator;  ///< w = conjugator * core * conjugator^-1
};
CyclicDecomposition cyclic_reduce(const Word& w);

struct PrimitiveRoot {
  Word root;
  long exponent = 1;  ///< positive
};
/// Throws HypothesisViolation on the identity.
PrimitiveRoot primitive_root(const Word& w);

/// Free product of named free factors. Cheap to copy; the data is shared and
/// immutable.
class GroupContext {
 public:
  /// Parses `x|y|a` (factors separated by `|`, generators within a factor by `,`).
  static GroupContext parse(std::string_view spec);
  explicit GroupContext(std::vector<std::vector<std::string>> factors);

  std::size_t rank() const;
  std::size_t factor_count() const;
  const std::vector<std::string>& alphabet() const;
  const std::vector<std::string>& factor(std::size_t index) const;
  std::size_t factor_of(std::uint32_t generator) const;
  std::optional<std::uint32_t> find_generator(std::string_view name) const;
  std::uint32_t generator_index(std::string_view name) const;  // throws ParseError
  std::uint64_t fingerprint() const;
  /// Canonical spec string, `x|y|a`.
  std::string spec() const;

  Word generator(std::string_view name, std::int32_t exponent = 1) const;
  Word identity() const;
  /// Parses the word grammar: `e` or syllables `name[^k]` joined by `.`.
  Word parse_word(std::string_view text) const;
  /// Inverse of parse_word; `e` for the identity.
  std::string format(const Word& w) const;

  friend bool operator==(const GroupContext& a, const GroupContext& b) {
    return a.fingerprint() == b.fingerprint();
  }

 private:
  struct Data;
  std::shared_ptr<const Data> data_;
};

/// Number of reduced words of length <= radius for a free group of the given
/// rank. Saturates at UINT64_MAX.
std::uint64_t ball_size(std::size_t rank, unsigned radius);

/// Visits B(radius) in ShortLex order.
void for_each_in_ball(const GroupContext& ctx, unsigned radius,
                      const std::function<void(const Word&)>& visit);

/// Materializes B(radius) in ShortLex order; throws BudgetExceeded if the
/// closed-form size is larger than `budget`.
std::vector<Word> enumerate_ball(const GroupContext& ctx, unsigned radius,
                                 std::uint64_t budget = 50'000'000);

/// Stack-based free reduction used by hot loops: pushes `l` onto a reduced
/// letter sequence, cancelling against the top if possible. Returns true if a
/// cancellation happened.
inline bool push_reduced(std::vector<Letter>& stack, Letter l) {
  if (!stack.empty() && stack.back() == -l) {
    stack.pop_back();
    return true;
  }
  stack.push_back(l);
  return false;
}

}  // namespace selfnorm
