#pragma once

// Finitely supported elements of the rational group algebra Q[Γ] for a free
// product Γ of free groups, with exact (GMP) coefficients.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "selfnorm/words.hpp"

namespace selfnorm {

using Rational = mpq_class;

struct Term {
  Word word;
  Rational coefficient;
};

/// Squared ℓ²-mass of each word-length layer, index k = length.
struct LayeredL2Profile {
  std::vector<Rational> layers;

  Rational total() const;
};

struct ConvolveOptions {
  std::uint64_t budget = 20'000'000;    ///< max predicted output terms
  unsigned threads = 1;
  std::size_t max_coefficient_bits = 0;  ///< 0 disables the guard
};

/// Element of Q[Γ]. Terms are kept in ShortLex order with nonzero
/// coefficients, so equality and serialization are canonical.
class AlgebraElement {
 public:
  explicit AlgebraElement(GroupContext context);

  /// Merges repeated words, drops zero coefficients and sorts.
  static AlgebraElement from_terms(GroupContext context, std::vector<Term> terms);
  static AlgebraElement monomial(GroupContext context, const Word& w, const Rational& c = 1);

  const GroupContext& context() const { return context_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  /// Max word length over the support; 0 for the zero element.
  unsigned radius() const;
  Rational coefficient(const Word& w) const;

  friend bool operator==(const AlgebraElement& a, const AlgebraElement& b);

 private:
  GroupContext context_;
  std::vector<Term> terms_;
};

/// x + c·y
AlgebraElement combine(const AlgebraElement& x, const Rational& c, const AlgebraElement& y);

/// Upper estimate of the support size of x·y: min(|B(rx+ry)|, |x|·|y|).
std::uint64_t predicted_terms(const AlgebraElement& x, const AlgebraElement& y);

/// Convolution product x·y. Output is independent of `options.threads`.
AlgebraElement convolve(const AlgebraElement& x, const AlgebraElement& y,
                        const ConvolveOptions& options = {});

/// x* : coefficient of g moves to g^-1.
AlgebraElement adjoint(const AlgebraElement& x);

struct Norms {
  Rational l1;
  Rational l2_squared;
  Rational trace;  ///< coefficient of the identity
  LayeredL2Profile layered;
};
Norms norms(const AlgebraElement& x);

/// m-th convolution power by repeated squaring; m must be a power of two.
AlgebraElement power(const AlgebraElement& x, unsigned m, const ConvolveOptions& options = {});

bool is_power_of_two(unsigned m);

/// Canonical text form: terms in ShortLex order joined by " + ", each
/// `p/q*word` in lowest terms; "0" for the zero element.
std::string serialize(const AlgebraElement& x);

}  // namespace selfnorm
