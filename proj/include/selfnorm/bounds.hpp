#pragma once

// Outward-rounded real bounds. Every irrational quantity in a certificate is a
// root of an exact rational; it is displayed as a dyadic number scaled/2^bits
// rounded in the safe direction, computed with exact integer roots.

#include <gmpxx.h>

#include <string>

#include "selfnorm/algebra.hpp"

namespace selfnorm {

enum class Rounding { Down, Up };

struct DyadicBound {
  mpz_class scaled;
  unsigned bits = 64;
  Rounding rounding = Rounding::Down;

  Rational value() const;
  /// Decimal string rounded in the bound's direction.
  std::string decimal() const;
  double approx() const;
};

/// Compares the exact values of two dyadic numbers.
int compare(const DyadicBound& a, const DyadicBound& b);
/// Compares a dyadic bound against sqrt(q) exactly (q >= 0, bound >= 0).
int compare_with_sqrt(const DyadicBound& a, const Rational& q);

/// radicand^(1/index) rounded down or up to a multiple of 2^-bits.
DyadicBound root_bound(const Rational& radicand, unsigned index, unsigned bits, Rounding rounding);

/// Sign of a^(1/p) - b^(1/q) for nonnegative rationals, via a^q vs b^p.
int compare_roots(const Rational& a, unsigned p, const Rational& b, unsigned q);

/// An exact root radicand^(1/index) with its outward-rounded value.
struct RadicalBound {
  Rational radicand;
  unsigned index = 1;
  DyadicBound value;
};

RadicalBound make_radical(const Rational& radicand, unsigned index, unsigned bits, Rounding rounding);

}  // namespace selfnorm
