#include "selfnorm/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace selfnorm {

namespace {

mpz_class pow2(unsigned e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
  return r;
}

mpz_class div_round(const mpz_class& num, const mpz_class& den, Rounding rounding) {
  mpz_class q;
  if (rounding == Rounding::Down) {
    mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  } else {
    mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  }
  return q;
}

Rational pow_rational(const Rational& q, unsigned e) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), e);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace

Rational DyadicBound::value() const {
  Rational r(scaled, pow2(bits));
  r.canonicalize();
  return r;
}

std::string DyadicBound::decimal() const {
  const auto digits = static_cast<unsigned>(std::ceil(bits * 0.30102999566398120));
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, digits);
  mpz_class q = div_round(scaled * ten_pow, pow2(bits), rounding);
  const bool negative = sgn(q) < 0;
  if (negative) q = -q;
  std::string s = q.get_str();
  if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
  s.insert(s.size() - digits, ".");
  return negative ? "-" + s : s;
}

double DyadicBound::approx() const { return value().get_d(); }

int compare(const DyadicBound& a, const DyadicBound& b) {
  const mpz_class lhs = a.scaled * pow2(b.bits);
  const mpz_class rhs = b.scaled * pow2(a.bits);
  return cmp(lhs, rhs) < 0 ? -1 : (cmp(lhs, rhs) > 0 ? 1 : 0);
}

int compare_with_sqrt(const DyadicBound& a, const Rational& q) {
  if (sgn(a.scaled) < 0) return -1;
  const Rational v = a.value();
  const int c = cmp(v * v, q);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

DyadicBound root_bound(const Rational& radicand, unsigned index, unsigned bits, Rounding rounding) {
  if (index == 0) throw std::invalid_argument("root_bound: index must be positive");
  if (sgn(radicand) < 0) throw std::invalid_argument("root_bound: negative radicand");
  // N = round(radicand * 2^(index*bits)); floor/ceil of N^(1/index) equals the
  // floor/ceil of (radicand)^(1/index) * 2^bits because k-th roots map integer
  // intervals monotonically.
  const mpz_class n = div_round(radicand.get_num() * pow2(index * bits), radicand.get_den(), rounding);
  mpz_class r;
  const int exact = mpz_root(r.get_mpz_t(), n.get_mpz_t(), index);
  if (rounding == Rounding::Up && !exact) r += 1;
  return {r, bits, rounding};
}

int compare_roots(const Rational& a, unsigned p, const Rational& b, unsigned q) {
  const int c = cmp(pow_rational(a, q), pow_rational(b, p));
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

RadicalBound make_radical(const Rational& radicand, unsigned index, unsigned bits, Rounding rounding) {
  return {radicand, index, root_bound(radicand, index, bits, rounding)};
}

}  // namespace selfnorm
