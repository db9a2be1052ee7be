#include "selfnorm/norms.hpp"

#include <stdexcept>

#include "selfnorm/digest.hpp"
#include "selfnorm/errors.hpp"

namespace selfnorm {

namespace {

constexpr unsigned kGuardBits = 16;

DyadicBound min_bound(const DyadicBound& a, const DyadicBound& b) { return compare(a, b) <= 0 ? a : b; }
DyadicBound max_bound(const DyadicBound& a, const DyadicBound& b) { return compare(a, b) >= 0 ? a : b; }

DyadicBound rescale_up(const mpz_class& scaled, unsigned from_bits, unsigned to_bits) {
  mpz_class q;
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, from_bits - to_bits);
  mpz_cdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
  return {q, to_bits, Rounding::Up};
}

// current = (x*x)^(m/2)  ->  (x*x)^m, through the store when present.
AlgebraElement next_square(const AlgebraElement& base, const AlgebraElement& current, unsigned m,
                           const CertifyOptions& options) {
  if (options.store) {
    if (auto cached = options.store->load(base, m)) return std::move(*cached);
  }
  AlgebraElement squared = convolve(current, current, options.convolve);
  if (options.store) options.store->save(base, m, squared);
  return squared;
}

}  // namespace

mpz_class rapid_decay_sum_of_squares(unsigned radius) {
  // Σ_{j=1}^{r+1} j² = n(n+1)(2n+1)/6 with n = r+1.
  const mpz_class n = radius + 1;
  return n * (n + 1) * (2 * n + 1) / 6;
}

RapidDecayBound rapid_decay_polynomial(unsigned radius, unsigned bits) {
  RapidDecayBound b;
  b.radius = radius;
  b.sum_of_squares = rapid_decay_sum_of_squares(radius);
  b.value = root_bound(Rational(b.sum_of_squares), 2, bits, Rounding::Up);
  return b;
}

HaagerupBound haagerup_upper(const AlgebraElement& x, unsigned bits) {
  const Norms n = norms(x);
  HaagerupBound h;
  h.polynomial = rapid_decay_polynomial(x.radius(), bits);

  mpz_class layered = 0;
  for (std::size_t k = 0; k < n.layered.layers.size(); ++k) {
    if (sgn(n.layered.layers[k]) == 0) continue;
    layered += (k + 1) * root_bound(n.layered.layers[k], 2, bits + kGuardBits, Rounding::Up).scaled;
  }
  h.layered = rescale_up(layered, bits + kGuardBits, bits);
  h.flat = root_bound(Rational(h.polynomial.sum_of_squares) * n.l2_squared, 2, bits, Rounding::Up);
  h.best = min_bound(h.layered, h.flat);
  return h;
}

AlgebraElement gram_power(const AlgebraElement& x, unsigned m, const CertifyOptions& options) {
  if (!is_power_of_two(m)) throw HypothesisViolation("gram_power: m must be a power of two");
  const AlgebraElement base = convolve(adjoint(x), x, options.convolve);
  AlgebraElement current = base;
  for (unsigned k = 2; k <= m; k *= 2) current = next_square(base, current, k, options);
  return current;
}

RadicalBound power_lower(const AlgebraElement& x, unsigned m, const CertifyOptions& options) {
  const AlgebraElement p = gram_power(x, m, options);
  return make_radical(norms(p).l2_squared, 4 * m, options.precision_bits, Rounding::Down);
}

RadicalBound vector_lower(const AlgebraElement& x, const AlgebraElement& probe, unsigned bits) {
  if (probe.is_zero()) throw HypothesisViolation("vector_lower: zero probe");
  const Rational num = norms(convolve(x, probe)).l2_squared;
  const Rational den = norms(probe).l2_squared;
  Rational q = num / den;
  q.canonicalize();
  return make_radical(q, 2, bits, Rounding::Down);
}

std::string element_hash(const AlgebraElement& x) {
  return sha256_hex(x.context().spec() + "\n" + serialize(x));
}

NormCertificate certify_norm(const AlgebraElement& x, const CertifyOptions& options) {
  if (!is_power_of_two(options.m_max)) throw HypothesisViolation("certify_norm: m_max must be a power of two");
  const unsigned bits = options.precision_bits;
  NormCertificate cert;
  cert.element_hash = element_hash(x);
  cert.baseline_lower = make_radical(norms(x).l2_squared, 2, bits, Rounding::Down);
  cert.baseline_upper = haagerup_upper(x, bits);
  cert.best_lower = cert.baseline_lower.value;
  cert.best_upper = cert.baseline_upper.best;
  if (x.is_zero()) return cert;

  try {
    const AlgebraElement base = convolve(adjoint(x), x, options.convolve);
    AlgebraElement current = base;
    for (unsigned m = 1; m <= options.m_max; m *= 2) {
      if (m > 1) current = next_square(base, current, m, options);
      NormStep step;
      step.m = m;
      const Norms n = norms(current);
      step.c = n.l2_squared;
      step.profile = n.layered;
      step.radius = current.radius();
      step.support = current.size();
      step.lower = make_radical(step.c, 4 * m, bits, Rounding::Down);
      step.power_bound = haagerup_upper(current, bits);
      step.upper = root_bound(step.power_bound.best.value(), 2 * m, bits, Rounding::Up);
      if (compare(step.lower.value, step.upper) > 0)
        throw std::logic_error("certify_norm: lower bound exceeds upper bound");
      if (!cert.steps.empty()) {
        const Rational& prev = cert.steps.back().c;
        if (cmp(step.c, prev * prev) < 0) cert.lower_monotone = false;
      }
      cert.best_lower = max_bound(cert.best_lower, step.lower.value);
      cert.best_upper = min_bound(cert.best_upper, step.upper);
      cert.steps.push_back(std::move(step));
    }
  } catch (const BudgetExceeded& e) {
    cert.truncated = true;
    cert.truncation_reason = e.what();
  } catch (const CoefficientGrowth& e) {
    cert.truncated = true;
    cert.truncation_reason = e.what();
  }
  return cert;
}

}  // namespace selfnorm
