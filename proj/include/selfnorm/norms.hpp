#pragma once

// Certified two-sided bounds on the reduced operator norm ‖λ(x)‖ of an element
// of Q[F] for a free group F.
//
//   lower:  ‖λ(x)‖ >= ‖(x*x)^m‖₂^(1/2m) = c_m^(1/4m),  c_m = ‖(x*x)^m‖₂²
//   upper:  ‖λ(x)‖ <= H((x*x)^m)^(1/2m),  H(y) = Σ_k (k+1)‖y_k‖₂
//
// where y_k is the word-length-k layer of y. H is Haagerup's inequality
// applied layer by layer; P(r)‖y‖₂ with P(r) = (Σ_{k<=r}(k+1)²)^(1/2) is the
// coarser single-polynomial form and is reported alongside.

#include <optional>
#include <string>
#include <vector>

#include "selfnorm/algebra.hpp"
#include "selfnorm/bounds.hpp"

namespace selfnorm {

struct RapidDecayBound {
  unsigned radius = 0;
  mpz_class sum_of_squares;  ///< P(r)² = Σ_{k<=r} (k+1)²
  DyadicBound value;         ///< P(r), rounded up
};

RapidDecayBound rapid_decay_polynomial(unsigned radius, unsigned bits = 64);

/// Σ_{k<=r} (k+1)² in closed form.
mpz_class rapid_decay_sum_of_squares(unsigned radius);

struct HaagerupBound {
  DyadicBound layered;  ///< Σ (k+1)‖x_k‖₂, rounded up
  DyadicBound flat;     ///< P(r)‖x‖₂, rounded up
  DyadicBound best;     ///< min of the two
  RapidDecayBound polynomial;
};

HaagerupBound haagerup_upper(const AlgebraElement& x, unsigned bits = 64);

/// Caches convolution powers of a base element (x*x).
class PowerStore {
 public:
  virtual ~PowerStore() = default;
  virtual std::optional<AlgebraElement> load(const AlgebraElement& base, unsigned m) = 0;
  virtual void save(const AlgebraElement& base, unsigned m, const AlgebraElement& value) = 0;
};

struct CertifyOptions {
  unsigned m_max = 4;
  ConvolveOptions convolve;
  unsigned precision_bits = 64;
  PowerStore* store = nullptr;
};

/// (x*x)^m, taking squares from / saving them to the store when given.
AlgebraElement gram_power(const AlgebraElement& x, unsigned m, const CertifyOptions& options);

/// c_m^(1/4m) rounded down; the radicand c_m is exact.
RadicalBound power_lower(const AlgebraElement& x, unsigned m, const CertifyOptions& options = {});

/// ‖x·probe‖₂ / ‖probe‖₂ as sqrt of an exact rational, rounded down.
RadicalBound vector_lower(const AlgebraElement& x, const AlgebraElement& probe, unsigned bits = 64);

struct NormStep {
  unsigned m = 1;
  Rational c;                  ///< ‖(x*x)^m‖₂²
  LayeredL2Profile profile;    ///< layers of (x*x)^m
  unsigned radius = 0;         ///< radius of (x*x)^m
  std::size_t support = 0;     ///< |supp (x*x)^m|
  RadicalBound lower;          ///< c^(1/4m)
  HaagerupBound power_bound;   ///< Haagerup bound of (x*x)^m
  DyadicBound upper;           ///< power_bound.best^(1/2m), rounded up
};

struct NormCertificate {
  std::string element_hash;
  RadicalBound baseline_lower;  ///< ‖x‖₂
  HaagerupBound baseline_upper; ///< Haagerup bound of x itself
  std::vector<NormStep> steps;
  DyadicBound best_lower;
  DyadicBound best_upper;
  bool lower_monotone = true;   ///< c_{2m} >= c_m² along the schedule (exact)
  bool truncated = false;
  std::string truncation_reason;
};

/// Runs the doubling schedule m = 1, 2, 4, ..., m_max. Budget or coefficient
/// errors stop the schedule and mark the certificate truncated.
NormCertificate certify_norm(const AlgebraElement& x, const CertifyOptions& options = {});

/// SHA-256 over group spec and canonical serialization.
std::string element_hash(const AlgebraElement& x);

}  // namespace selfnorm
