#pragma once

// Retractions φ_n : G*H*<a> -> G*H that fix G*H and send the fresh letter a to
// h_n g h_n^-1, with h_n the (2n+1)-th power of H's first generator. The
// checks here run the injectivity, growth and norm-transfer arguments
// exhaustively on balls.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selfnorm/algebra.hpp"
#include "selfnorm/bounds.hpp"
#include "selfnorm/norms.hpp"
#include "selfnorm/words.hpp"

namespace selfnorm {

struct Retraction {
  GroupContext context;
  std::uint32_t fresh = 0;   ///< generator index of the letter a
  Word image_of_a;
  // Set for maps from build_retraction; empty for custom substitutions.
  std::optional<Word> g;
  std::optional<std::size_t> g_factor;
  std::optional<std::size_t> h_factor;
  std::optional<unsigned> n;
  Word h_n;
};

/// Which factors play G, H and <a>. Unset fields are inferred: a is the
/// single generator of the last factor, G is the factor containing g, H the
/// first remaining factor.
struct RetractionLayout {
  std::optional<std::uint32_t> fresh;
  std::optional<std::size_t> h_factor;
};

Retraction build_retraction(const GroupContext& ctx, const Word& g, unsigned n,
                            const RetractionLayout& layout = {});

/// Arbitrary substitution a -> image (image may involve any letter but a).
Retraction custom_retraction(const GroupContext& ctx, std::uint32_t fresh, const Word& image);

/// The family n -> φ_n for fixed g and layout.
struct RetractionFamily {
  GroupContext context;
  Word g;
  RetractionLayout layout;

  Retraction at(unsigned n) const { return build_retraction(context, g, n, layout); }
};

/// Parses `g=<word>;H=<generator-or-factor-index>;n=<int>` (H and n optional;
/// n defaults to 1). Also accepts `a=<generator>`.
struct RetractionSpec {
  Word g;
  RetractionLayout layout;
  unsigned n = 1;
};
RetractionSpec parse_retraction_spec(const GroupContext& ctx, std::string_view text);

Word apply(const Retraction& ret, const Word& w);
/// Pushforward; colliding images add their coefficients exactly.
AlgebraElement apply(const Retraction& ret, const AlgebraElement& x);

struct ScanOptions {
  std::uint64_t budget = 50'000'000;  ///< max ball size
  unsigned threads = 1;
  std::size_t max_listed_collisions = 64;
};

struct Collision {
  Word first;   ///< ShortLex-smallest preimage of the image
  Word second;
  Word image;
};

struct InjectivityReport {
  unsigned radius = 0;
  std::uint64_t ball_size = 0;
  std::uint64_t collision_count = 0;  ///< preimages beyond the first, summed over images
  std::vector<Collision> collisions;  ///< first max_listed_collisions
  std::uint64_t max_fiber = 0;
  bool injective() const { return collision_count == 0; }
};

InjectivityReport check_injectivity(const Retraction& ret, unsigned radius, const ScanOptions& options = {});

struct FiberStatistics {
  unsigned radius = 0;
  std::uint64_t ball_size = 0;
  std::uint64_t image_count = 0;
  std::uint64_t max_fiber = 0;
  std::map<std::uint64_t, std::uint64_t> histogram;  ///< fiber size -> number of images
  std::optional<Word> largest_fiber_image;
};

FiberStatistics fiber_statistics(const Retraction& ret, unsigned radius, const ScanOptions& options = {});

/// max |ret(w)| over w in B(radius).
std::uint64_t max_image_length(const Retraction& ret, unsigned radius, const ScanOptions& options = {});

struct GrowthPoint {
  unsigned n = 0;
  std::uint64_t f = 0;          ///< max image length of φ_n over B(n)
  std::uint64_t envelope = 0;   ///< n(4n + 3 + |g| - 1)
};

struct GrowthProfile {
  std::vector<GrowthPoint> points;
  bool nondecreasing = true;
  bool within_envelope = true;
  /// f(n)^(1/n) > f(n+1)^(1/(n+1)) for consecutive n >= 2 (exact comparison).
  bool root_strictly_decreasing = true;
};

GrowthProfile growth_profile(const RetractionFamily& family, unsigned radius_max, const ScanOptions& options = {});

struct ProductWitness {
  Word product;
  bool nontrivial = false;
  /// The regrouped factors (s_1 h_n), (h_n^-1 s_i h_n), ..., (h_n^-1 s_m).
  std::vector<Word> regrouped;
  /// Every regrouped factor is nontrivial and starts and ends with an H letter
  /// (the first only needs to end with one, the last only to start with one).
  bool regrouping_alternates = false;
};

/// s_1 t_1 s_2 ... t_{m-1} s_m with t_i = h_n g^{p_i} h_n^-1. Throws
/// HypothesisViolation unless |s_list| = |p_list| + 1, every s_i lies in G*H
/// with |s_i| <= 2n, interior s_i != e and p_i != 0.
ProductWitness product_nontriviality(const std::vector<Word>& s_list, const std::vector<long>& p_list,
                                     const Retraction& ret);

struct TransferStep {
  unsigned m = 1;
  std::optional<unsigned> n;  ///< defaults to 2mR
};

struct TransferPoint {
  unsigned m = 1;
  unsigned n = 0;
  Rational c_source;   ///< ‖(z*z)^m‖₂² over Γ
  Rational c_image;    ///< ‖(φ(z)*φ(z))^m‖₂² over G*H
  bool l2_equal = false;
  bool injective_on_ball = false;  ///< φ_n injective on B(2mR)
  std::uint64_t f = 0;             ///< f_measured(2mR) for φ_n
  mpz_class factor_radicand;       ///< P(f)², factor = radicand^(1/4m)
  DyadicBound factor;              ///< rounded up
  RadicalBound source_lower;       ///< c_source^(1/4m), lower bound for ‖λ(z)‖
  RadicalBound chain_upper;        ///< (P(f)² c_image)^(1/4m), upper bound for ‖λ(φ(z))‖
  Rational factor_times_lower_radicand;  ///< P(f)² c_source
  bool chain_identity = false;     ///< chain_upper radicand == factor_times_lower radicand
  DyadicBound image_upper;         ///< Haagerup-layered upper bound for ‖λ(φ(z))‖ at this m
  bool success = false;            ///< factor < 1 + epsilon (exact)
};

struct TransferReport {
  std::string element_hash;
  unsigned radius = 0;  ///< R
  Rational epsilon;
  std::vector<TransferPoint> points;
  bool factor_strictly_decreasing = true;
};

/// Requires ‖z‖₁ = 1 and every n >= 2mR.
TransferReport transfer_experiment(const AlgebraElement& z, const RetractionFamily& family, const Rational& epsilon,
                                   const std::vector<TransferStep>& schedule, const CertifyOptions& options = {},
                                   const ScanOptions& scan = {});

}  // namespace selfnorm
