#pragma once

// Geometry of a free group acting on its own Cayley tree: displacement,
// stable length, axes, nearest-point projections, the admissible-path
// constant cascade and exact nontriviality of products h_1 g^{n_1} ... h_m g^{n_m}.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selfnorm/algebra.hpp"
#include "selfnorm/words.hpp"

namespace selfnorm {

/// [g]: length of the cyclically reduced core.
std::size_t translation_length(const Word& g);

/// Tree distance d(u, v) = |u^-1 v|.
std::size_t tree_distance(const Word& u, const Word& v);

struct StableLength {
  std::size_t exact = 0;
  std::vector<std::pair<unsigned, Rational>> empirical;  ///< (n, |g^n| / n)
};
/// Throws HypothesisViolation for g = e.
StableLength stable_length(const Word& g, const std::vector<unsigned>& samples);

/// h ∈ E(g) = <primitive_root(g)>. Throws HypothesisViolation for g = e.
bool elementary_membership(const Word& g, const Word& h);

/// The g-invariant geodesic line through the conjugator u of g = u c u^-1.
/// Vertex t is u·(first t letters of c^∞) for t >= 0 and u·(first -t letters
/// of c^-∞) for t < 0, so |vertex(t)| = |u| + |t|.
class Axis {
 public:
  explicit Axis(const Word& g);

  Word vertex(long t) const;
  /// Parameter of v on the axis, if v lies on it.
  std::optional<long> parameter(const Word& v) const;
  bool contains(const Word& v) const { return parameter(v).has_value(); }
  std::size_t translation() const { return core_letters_.size(); }
  const Word& core() const { return core_; }
  const Word& conjugator() const { return conjugator_; }

 private:
  Word core_;
  Word conjugator_;
  std::vector<Letter> core_letters_;
};

struct ProjectionResult {
  bool unbounded = false;   ///< h ∈ E(g): h·axis = axis
  std::size_t diameter = 0;
  /// Endpoints of the projection of h·axis(g) onto axis(g) (equal when the
  /// projection is a single vertex).
  Word first;
  Word last;
};

/// Diameter of the nearest-point projection of h·axis(g) onto axis(g).
ProjectionResult projection_diameter(const Word& g, const Word& h);

/// c2·λ² + c1·λ + c0
struct Quadratic {
  Rational c2, c1, c0;
  Rational operator()(const Rational& x) const { return (c2 * x + c1) * x + c0; }
};

/// Constants of the admissible-path argument. μ(λ') and ε(λ') are evaluated
/// at the quasi-geodesic constant in use (λ or 1). σ and ν are derived:
///   σ(U) = (3/2)·Q3(λ) + 2U,    ν(U) = 2U + Q2(λ)(1 + [g]).
struct ConstantProvider {
  Rational delta = 0;
  Quadratic q1{1, 1, 0};
  Quadratic q2{1, 1, 0};
  Quadratic q3{1, 1, 0};
  Quadratic mu{1, 1, 0};
  Quadratic epsilon{1, 1, 0};
  Rational c_prime = 1;
  Rational d0 = 1;

  static ConstantProvider tree_default() { return {}; }
  /// μ = ε = 1 and Q_i(λ) = λ: the minimal substitution check.
  static ConstantProvider trivial();
  /// Flat `key=value` lines; quadratics as `c2,c1,c0`. `#` starts a comment.
  static ConstantProvider parse(std::string_view text);
  std::string serialize() const;

  Rational sigma(const Rational& lambda, const Rational& u) const;
  Rational nu(const Rational& lambda, const Rational& u, const Rational& displacement) const;
  bool nonnegative() const;
};

struct CascadeReport {
  Rational lambda;
  Rational g_length;
  Rational displacement;  ///< [g]
  Rational mu_lambda, epsilon_lambda, mu_one, epsilon_one;
  Rational sigma_zero, sigma_mu_one, nu_term;
  Rational c_lambda;   ///< C_{λ,0}
  Rational b_lambda;   ///< B_{λ,0}
  Rational r;          ///< R
  Rational big_lambda; ///< Λ = λ(6R + 1)
  Rational d;          ///< D
  Rational threshold;  ///< λ·D
};

CascadeReport constant_cascade(const Rational& lambda, const Rational& g_length, const ConstantProvider& provider,
                               const Rational& displacement = 1);

/// λ = d(g·e, e) / τ(g) = |g| / [g] on the tree.
Rational quasi_axis_constant(const Word& g);

struct PathVertex {
  Word vertex;
  std::uint64_t path_length = 0;  ///< along the path from e
};

struct PathReport {
  Word product;
  bool nontrivial = false;
  std::vector<PathVertex> breakpoints;
  std::optional<Rational> lambda_empirical;  ///< empty if two breakpoints coincide
  CascadeReport cascade;
  bool above_threshold = false;  ///< every |n_i| >= λD (n_m may be 0)
  bool quasi_geodesic_consistent = true;  ///< Λ_emp <= Λ whenever above_threshold
};

/// Throws HypothesisViolation if g = e, sizes differ, some h_i ∈ E(g),
/// |h_i| > |g|, or n_i = 0 for i < m.
PathReport admissible_path_check(const Word& g, const std::vector<Word>& h_list, const std::vector<long>& n_list,
                                 const ConstantProvider& provider, std::uint64_t max_breakpoints = 4096);

struct SearchOptions {
  unsigned exponent_cap = 0;  ///< 0 selects m·(h_radius + |g|) + 4
  std::uint64_t budget = 50'000'000;
  unsigned threads = 1;
};

struct SearchReport {
  unsigned n_empirical = 1;
  Rational threshold;
  unsigned exponent_cap = 0;
  std::uint64_t candidates = 0;  ///< |B(r) \ E(g)|
  std::uint64_t products_checked = 0;
  std::uint64_t trivial_products = 0;
  /// A trivial product attaining the largest min |n_i| (h's then n's).
  std::vector<Word> witness_h;
  std::vector<long> witness_n;
  bool within_threshold = true;
};

/// Smallest N such that every h_1 g^{n_1} ... h_m g^{n_m} with h_i in
/// B(h_radius) \ E(g) and N <= |n_i| <= exponent_cap is nontrivial.
SearchReport minimal_exponent_search(const GroupContext& ctx, const Word& g, unsigned h_radius, unsigned m,
                                     const ConstantProvider& provider, const SearchOptions& options = {});

}  // namespace selfnorm
