#include "selfnorm/treegeo.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <climits>
#include <cstdlib>
#include <stdexcept>

#include "selfnorm/errors.hpp"
#include "selfnorm/parallel.hpp"

namespace selfnorm {

namespace {

Rational max_of(std::initializer_list<Rational> values) {
  Rational best = *values.begin();
  for (const auto& v : values)
    if (v > best) best = v;
  return best;
}

Rational parse_rational(std::string_view text, std::size_t offset) {
  std::string s(text);
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  Rational q;
  if (s.empty() || q.set_str(s, 10) != 0 || sgn(q.get_den()) == 0)
    throw ParseError("expected rational, got '" + std::string(text) + "'", offset);
  q.canonicalize();
  return q;
}

Quadratic parse_quadratic(std::string_view text, std::size_t offset) {
  std::vector<Rational> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    parts.push_back(parse_rational(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos),
                                   offset + pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (parts.size() != 3) throw ParseError("quadratic needs three coefficients c2,c1,c0", offset);
  return {parts[0], parts[1], parts[2]};
}

std::string format_quadratic(const Quadratic& q) {
  return q.c2.get_str() + "," + q.c1.get_str() + "," + q.c0.get_str();
}

// Nearest axis vertices to w. |t| <= 2|w| holds for every minimizer because
// d(w, v_t) >= |u| + |t| - |w| while d(w, v_0) <= |w| + |u|.
std::vector<long> nearest_parameters(const Axis& axis, const Word& w) {
  const long window = 2 * static_cast<long>(w.length()) + 1;
  std::size_t best = SIZE_MAX;
  std::vector<long> params;
  for (long t = -window; t <= window; ++t) {
    const std::size_t d = tree_distance(w, axis.vertex(t));
    if (d < best) {
      best = d;
      params.clear();
    }
    if (d == best) params.push_back(t);
  }
  return params;
}

}  // namespace

std::size_t translation_length(const Word& g) { return cyclic_reduce(g).core.length(); }

std::size_t tree_distance(const Word& u, const Word& v) { return multiply(invert(u), v).length(); }

StableLength stable_length(const Word& g, const std::vector<unsigned>& samples) {
  if (g.is_identity()) throw HypothesisViolation("stable_length: identity is not loxodromic");
  StableLength s;
  s.exact = translation_length(g);
  for (unsigned n : samples) {
    if (n == 0) throw HypothesisViolation("stable_length: sample sizes must be positive");
    Rational q(static_cast<unsigned long>(power(g, n).length()), n);
    q.canonicalize();
    s.empirical.emplace_back(n, q);
  }
  return s;
}

bool elementary_membership(const Word& g, const Word& h) {
  if (g.is_identity()) throw HypothesisViolation("elementary_membership: g must be nontrivial");
  require_same_context(g.context(), h.context());
  if (h.is_identity()) return true;
  const Word root = primitive_root(g).root;
  const Word h_root = primitive_root(h).root;
  return h_root == root || h_root == invert(root);
}

// ---------------------------------------------------------------- Axis

Axis::Axis(const Word& g) {
  if (g.is_identity()) throw HypothesisViolation("axis: identity has no axis");
  auto [core, conjugator] = cyclic_reduce(g);
  core_ = std::move(core);
  conjugator_ = std::move(conjugator);
  core_letters_ = core_.letters();
}

Word Axis::vertex(long t) const {
  const std::size_t len = core_letters_.size();
  const std::size_t steps = static_cast<std::size_t>(t < 0 ? -t : t);
  std::vector<Letter> path;
  path.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    path.push_back(t >= 0 ? core_letters_[i % len] : -core_letters_[len - 1 - (i % len)]);
  }
  return multiply(conjugator_, Word::from_letters(conjugator_.context(), path));
}

std::optional<long> Axis::parameter(const Word& v) const {
  const auto rel = multiply(invert(conjugator_), v).letters();
  const std::size_t len = core_letters_.size();
  bool forward = true;
  bool backward = true;
  for (std::size_t i = 0; i < rel.size(); ++i) {
    forward = forward && rel[i] == core_letters_[i % len];
    backward = backward && rel[i] == -core_letters_[len - 1 - (i % len)];
  }
  if (forward) return static_cast<long>(rel.size());
  if (backward) return -static_cast<long>(rel.size());
  return std::nullopt;
}

ProjectionResult projection_diameter(const Word& g, const Word& h) {
  ProjectionResult result;
  if (elementary_membership(g, h)) {
    result.unbounded = true;
    return result;
  }
  const Axis axis(g);
  const Word h_inv = invert(h);
  // L ∩ hL has fewer than 2[g] edges (otherwise g and hgh^-1 would commute)
  // and its point nearest e is within |h| + |u| of e, so every shared vertex
  // has |t| <= |h| + 2[g].
  const long window = static_cast<long>(h.length() + 2 * axis.translation()) + 1;
  std::optional<long> lo, hi;
  for (long t = -window; t <= window; ++t) {
    if (!axis.contains(multiply(h_inv, axis.vertex(t)))) continue;
    if (hi && *hi != t - 1) throw std::logic_error("projection_diameter: axis intersection is not connected");
    if (!lo) lo = t;
    hi = t;
  }
  if (lo) {
    result.first = axis.vertex(*lo);
    result.last = axis.vertex(*hi);
    result.diameter = static_cast<std::size_t>(*hi - *lo);
    return result;
  }
  // Disjoint lines: all of hL projects to one vertex, the foot of the bridge.
  const std::vector<long> foot = nearest_parameters(axis, multiply(h, axis.conjugator()));
  result.first = result.last = axis.vertex(foot.front());
  result.diameter = 0;
  return result;
}

// ---------------------------------------------------------------- constants

ConstantProvider ConstantProvider::trivial() {
  ConstantProvider p;
  p.q1 = p.q2 = p.q3 = Quadratic{0, 1, 0};
  p.mu = p.epsilon = Quadratic{0, 0, 1};
  return p;
}

ConstantProvider ConstantProvider::parse(std::string_view text) {
  ConstantProvider p;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t')) line.remove_suffix(1);
    std::size_t lead = 0;
    while (lead < line.size() && (line[lead] == ' ' || line[lead] == '\t')) ++lead;
    line.remove_prefix(lead);
    if (!line.empty()) {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected key=value in provider", pos + lead);
      std::string_view key = line.substr(0, eq);
      while (!key.empty() && key.back() == ' ') key.remove_suffix(1);
      const std::string_view value = line.substr(eq + 1);
      const std::size_t at = pos + lead + eq + 1;
      if (key == "delta") {
        p.delta = parse_rational(value, at);
      } else if (key == "Q1") {
        p.q1 = parse_quadratic(value, at);
      } else if (key == "Q2") {
        p.q2 = parse_quadratic(value, at);
      } else if (key == "Q3") {
        p.q3 = parse_quadratic(value, at);
      } else if (key == "mu") {
        p.mu = parse_quadratic(value, at);
      } else if (key == "epsilon") {
        p.epsilon = parse_quadratic(value, at);
      } else if (key == "Cprime") {
        p.c_prime = parse_rational(value, at);
      } else if (key == "D0") {
        p.d0 = parse_rational(value, at);
      } else {
        throw ParseError("unknown provider key '" + std::string(key) + "'", pos + lead);
      }
    }
    pos = end + 1;
  }
  if (!p.nonnegative()) throw HypothesisViolation("provider constants must be nonnegative");
  return p;
}

std::string ConstantProvider::serialize() const {
  std::ostringstream out;
  out << "delta=" << delta.get_str() << "\n"
      << "Q1=" << format_quadratic(q1) << "\n"
      << "Q2=" << format_quadratic(q2) << "\n"
      << "Q3=" << format_quadratic(q3) << "\n"
      << "mu=" << format_quadratic(mu) << "\n"
      << "epsilon=" << format_quadratic(epsilon) << "\n"
      << "Cprime=" << c_prime.get_str() << "\n"
      << "D0=" << d0.get_str() << "\n";
  return out.str();
}

Rational ConstantProvider::sigma(const Rational& lambda, const Rational& u) const {
  return Rational(3, 2) * q3(lambda) + 2 * u;
}

Rational ConstantProvider::nu(const Rational& lambda, const Rational& u, const Rational& displacement) const {
  return 2 * u + q2(lambda) * (1 + displacement);
}

bool ConstantProvider::nonnegative() const {
  const auto quad_ok = [](const Quadratic& q) { return sgn(q.c2) >= 0 && sgn(q.c1) >= 0 && sgn(q.c0) >= 0; };
  return sgn(delta) >= 0 && quad_ok(q1) && quad_ok(q2) && quad_ok(q3) && quad_ok(mu) && quad_ok(epsilon) &&
         sgn(c_prime) >= 0 && sgn(d0) >= 0;
}

CascadeReport constant_cascade(const Rational& lambda, const Rational& g_length, const ConstantProvider& provider,
                               const Rational& displacement) {
  if (sgn(lambda) < 0 || sgn(g_length) < 0 || sgn(displacement) < 0)
    throw HypothesisViolation("constant_cascade: inputs must be nonnegative");
  CascadeReport c;
  c.lambda = lambda;
  c.g_length = g_length;
  c.displacement = displacement;
  const Rational one(1);
  const Rational cg = provider.c_prime * g_length;
  c.mu_lambda = provider.mu(lambda);
  c.epsilon_lambda = provider.epsilon(lambda);
  c.mu_one = provider.mu(one);
  c.epsilon_one = provider.epsilon(one);
  c.sigma_zero = provider.sigma(lambda, 0);
  c.sigma_mu_one = provider.sigma(lambda, c.mu_one);
  c.nu_term = provider.nu(lambda, c.mu_one + c.sigma_zero, displacement);

  c.c_lambda = lambda * (c.mu_lambda + c.epsilon_lambda + cg);
  c.b_lambda = 2 * c.epsilon_one + 2 * c.mu_one + c.nu_term + cg;
  c.r = max_of({cg + 2 * c.epsilon_one + 4 * c.mu_one + 1, c.mu_one + 5 * c.epsilon_one + c.b_lambda + 1});
  c.big_lambda = lambda * (6 * c.r + 1);
  c.d = max_of({c.mu_one + c.epsilon_one + cg + c.c_lambda, 2 * cg + 3 * c.epsilon_one + 6 * c.mu_one,
                c.big_lambda * (c.r + c.sigma_mu_one), 13 * c.epsilon_one + 6 * c.mu_one + 2 * c.b_lambda});
  c.threshold = lambda * c.d;
  return c;
}

Rational quasi_axis_constant(const Word& g) {
  const std::size_t tau = translation_length(g);
  if (tau == 0) throw HypothesisViolation("quasi_axis_constant: g must be loxodromic");
  Rational q(static_cast<unsigned long>(g.length()), static_cast<unsigned long>(tau));
  q.canonicalize();
  return q;
}

// ---------------------------------------------------------------- paths

PathReport admissible_path_check(const Word& g, const std::vector<Word>& h_list, const std::vector<long>& n_list,
                                 const ConstantProvider& provider, std::uint64_t max_breakpoints) {
  if (g.is_identity()) throw HypothesisViolation("admissible_path_check: g must be loxodromic");
  if (h_list.empty() || h_list.size() != n_list.size())
    throw HypothesisViolation("admissible_path_check: need equally many h_i and n_i (at least one)");
  const std::size_t m = h_list.size();
  std::uint64_t vertices = 1 + m;
  for (std::size_t i = 0; i < m; ++i) {
    const std::string idx = std::to_string(i + 1);
    if (elementary_membership(g, h_list[i]))
      throw HypothesisViolation("admissible_path_check: h_" + idx + " lies in E(g)");
    if (h_list[i].length() > g.length())
      throw HypothesisViolation("admissible_path_check: |h_" + idx + "| exceeds |g|");
    if (n_list[i] == 0 && i + 1 < m)
      throw HypothesisViolation("admissible_path_check: n_" + idx + " is zero");
    vertices += static_cast<std::uint64_t>(n_list[i] < 0 ? -n_list[i] : n_list[i]);
  }
  if (vertices > max_breakpoints) throw BudgetExceeded("admissible path breakpoints", vertices, max_breakpoints);

  PathReport report;
  // Letters traversed between consecutive breakpoints.
  std::vector<std::vector<Letter>> steps;
  const std::vector<Letter> g_letters = g.letters();
  const std::vector<Letter> g_inv_letters = invert(g).letters();
  Word position = Word::from_letters(g.context(), {});
  std::uint64_t travelled = 0;
  report.breakpoints.push_back({position, 0});
  const Word g_inv = invert(g);
  for (std::size_t i = 0; i < m; ++i) {
    position = multiply(position, h_list[i]);
    travelled += h_list[i].length();
    report.breakpoints.push_back({position, travelled});
    steps.push_back(h_list[i].letters());
    const Word& step = n_list[i] < 0 ? g_inv : g;
    for (long k = 0; k < (n_list[i] < 0 ? -n_list[i] : n_list[i]); ++k) {
      position = multiply(position, step);
      travelled += g.length();
      report.breakpoints.push_back({position, travelled});
      steps.push_back(n_list[i] < 0 ? g_inv_letters : g_letters);
    }
  }
  report.product = position;
  report.nontrivial = !position.is_identity();

  // d(v_i, v_j) = |v_i^-1 v_j| is tracked incrementally by pushing the step
  // letters after breakpoint i onto a reducing stack.
  Rational worst(1);
  bool degenerate = false;
  const auto& bp = report.breakpoints;
  std::vector<Letter> stack;
  for (std::size_t i = 0; i < bp.size() && !degenerate; ++i) {
    stack.clear();
    for (std::size_t j = i + 1; j < bp.size(); ++j) {
      for (Letter l : steps[j - 1]) push_reduced(stack, l);
      const std::size_t d = stack.size();
      const std::uint64_t along = bp[j].path_length - bp[i].path_length;
      if (d == 0) {
        if (along > 0) {
          degenerate = true;
          break;
        }
        continue;
      }
      Rational ratio(static_cast<unsigned long>(along), static_cast<unsigned long>(d));
      ratio.canonicalize();
      if (ratio > worst) worst = ratio;
    }
  }
  if (!degenerate) report.lambda_empirical = worst;

  const Rational lambda = quasi_axis_constant(g);
  report.cascade = constant_cascade(lambda, Rational(static_cast<unsigned long>(g.length())), provider,
                                    Rational(static_cast<unsigned long>(translation_length(g))));
  report.above_threshold = true;
  for (std::size_t i = 0; i < m; ++i) {
    const Rational magnitude(n_list[i] < 0 ? -n_list[i] : n_list[i]);
    if (i + 1 == m && n_list[i] == 0) continue;
    if (magnitude < report.cascade.threshold) report.above_threshold = false;
  }
  report.quasi_geodesic_consistent =
      !report.above_threshold || (report.lambda_empirical && *report.lambda_empirical <= report.cascade.big_lambda);
  return report;
}

SearchReport minimal_exponent_search(const GroupContext& ctx, const Word& g, unsigned h_radius, unsigned m,
                                     const ConstantProvider& provider, const SearchOptions& options) {
  require_same_context(ctx.fingerprint(), g.context());
  if (g.is_identity()) throw HypothesisViolation("minimal_exponent_search: g must be loxodromic");
  if (m == 0) throw HypothesisViolation("minimal_exponent_search: m must be positive");

  SearchReport report;
  report.exponent_cap =
      options.exponent_cap != 0 ? options.exponent_cap : m * (h_radius + static_cast<unsigned>(g.length())) + 4;
  const Rational lambda = quasi_axis_constant(g);
  report.threshold = constant_cascade(lambda, Rational(static_cast<unsigned long>(g.length())), provider,
                                      Rational(static_cast<unsigned long>(translation_length(g))))
                         .threshold;

  std::vector<Word> candidates;
  for (const Word& h : enumerate_ball(ctx, h_radius, options.budget))
    if (!elementary_membership(g, h)) candidates.push_back(h);
  report.candidates = candidates.size();

  std::vector<long> exponents;
  for (long e = -static_cast<long>(report.exponent_cap); e <= static_cast<long>(report.exponent_cap); ++e)
    if (e != 0) exponents.push_back(e);
  std::vector<Word> g_powers;
  for (long e : exponents) g_powers.push_back(power(g, e));

  // Mixed-radix index: h digits first, then exponent digits.
  std::uint64_t total = 1;
  const auto times = [&](std::uint64_t factor) {
    if (factor != 0 && total > options.budget / factor + 1) throw BudgetExceeded("exponent search", UINT64_MAX, options.budget);
    total *= factor;
  };
  for (unsigned i = 0; i < m; ++i) times(candidates.size());
  for (unsigned i = 0; i < m; ++i) times(exponents.size());
  if (total > options.budget) throw BudgetExceeded("exponent search", total, options.budget);
  report.products_checked = total;

  struct ShardResult {
    std::uint64_t trivial = 0;
    long best_min = 0;
    std::uint64_t best_index = 0;
  };
  std::vector<ShardResult> shards(std::max(1u, options.threads));
  const auto decode = [&](std::uint64_t index, std::vector<std::size_t>& hs, std::vector<std::size_t>& es) {
    for (unsigned i = 0; i < m; ++i) {
      es[m - 1 - i] = index % exponents.size();
      index /= exponents.size();
    }
    for (unsigned i = 0; i < m; ++i) {
      hs[m - 1 - i] = index % candidates.size();
      index /= candidates.size();
    }
  };
  run_sharded(total, options.threads, [&](std::size_t shard, std::size_t begin, std::size_t end) {
    std::vector<std::size_t> hs(m), es(m);
    ShardResult& r = shards[shard];
    for (std::size_t index = begin; index < end; ++index) {
      decode(index, hs, es);
      Word product = Word::from_letters(ctx.fingerprint(), {});
      long min_exp = LONG_MAX;
      for (unsigned i = 0; i < m; ++i) {
        product = multiply(multiply(product, candidates[hs[i]]), g_powers[es[i]]);
        min_exp = std::min(min_exp, std::abs(exponents[es[i]]));
      }
      if (!product.is_identity()) continue;
      ++r.trivial;
      if (min_exp > r.best_min) {
        r.best_min = min_exp;
        r.best_index = index;
      }
    }
  });

  long best_min = 0;
  std::optional<std::uint64_t> best_index;
  for (const auto& r : shards) {
    report.trivial_products += r.trivial;
    if (r.best_min > best_min) {
      best_min = r.best_min;
      best_index = r.best_index;
    }
  }
  report.n_empirical = static_cast<unsigned>(best_min) + 1;
  if (best_index) {
    std::vector<std::size_t> hs(m), es(m);
    decode(*best_index, hs, es);
    for (unsigned i = 0; i < m; ++i) {
      report.witness_h.push_back(candidates[hs[i]]);
      report.witness_n.push_back(exponents[es[i]]);
    }
  }
  report.within_threshold = Rational(report.n_empirical) <= report.threshold;
  return report;
}

}  // namespace selfnorm
