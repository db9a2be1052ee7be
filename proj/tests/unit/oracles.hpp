#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library's algebra or geometry routines beyond
// word construction, so they can catch errors there.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <map>
#include <random>
#include <vector>

#include "selfnorm/words.hpp"

namespace oracle {

using selfnorm::Letter;
using Letters = std::vector<Letter>;

/// Free reduction by a stack.
inline Letters reduce(const Letters& in) {
  Letters out;
  for (Letter l : in) {
    if (!out.empty() && out.back() == -l) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  return out;
}

inline Letters concat(const Letters& a, const Letters& b) {
  Letters c = a;
  c.insert(c.end(), b.begin(), b.end());
  return reduce(c);
}

inline Letters inverse(const Letters& a) {
  Letters r(a.rbegin(), a.rend());
  for (auto& l : r) l = -l;
  return r;
}

/// Uniform random reduced word of exactly `length` letters over `rank` generators.
inline Letters random_reduced(std::mt19937_64& rng, unsigned rank, unsigned length) {
  Letters w;
  std::uniform_int_distribution<unsigned> pick(0, 2 * rank - 1);
  while (w.size() < length) {
    const unsigned r = pick(rng);
    const Letter l = static_cast<Letter>(r / 2 + 1) * (r % 2 ? -1 : 1);
    if (!w.empty() && w.back() == -l) continue;
    w.push_back(l);
  }
  return w;
}

inline selfnorm::Word to_word(const selfnorm::GroupContext& ctx, const Letters& l) {
  return selfnorm::Word::from_letters(ctx.fingerprint(), l);
}

/// Sparse element as map from reduced letter sequence to coefficient.
using NaiveElement = std::map<Letters, mpq_class>;

inline NaiveElement naive_convolve(const NaiveElement& x, const NaiveElement& y) {
  NaiveElement out;
  for (const auto& [u, a] : x)
    for (const auto& [v, b] : y) out[concat(u, v)] += a * b;
  for (auto it = out.begin(); it != out.end();) it = (it->second == 0) ? out.erase(it) : std::next(it);
  return out;
}

inline mpq_class naive_l2_squared(const NaiveElement& x) {
  mpq_class s = 0;
  for (const auto& [w, c] : x) s += c * c;
  return s;
}

/// Closed walks of length `steps` from the root of the (2k)-regular tree:
/// dynamic programming over the distance to the root.
inline mpz_class closed_walks(unsigned degree, unsigned steps) {
  std::vector<mpz_class> at(steps + 2, 0);
  at[0] = 1;
  for (unsigned s = 0; s < steps; ++s) {
    std::vector<mpz_class> next(steps + 2, 0);
    for (unsigned d = 0; d <= s && d + 1 < at.size(); ++d) {
      if (at[d] == 0) continue;
      if (d == 0) {
        next[1] += at[0] * degree;
      } else {
        next[d - 1] += at[d];
        next[d + 1] += at[d] * (degree - 1);
      }
    }
    at.swap(next);
  }
  return at[0];
}

/// Visits every v in B(radius) together with |v^-1 g v|, by a depth-first
/// walk that conjugates one letter at a time on a double-ended buffer.
template <class Visit>
void for_each_conjugate(unsigned rank, unsigned radius, const Letters& g, Visit&& visit) {
  const Letters g_red = reduce(g);
  std::vector<Letter> buf(g_red.size() + 2 * radius + 4, 0);
  std::size_t b = radius + 2;
  std::size_t e = b;
  for (Letter l : g_red) buf[e++] = l;
  Letters v;
  auto rec = [&](auto&& self) -> void {
    visit(static_cast<const Letters&>(v), e - b);
    if (v.size() == radius) return;
    for (unsigned gen = 1; gen <= rank; ++gen) {
      for (Letter l : {static_cast<Letter>(gen), -static_cast<Letter>(gen)}) {
        if (!v.empty() && v.back() == -l) continue;
        // (v l)^-1 g (v l) = l^-1 (conj) l
        const std::size_t saved_b = b, saved_e = e;
        Letter saved_front = 0, saved_back = 0;
        if (e > b && buf[b] == l) {
          ++b;
        } else {
          saved_front = buf[b - 1];
          buf[--b] = -l;
        }
        if (e > b && buf[e - 1] == -l) {
          --e;
        } else {
          saved_back = buf[e];
          buf[e++] = l;
        }
        v.push_back(l);
        self(self);
        v.pop_back();
        if (e == saved_e + 1) buf[saved_e] = saved_back;
        if (b + 1 == saved_b) buf[saved_b - 1] = saved_front;
        b = saved_b;
        e = saved_e;
      }
    }
  };
  rec(rec);
}

/// min over v in B(radius) of |v^-1 g v|.
inline std::size_t brute_translation_length(unsigned rank, unsigned radius, const Letters& g) {
  std::size_t best = reduce(g).size();
  for_each_conjugate(rank, radius, g, [&](const Letters&, std::size_t c) { best = std::min(best, c); });
  return best;
}

/// Every word of B(radius), as letter sequences.
inline std::vector<Letters> ball(unsigned rank, unsigned radius) {
  std::vector<Letters> out;
  for_each_conjugate(rank, radius, Letters{}, [&](const Letters& v, std::size_t) { out.push_back(v); });
  return out;
}

inline std::size_t distance(const Letters& u, const Letters& v) { return concat(inverse(u), v).size(); }

/// Brute-force projection diameter of h·axis(g) onto axis(g) inside B(radius).
/// Axis vertices are the v with |v^-1 g v| = [g]; the translated axis is the
/// axis of h g h^-1. Returns -1 when the two lines agree inside the ball.
/// Nearest points are taken for translated-axis vertices of length <= near_radius.
inline long brute_projection_diameter(unsigned rank, unsigned radius, unsigned near_radius, const Letters& g,
                                      const Letters& h) {
  const std::size_t tau = brute_translation_length(rank, radius, g);
  const Letters hg = concat(concat(h, g), inverse(h));
  std::vector<Letters> axis, moved;
  for_each_conjugate(rank, radius, g, [&](const Letters& v, std::size_t c) {
    if (c == tau) axis.push_back(v);
  });
  for_each_conjugate(rank, radius, hg, [&](const Letters& v, std::size_t c) {
    if (c == tau) moved.push_back(v);
  });
  std::sort(axis.begin(), axis.end());
  std::sort(moved.begin(), moved.end());
  if (axis == moved) return -1;
  std::vector<Letters> projection;
  std::set_intersection(axis.begin(), axis.end(), moved.begin(), moved.end(), std::back_inserter(projection));
  for (const auto& w : moved) {
    if (w.size() > near_radius) continue;
    const Letters* best = nullptr;
    std::size_t best_d = SIZE_MAX;
    for (const auto& v : axis) {
      const std::size_t d = distance(w, v);
      if (d < best_d) {
        best_d = d;
        best = &v;
      }
    }
    projection.push_back(*best);
  }
  long diameter = 0;
  for (const auto& p : projection)
    for (const auto& q : projection) diameter = std::max(diameter, static_cast<long>(distance(p, q)));
  return diameter;
}

}  // namespace oracle
