// Copyright 2026 The bosondist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Distinguishability functions on permutations, cycle structure, derangement
// counts and the cycle-index generating function.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "bosondist/errors.hpp"

namespace bosondist {

struct NoiseParams {
  double eta = 1.0;  // uniform transmission
  double xi = 1.0;   // uniform distinguishability
  double nu = 0.0;   // dark-count rate per detector

  void validate() const {
    detail::require(eta >= 0.0 && eta <= 1.0, "NoiseParams: eta must lie in [0, 1]");
    detail::require(xi >= 0.0 && xi <= 1.0, "NoiseParams: xi must lie in [0, 1]");
    detail::require(nu >= 0.0 && std::isfinite(nu), "NoiseParams: nu must be finite and >= 0");
  }
};

/// Bijection on {0, ..., n-1}; mapping()[k] is the image of k.
class Permutation {
 public:
  explicit Permutation(std::vector<int> mapping) : mapping_(std::move(mapping)) {
    std::vector<char> seen(mapping_.size(), 0);
    for (int v : mapping_) {
      detail::require(v >= 0 && static_cast<std::size_t>(v) < mapping_.size() && !seen[static_cast<std::size_t>(v)],
                      "Permutation: mapping is not a bijection");
      seen[static_cast<std::size_t>(v)] = 1;
    }
  }

  static Permutation identity(int n) {
    std::vector<int> m(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) m[static_cast<std::size_t>(k)] = k;
    return Permutation(std::move(m));
  }

  int size() const { return static_cast<int>(mapping_.size()); }
  int operator[](int k) const { return mapping_[static_cast<std::size_t>(k)]; }
  std::span<const int> mapping() const { return mapping_; }

 private:
  std::vector<int> mapping_;
};

struct CycleSummary {
  int fixed_points = 0;
  int longest = 0;
};

// Unchecked: `mapping` must be a bijection.
inline CycleSummary summarize_cycles(std::span<const int> mapping) {
  const auto n = mapping.size();
  std::vector<char> seen(n, 0);
  CycleSummary out;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    int len = 0;
    for (auto k = start; !seen[k]; k = static_cast<std::size_t>(mapping[k])) {
      seen[k] = 1;
      ++len;
    }
    if (len == 1) ++out.fixed_points;
    out.longest = std::max(out.longest, len);
  }
  return out;
}

/// (c_1, ..., c_n): c_l is the number of l-cycles; element l-1 holds c_l.
inline std::vector<int> cycle_type(const Permutation& p) {
  const auto n = static_cast<std::size_t>(p.size());
  std::vector<int> counts(n, 0);
  std::vector<char> seen(n, 0);
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::size_t len = 0;
    for (auto k = start; !seen[k]; k = static_cast<std::size_t>(p[static_cast<int>(k)])) {
      seen[k] = 1;
      ++len;
    }
    ++counts[len - 1];
  }
  return counts;
}

/// J (full), J^(K) (reduced: at least n-K fixed points) or J_+^(K)
/// (cycle_plus: no cycle longer than K), all with the uniform weight
/// xi^{n - c_1}.
struct DistinguishabilityModel {
  enum class Kind { full, reduced, cycle_plus };

  Kind kind = Kind::full;
  int cutoff = 0;
  double xi = 1.0;

  static DistinguishabilityModel full(double xi) { return {Kind::full, 0, xi}; }
  static DistinguishabilityModel reduced(int k, double xi) { return {Kind::reduced, k, xi}; }
  static DistinguishabilityModel cycle_plus(int k, double xi) { return {Kind::cycle_plus, k, xi}; }

  double weight(const CycleSummary& c, int n) const {
    if (kind == Kind::reduced && c.fixed_points < n - cutoff) return 0.0;
    if (kind == Kind::cycle_plus && c.longest > cutoff && c.longest > 1) return 0.0;
    const int moved = n - c.fixed_points;
    // 0^0 = 1: the identity always carries weight one.
    return moved == 0 ? 1.0 : std::pow(xi, moved);
  }
};

inline double evaluate_j(const DistinguishabilityModel& model, const Permutation& p, int n) {
  detail::require(p.size() == n, "evaluate_j: permutation size differs from n");
  return model.weight(summarize_cycles(p.mapping()), n);
}

/// Maps a permutation (as its 0-based mapping) to a weight.
using PermutationEvaluator = std::function<double(std::span<const int>)>;

inline PermutationEvaluator make_evaluator(DistinguishabilityModel model) {
  detail::require(model.cutoff >= 0, "make_evaluator: cutoff must be >= 0");
  return [model](std::span<const int> mapping) {
    return model.weight(summarize_cycles(mapping), static_cast<int>(mapping.size()));
  };
}

inline constexpr int kExactFactorialLimit = 20;

inline std::uint64_t factorial(int m) {
  detail::require(m >= 0, "factorial: negative argument");
  if (m > kExactFactorialLimit) throw resource_error("factorial: " + std::to_string(m) + "! overflows 64 bits");
  std::uint64_t f = 1;
  for (int k = 2; k <= m; ++k) f *= static_cast<std::uint64_t>(k);
  return f;
}

/// d_m, the number of fixed-point-free permutations of m elements, from
/// d_m = (m-1)(d_{m-1} + d_{m-2}). Exact through m = 20; larger m is refused
/// (use derangement_ratio).
inline std::uint64_t derangements(int m) {
  detail::require(m >= 0, "derangements: m must be >= 0");
  if (m > kExactFactorialLimit) {
    throw resource_error("derangements: d_" + std::to_string(m) + " overflows 64 bits");
  }
  std::uint64_t prev = 1;  // d_0
  if (m == 0) return prev;
  std::uint64_t cur = 0;  // d_1
  for (int k = 2; k <= m; ++k) {
    const std::uint64_t next = static_cast<std::uint64_t>(k - 1) * (cur + prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// d_m / m! in double precision for any m >= 0. Above the exact range this is
/// e^{-1} + R_m with the remainder summed from its alternating tail.
inline double derangement_ratio(int m) {
  detail::require(m >= 0, "derangement_ratio: m must be >= 0");
  if (m <= kExactFactorialLimit) {
    return static_cast<double>(derangements(m)) / static_cast<double>(factorial(m));
  }
  // R_m = -sum_{s > m} (-1)^s / s!
  double term = 1.0;
  for (int s = 1; s <= m + 1; ++s) {
    term /= s;
    if (term == 0.0) break;
  }
  if ((m + 1) % 2 == 1) term = -term;
  double tail = 0.0;
  for (int s = m + 1; term != 0.0 && s < m + 40; ++s) {
    tail += term;
    term = -term / (s + 1);
  }
  return std::exp(-1.0) - tail;
}

/// d_m^(K): derangements of m elements whose cycles all have length <= k,
/// i.e. m! [X^m] exp(sum_{l=2}^{k} X^l / l). The series exponential satisfies
/// a_m = sum_l (m-1)!/(m-l)! a_{m-l}, which keeps everything in integers.
inline std::uint64_t derangements_bounded_cycles(int m, int k) {
  detail::require(m >= 0, "derangements_bounded_cycles: m must be >= 0");
  detail::require(k >= 1, "derangements_bounded_cycles: k must be >= 1");
  if (m > kExactFactorialLimit) {
    throw resource_error("derangements_bounded_cycles: m above " + std::to_string(kExactFactorialLimit));
  }
  std::vector<std::uint64_t> a(static_cast<std::size_t>(m) + 1, 0);
  a[0] = 1;
  for (int n = 1; n <= m; ++n) {
    std::uint64_t total = 0;
    std::uint64_t arrangements = 1;  // (n-1)!/(n-l)!
    for (int l = 2; l <= std::min(k, n); ++l) {
      arrangements *= static_cast<std::uint64_t>(n - l + 1);
      total += arrangements * a[static_cast<std::size_t>(n - l)];
    }
    a[static_cast<std::size_t>(n)] = total;
  }
  return a[static_cast<std::size_t>(m)];
}

/// Z_m(t_1..t_m) = sum over S_m of prod_l t_l^{c_l(sigma)}
///             = m! [X^m] exp(sum_l t_l X^l / l).
inline double cycle_sum(int m, std::span<const double> t) {
  detail::require(m >= 1, "cycle_sum: m must be >= 1");
  detail::require(static_cast<int>(t.size()) == m, "cycle_sum: need exactly m weights");
  std::vector<double> z(static_cast<std::size_t>(m) + 1, 0.0);
  z[0] = 1.0;
  for (int n = 1; n <= m; ++n) {
    double total = 0.0;
    double arrangements = 1.0;  // (n-1)!/(n-l)!
    for (int l = 1; l <= n; ++l) {
      if (l > 1) arrangements *= static_cast<double>(n - l + 1);
      total += arrangements * t[static_cast<std::size_t>(l - 1)] * z[static_cast<std::size_t>(n - l)];
    }
    z[static_cast<std::size_t>(n)] = total;
  }
  return z[static_cast<std::size_t>(m)];
}

}  // namespace bosondist
