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

// Closed-form Haar averages of the single-port no-count probability and its
// quantum/reduced difference, plus experiment-design estimators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "bosondist/errors.hpp"
#include "bosondist/noisemodel.hpp"

namespace bosondist {

struct AsymptoticParams {
  double rho = 0.5;  // N / M
  NoiseParams noise{};
  int cutoff = 0;

  void validate() const {
    detail::require(rho > 0.0 && rho <= 1.0, "AsymptoticParams: rho must lie in (0, 1]");
    detail::require(cutoff >= 0, "AsymptoticParams: K must be >= 0");
    noise.validate();
  }
};

inline constexpr int kVarianceCap = 100;

namespace detail {

inline void require_sizes(int n, int m, const char* what) {
  require(n >= 1, std::string(what) + ": N must be >= 1");
  require(m >= n, std::string(what) + ": M must be >= N");
}

// 1/j! for j = 0..n.
inline std::vector<double> inverse_factorials(int n) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 1.0);
  for (int j = 1; j <= n; ++j) out[static_cast<std::size_t>(j)] = out[static_cast<std::size_t>(j - 1)] / j;
  return out;
}

// c_n = (N)_n / M^{(n)} (-eta)^n for n = 0..N, built as a product of ratios <= 1.
inline std::vector<double> signed_pochhammer_ratios(int n_bosons, int m_modes, double eta) {
  std::vector<double> c(static_cast<std::size_t>(n_bosons) + 1, 1.0);
  for (int n = 1; n <= n_bosons; ++n) {
    c[static_cast<std::size_t>(n)] = c[static_cast<std::size_t>(n - 1)] *
                                     (static_cast<double>(n_bosons - n + 1) / (m_modes + n - 1)) * (-eta);
  }
  return c;
}

// a_n = sum_{m=K+1}^{n} (d_m / m!) xi^m / (n-m)!.
inline std::vector<double> derangement_weights(int n_bosons, int cutoff, double xi) {
  const auto inv = inverse_factorials(n_bosons);
  std::vector<double> ratio(static_cast<std::size_t>(n_bosons) + 1);
  for (int m = 0; m <= n_bosons; ++m) ratio[static_cast<std::size_t>(m)] = derangement_ratio(m);
  std::vector<double> a(static_cast<std::size_t>(n_bosons) + 1, 0.0);
  for (int n = cutoff + 1; n <= n_bosons; ++n) {
    double sum = 0.0;
    for (int m = cutoff + 1; m <= n; ++m) {
      sum += ratio[static_cast<std::size_t>(m)] * std::pow(xi, m) * inv[static_cast<std::size_t>(n - m)];
    }
    a[static_cast<std::size_t>(n)] = sum;
  }
  return a;
}

inline double log_falling(int n, int j) { return std::lgamma(n + 1.0) - std::lgamma(n - j + 1.0); }
inline double log_rising(int m, int j) { return std::lgamma(static_cast<double>(m) + j) - std::lgamma(m); }

}  // namespace detail

/// Haar average of Delta P_1 for N bosons in M modes.
inline double avg_delta_p1(int n, int m, const NoiseParams& noise, int k) {
  detail::require_sizes(n, m, "avg_delta_p1");
  noise.validate();
  detail::require(k >= 0 && k <= n, "avg_delta_p1: K must lie in [0, N]");
  if (k >= n) return 0.0;
  const auto c = detail::signed_pochhammer_ratios(n, m, noise.eta);
  const auto a = detail::derangement_weights(n, k, noise.xi);
  double total = 0.0;
  for (int j = k + 1; j <= n; ++j) total += c[static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(j)];
  return std::exp(-noise.nu) * total;
}

/// Leading-order Haar average of |Delta P_1|.
inline double w1(const AsymptoticParams& p) {
  p.validate();
  const double x = p.noise.xi * p.noise.eta * p.rho;
  return std::pow(x, p.cutoff + 1) / (1.0 + x) * std::exp(-1.0 - p.noise.nu - p.noise.eta * p.rho);
}

/// <(Delta P_1)^2> - <Delta P_1>^2 over the Haar measure.
inline double var_delta_p1_exact(int n, int m, const NoiseParams& noise, int k) {
  detail::require_sizes(n, m, "var_delta_p1_exact");
  noise.validate();
  detail::require(k >= 0 && k <= n, "var_delta_p1_exact: K must lie in [0, N]");
  if (n > kVarianceCap) {
    throw resource_error("var_delta_p1_exact: N = " + std::to_string(n) + " exceeds " + std::to_string(kVarianceCap));
  }
  if (k >= n) return 0.0;
  const auto a = detail::derangement_weights(n, k, noise.xi);

  auto theta = [&](int n1, int n2) {
    const double log_joint = detail::log_rising(m, n1 + n2);
    const double ratio = std::exp(log_joint - detail::log_rising(m, n1) - detail::log_rising(m, n2));
    double sum = 0.0;
    for (int s = 0; s <= std::min(n1, n2); ++s) {
      const int j = n1 + n2 - s;
      if (j > n) continue;  // (N)_j = 0
      const double log_term = detail::log_falling(n1, s) + detail::log_falling(n2, s) + detail::log_falling(n, j) -
                              std::lgamma(s + 1.0) - log_joint;
      sum += std::exp(log_term) * (std::ldexp(1.0, s) - ratio);
    }
    return sum;
  };

  double total = 0.0;
  for (int n1 = k + 1; n1 <= n; ++n1) {
    for (int n2 = k + 1; n2 <= n; ++n2) {
      const double sign = ((n1 + n2) % 2 == 0) ? 1.0 : -1.0;
      total += sign * std::pow(noise.eta, n1 + n2) * theta(n1, n2) * a[static_cast<std::size_t>(n1)] *
               a[static_cast<std::size_t>(n2)];
    }
  }
  return std::exp(-2.0 * noise.nu) * total;
}

/// Leading-order variance: W_1^2 (1 - rho) (K+1)^2 / N.
inline double var_delta_p1_asymptotic(int n, const AsymptoticParams& p) {
  detail::require(n >= 1, "var_delta_p1_asymptotic: N must be >= 1");
  const double w = w1(p);
  return w * w * (1.0 - p.rho) * (p.cutoff + 1.0) * (p.cutoff + 1.0) / n;
}

/// Haar average of P_1.
inline double avg_p1_exact(int n, int m, const NoiseParams& noise) {
  detail::require_sizes(n, m, "avg_p1_exact");
  noise.validate();
  const auto c = detail::signed_pochhammer_ratios(n, m, noise.eta);
  const auto inv = detail::inverse_factorials(n);
  double total = 0.0;
  for (int j = 0; j <= n; ++j) {
    double inner = 0.0;
    for (int s = 0; s <= j; ++s) {
      inner += std::pow(noise.xi, j - s) * std::pow(1.0 - noise.xi, s) * inv[static_cast<std::size_t>(s)];
    }
    total += c[static_cast<std::size_t>(j)] * inner;
  }
  return std::exp(-noise.nu) * total;
}

/// e^{-nu - rho eta (1 - xi)} / (1 + xi rho eta); accurate for rho eta << 1.
inline double avg_p1_approx(const AsymptoticParams& p) {
  p.validate();
  const double re = p.rho * p.noise.eta;
  return std::exp(-p.noise.nu - re * (1.0 - p.noise.xi)) / (1.0 + p.noise.xi * re);
}

inline double var_p1_asymptotic(int n, const AsymptoticParams& p) {
  detail::require(n >= 1, "var_p1_asymptotic: N must be >= 1");
  const double mean = avg_p1_approx(p);
  const double re = p.rho * p.noise.eta;
  const double shape = 1.0 - p.noise.xi + p.noise.xi / (1.0 + re * p.noise.xi);
  return mean * mean * re * re * (1.0 - p.rho) / n * shape * shape;
}

/// Distinguishable-particle no-count gap (1+rho)^{-L} - e^{-L rho}.
inline double classical_nocount_avg(double rho, int l) {
  detail::require(rho > 0.0 && rho <= 1.0, "classical_nocount_avg: rho must lie in (0, 1]");
  detail::require(l >= 1, "classical_nocount_avg: L must be >= 1");
  return std::pow(1.0 + rho, -l) - std::exp(-l * rho);
}

/// L maximizing the gap: int(1/rho).
inline int classical_nocount_argmax(double rho) {
  detail::require(rho > 0.0 && rho <= 1.0, "classical_nocount_argmax: rho must lie in (0, 1]");
  return std::max(1, static_cast<int>(std::floor(1.0 / rho + 1e-12)));
}

/// Samples needed to resolve P_1 to relative precision epsilon in units of W_1:
/// ceil(P_1 (1 - P_1) ((1 - alpha/2) / (epsilon W_1))^2).
inline std::uint64_t sample_count(double p1, double w1_value, double alpha, double epsilon) {
  detail::require(p1 >= 0.0 && p1 <= 1.0, "sample_count: P1 must lie in [0, 1]");
  detail::require(alpha > 0.0 && alpha < 1.0, "sample_count: alpha must lie in (0, 1)");
  detail::require(epsilon > 0.0, "sample_count: epsilon must be > 0");
  detail::require(w1_value >= 0.0 && std::isfinite(w1_value), "sample_count: W1 must be finite and >= 0");
  if (w1_value == 0.0) {
    throw indistinguishable_error("sample_count: W1 = 0, outputs are indistinguishable at this order");
  }
  const double q = (1.0 - alpha / 2.0) / (epsilon * w1_value);
  const double t = std::ceil(p1 * (1.0 - p1) * q * q);
  if (!(t < 9.2e18)) throw resource_error("sample_count: sample count exceeds 64 bits");
  return static_cast<std::uint64_t>(t);
}

/// Two-sided standard normal quantile z with P(|Z| <= z) = 1 - alpha.
inline double z_for_confidence(double alpha) {
  detail::require(alpha > 0.0 && alpha < 1.0, "z_for_confidence: alpha must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - alpha / 2.0);
}

/// (t_s + z^2/2) / (t + z^2).
inline double wilson_estimate(std::uint64_t t, std::uint64_t t_s, double z) {
  detail::require(t >= 1, "wilson_estimate: need at least one sample");
  detail::require(t_s <= t, "wilson_estimate: successes exceed samples");
  const double z2 = z * z;
  return (static_cast<double>(t_s) + z2 / 2.0) / (static_cast<double>(t) + z2);
}

/// Probability that no output mode holds more than s bosons.
inline double prob_max_occupancy(double rho, int m, int s) {
  detail::require(rho > 0.0, "prob_max_occupancy: rho must be > 0");
  detail::require(m >= 1, "prob_max_occupancy: M must be >= 1");
  detail::require(s >= 0, "prob_max_occupancy: s must be >= 0");
  const double tail = std::pow(rho / (1.0 + rho), s + 1);
  return std::exp(m * std::log1p(-tail));
}

/// Occupation s exceeded with probability at most delta.
inline double bunching_threshold(int n, double rho, double delta) {
  detail::require(n >= 1, "bunching_threshold: N must be >= 1");
  detail::require(rho > 0.0, "bunching_threshold: rho must be > 0");
  detail::require(delta > 0.0 && delta < 1.0, "bunching_threshold: delta must lie in (0, 1)");
  return std::log(n / (rho * delta)) / std::log((1.0 + rho) / rho);
}

/// Interference order ceil(r s) at which the cycle-bounded model reproduces
/// all r-th order output correlators with probability >= 1 - delta. The
/// order-of-magnitude constant is 1.
inline int correlator_evading_order(int r, int n, double rho, double delta) {
  detail::require(r >= 1, "correlator_evading_order: r must be >= 1");
  return static_cast<int>(std::ceil(r * bunching_threshold(n, rho, delta)));
}

/// K^2 < N.
inline bool order_below_sqrt(int k, int n) {
  return static_cast<std::int64_t>(k) * k < n;
}

}  // namespace bosondist
