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

// No-count probabilities on a set of probe ports: the probe matrix, exact P_L
// as one permanent, the exact quantum/reduced difference by inclusion and
// exclusion over fixed points, a brute-force oracle over S_N and a full
// output distribution for very small systems.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bosondist/errors.hpp"
#include "bosondist/interferometer.hpp"
#include "bosondist/matcore.hpp"
#include "bosondist/noisemodel.hpp"

namespace bosondist {

/// Bosons enter ports 0..n_bosons-1, one each. Indices are 0-based.
struct Setup {
  int n_bosons = 1;
  int n_modes = 1;
  int cutoff = 0;
  std::vector<int> probe_ports;

  int probe_count() const { return static_cast<int>(probe_ports.size()); }

  /// Probe ports {0, ..., l-1}.
  static Setup with_first_ports(int n, int m, int k, int l) {
    detail::require(l >= 0, "Setup: L must be >= 0");
    Setup s{n, m, k, std::vector<int>(static_cast<std::size_t>(l))};
    std::iota(s.probe_ports.begin(), s.probe_ports.end(), 0);
    s.validate();
    return s;
  }

  // A cutoff above N is accepted and behaves like K = N.
  void validate() const {
    detail::require(n_bosons >= 1, "Setup: N must be >= 1");
    detail::require(n_modes >= n_bosons, "Setup: M must be >= N");
    detail::require(cutoff >= 0, "Setup: K must be >= 0");
    detail::require(!probe_ports.empty(), "Setup: probe port set is empty");
    detail::require(probe_count() < n_modes, "Setup: need L < M probe ports");
    std::vector<int> sorted = probe_ports;
    std::sort(sorted.begin(), sorted.end());
    detail::require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                    "Setup: duplicate probe port");
    detail::require(sorted.front() >= 0 && sorted.back() < n_modes, "Setup: probe port out of range");
  }
};

struct ProbeMatrix {
  ComplexMatrix a;     // A
  ComplexMatrix a_xi;  // A(xi): off-diagonal entries scaled by xi
};

inline constexpr double kRealityTol = 1e-10;
inline constexpr double kSpectrumTol = 1e-10;
inline constexpr double kDefaultBudget = 68719476736.0;  // 2^36

struct KernelOptions {
  double budget = kDefaultBudget;  // limit on binom(N, K) * 2^K
  PermanentOptions permanent{};
};

namespace detail {

inline double real_checked(Complex z, const char* what) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw numeric_error(std::string(what) + ": non-finite result");
  }
  if (std::abs(z.imag()) > kRealityTol * (1.0 + std::abs(z.real()))) {
    throw numeric_error(std::string(what) + ": imaginary part " + std::to_string(z.imag()) +
                        " exceeds tolerance");
  }
  return z.real();
}

inline double probability_checked(double p, const char* what) {
  if (p < -kRealityTol || p > 1.0 + kRealityTol) {
    throw numeric_error(std::string(what) + ": probability " + std::to_string(p) + " outside [0, 1]");
  }
  return std::clamp(p, 0.0, 1.0);
}

/// Calls f(span) for every k-subset of {0..n-1} in lexicographic order.
template <typename F>
void for_each_combination(int n, int k, F&& f) {
  if (k < 0 || k > n) return;
  std::vector<int> c(static_cast<std::size_t>(k));
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    f(std::span<const int>(c));
    int i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return std::round(b);
}

// binom(N, K) * 2^K against the configured budget.
inline void check_budget(int n, int k, double budget, const char* what) {
  const double cost = binomial(n, k) * std::ldexp(1.0, k);
  if (cost > budget) {
    throw resource_error(std::string(what) + ": binom(" + std::to_string(n) + ", " + std::to_string(k) +
                         ") * 2^" + std::to_string(k) + " exceeds budget");
  }
}

inline void check_spectrum(const ComplexMatrix& a) {
  const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12)) throw numeric_error("probe_matrix: A is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw numeric_error("probe_matrix: eigenvalue solver failed");
  const auto& ev = es.eigenvalues();
  if (ev.minCoeff() < -kSpectrumTol || ev.maxCoeff() > 1.0 + kSpectrumTol) {
    throw numeric_error("probe_matrix: spectrum of A outside [0, 1]");
  }
}

}  // namespace detail

/// Probe matrix from the N x L block of the transfer matrix (input rows,
/// probe columns).
inline ProbeMatrix probe_matrix_from_block(const ComplexMatrix& block, double xi) {
  detail::require(xi >= 0.0 && xi <= 1.0, "probe_matrix: xi must lie in [0, 1]");
  detail::require(block.rows() >= 1, "probe_matrix: empty block");
  if (!all_finite(block)) throw numeric_error("probe_matrix: non-finite transfer entries");
  const auto n = block.rows();
  ProbeMatrix out;
  out.a = ComplexMatrix::Identity(n, n) - block * block.adjoint();
  detail::check_spectrum(out.a);
  out.a_xi = out.a * xi;
  out.a_xi.diagonal() = out.a.diagonal();
  return out;
}

inline ProbeMatrix probe_matrix(const LossyInterferometer& li, const Setup& s, double xi) {
  s.validate();
  detail::require(li.modes() == s.n_modes, "probe_matrix: interferometer has " + std::to_string(li.modes()) +
                                               " modes, setup has " + std::to_string(s.n_modes));
  const auto& t = li.transfer();
  ComplexMatrix block(s.n_bosons, s.probe_count());
  for (int l = 0; l < s.probe_count(); ++l) {
    block.col(l) = t.col(s.probe_ports[static_cast<std::size_t>(l)]).head(s.n_bosons);
  }
  return probe_matrix_from_block(block, xi);
}

/// e^{-L nu} per(A(xi)).
inline double p_nocount(const ProbeMatrix& pm, int probe_count, double nu, const KernelOptions& opts = {}) {
  const Complex per = permanent(pm.a_xi, opts.permanent);
  const double p = std::exp(-probe_count * nu) * detail::real_checked(per, "p_nocount");
  return detail::probability_checked(p, "p_nocount");
}

/// Difference between the full and the K-reduced no-count probability.
/// Sums, over fixed-point sets T with |T| >= N-K, the diagonal product on T
/// times the permanent of the complementary principal submatrix, weighted by
/// the inclusion-exclusion coefficients for "at least N-K fixed points".
inline double delta_p_exact(const ProbeMatrix& pm, int cutoff, int probe_count, double nu,
                            const KernelOptions& opts = {}) {
  const auto n = static_cast<int>(pm.a_xi.rows());
  detail::require(cutoff >= 0, "delta_p_exact: K must be >= 0");
  if (cutoff >= n) return 0.0;
  // At least N-1 fixed points forces the identity, same as K = 0.
  if (cutoff == 1) cutoff = 0;
  detail::check_budget(n, cutoff, opts.budget, "delta_p_exact");

  const Complex f0 = permanent(pm.a_xi, opts.permanent);
  const int r = n - cutoff;  // minimum number of fixed points
  const auto diag = pm.a_xi.diagonal();
  Complex reduced(0);
  // Complement W has size j = N - s <= K.
  for (int j = 0; j <= cutoff; ++j) {
    const int s = n - j;
    const double coeff = ((s - r) % 2 == 0 ? 1.0 : -1.0) * detail::binomial(s - 1, r - 1);
    Complex f_s(0);
    std::vector<char> in_w(static_cast<std::size_t>(n));
    detail::for_each_combination(n, j, [&](std::span<const int> w) {
      std::fill(in_w.begin(), in_w.end(), 0);
      for (int k : w) in_w[static_cast<std::size_t>(k)] = 1;
      Complex d(1);
      for (int k = 0; k < n; ++k) {
        if (!in_w[static_cast<std::size_t>(k)]) d *= diag(k);
      }
      if (d == Complex(0)) return;
      f_s += d * permanent(principal_submatrix(pm.a_xi, w), opts.permanent);
    });
    reduced += coeff * f_s;
  }
  return std::exp(-probe_count * nu) * detail::real_checked(f0 - reduced, "delta_p_exact");
}

/// P_L^(K): only permutations with at least N-K fixed points. Summed directly
/// over moved sets W (|W| <= K) as the diagonal product off W times the
/// permanent of A(xi)[W] with its diagonal cleared. Falls back to
/// p_nocount - delta_p_exact when the direct sum is over budget.
inline double p_nocount_reduced(const ProbeMatrix& pm, int cutoff, int probe_count, double nu,
                                const KernelOptions& opts = {}) {
  const auto n = static_cast<int>(pm.a_xi.rows());
  detail::require(cutoff >= 0, "p_nocount_reduced: K must be >= 0");
  if (cutoff >= n) return p_nocount(pm, probe_count, nu, opts);
  if (cutoff == 1) cutoff = 0;
  double cost = 0.0;
  for (int j = 0; j <= cutoff; ++j) cost += detail::binomial(n, j) * std::ldexp(1.0, j);
  if (cost > opts.budget) {
    return p_nocount(pm, probe_count, nu, opts) - delta_p_exact(pm, cutoff, probe_count, nu, opts);
  }

  const auto diag = pm.a_xi.diagonal();
  Complex total(0);
  std::vector<char> in_w(static_cast<std::size_t>(n));
  for (int j = 0; j <= cutoff; ++j) {
    detail::for_each_combination(n, j, [&](std::span<const int> w) {
      std::fill(in_w.begin(), in_w.end(), 0);
      for (int k : w) in_w[static_cast<std::size_t>(k)] = 1;
      Complex d(1);
      for (int k = 0; k < n; ++k) {
        if (!in_w[static_cast<std::size_t>(k)]) d *= diag(k);
      }
      if (d == Complex(0)) return;
      ComplexMatrix sub = principal_submatrix(pm.a_xi, w);
      sub.diagonal().setZero();
      total += d * permanent(sub, opts.permanent);
    });
  }
  const double p = std::exp(-probe_count * nu) * detail::real_checked(total, "p_nocount_reduced");
  return detail::probability_checked(p, "p_nocount_reduced");
}

inline constexpr int kBruteForceCap = 10;

/// e^{-L nu} sum over S_N of (j_a - j_b)(sigma) prod_k A[k, sigma(k)].
/// The weights come entirely from the evaluators, so A (not A(xi)) is used.
inline double delta_p_bruteforce(const ProbeMatrix& pm, int probe_count, double nu,
                                 const PermutationEvaluator& j_a, const PermutationEvaluator& j_b) {
  const auto n = static_cast<int>(pm.a.rows());
  if (n > kBruteForceCap) {
    throw resource_error("delta_p_bruteforce: N = " + std::to_string(n) + " exceeds " +
                         std::to_string(kBruteForceCap));
  }
  std::vector<int> sigma(static_cast<std::size_t>(n));
  std::iota(sigma.begin(), sigma.end(), 0);
  Complex total(0);
  do {
    const double w = j_a(sigma) - j_b(sigma);
    if (w == 0.0) continue;
    Complex prod(1);
    for (int k = 0; k < n; ++k) prod *= pm.a(k, sigma[static_cast<std::size_t>(k)]);
    total += w * prod;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return std::exp(-probe_count * nu) * detail::real_checked(total, "delta_p_bruteforce");
}

// Interferometer-level entry points.

inline double p_nocount(const LossyInterferometer& li, const Setup& s, const NoiseParams& noise,
                        const KernelOptions& opts = {}) {
  noise.validate();
  return p_nocount(probe_matrix(li, s, noise.xi), s.probe_count(), noise.nu, opts);
}

inline double p_nocount_reduced(const LossyInterferometer& li, const Setup& s, const NoiseParams& noise,
                                const KernelOptions& opts = {}) {
  noise.validate();
  return p_nocount_reduced(probe_matrix(li, s, noise.xi), s.cutoff, s.probe_count(), noise.nu, opts);
}

inline double delta_p_exact(const LossyInterferometer& li, const Setup& s, const NoiseParams& noise,
                            const KernelOptions& opts = {}) {
  noise.validate();
  return delta_p_exact(probe_matrix(li, s, noise.xi), s.cutoff, s.probe_count(), noise.nu, opts);
}

inline double delta_p_bruteforce(const LossyInterferometer& li, const Setup& s, const NoiseParams& noise,
                                 const PermutationEvaluator& j_a, const PermutationEvaluator& j_b) {
  noise.validate();
  detail::require(j_a && j_b, "delta_p_bruteforce: empty evaluator");
  return delta_p_bruteforce(probe_matrix(li, s, noise.xi), s.probe_count(), noise.nu, j_a, j_b);
}

/// Default pair: full model against reduced(K).
inline double delta_p_bruteforce(const LossyInterferometer& li, const Setup& s, const NoiseParams& noise) {
  return delta_p_bruteforce(li, s, noise, make_evaluator(DistinguishabilityModel::full(noise.xi)),
                            make_evaluator(DistinguishabilityModel::reduced(s.cutoff, noise.xi)));
}

/// Output configuration (occupation per mode) to probability.
using Distribution = std::map<std::vector<int>, double>;

inline constexpr int kSmallBosonCap = 5;
inline constexpr int kSmallModeCap = 6;

namespace detail {

inline void for_each_occupation(int modes, int total, std::vector<int>& occ, int pos,
                                const std::function<void(const std::vector<int>&)>& f) {
  if (pos == modes - 1) {
    occ[static_cast<std::size_t>(pos)] = total;
    f(occ);
    return;
  }
  for (int c = total; c >= 0; --c) {
    occ[static_cast<std::size_t>(pos)] = c;
    for_each_occupation(modes, total - c, occ, pos + 1, f);
  }
}

}  // namespace detail

/// Every configuration with at most N detected bosons. A configuration with
/// n bosons sums, over n-subsets of surviving inputs, the double sum over
/// S_n x S_n weighted by the model evaluated on S_n. The transfer matrix
/// carries the eta^{n/2} amplitude; the lost bosons contribute (1-eta)^{N-n}.
inline Distribution output_distribution_small(const LossyInterferometer& li, const Setup& s,
                                              const NoiseParams& noise, const DistinguishabilityModel& model) {
  noise.validate();
  s.validate();
  detail::require(li.modes() == s.n_modes, "output_distribution_small: mode count mismatch");
  detail::require(li.kind() == LossKind::unitary || li.kind() == LossKind::uniform,
                  "output_distribution_small: uniform loss only");
  detail::require(noise.nu == 0.0, "output_distribution_small: dark counts not supported");
  const int n_total = s.n_bosons;
  const int m_modes = s.n_modes;
  if (n_total > kSmallBosonCap || m_modes > kSmallModeCap) {
    throw resource_error("output_distribution_small: needs N <= 5 and M <= 6");
  }
  const double eta = li.uniform_eta();
  const auto& t = li.transfer();

  Distribution dist;
  std::vector<int> occ(static_cast<std::size_t>(m_modes));
  for (int n = 0; n <= n_total; ++n) {
    const double lost = std::pow(1.0 - eta, n_total - n);  // 0^0 = 1

    std::vector<std::vector<int>> perms;
    std::vector<int> sigma(static_cast<std::size_t>(n));
    std::iota(sigma.begin(), sigma.end(), 0);
    do perms.push_back(sigma);
    while (std::next_permutation(sigma.begin(), sigma.end()));
    const auto np = perms.size();

    // weight[a][b] = J(sigma_a sigma_b^{-1})
    const auto eval = make_evaluator(model);
    std::vector<double> weight(np * np);
    std::vector<int> inv(static_cast<std::size_t>(n)), comp(static_cast<std::size_t>(n));
    for (std::size_t b = 0; b < np; ++b) {
      for (int k = 0; k < n; ++k) inv[static_cast<std::size_t>(perms[b][static_cast<std::size_t>(k)])] = k;
      for (std::size_t a = 0; a < np; ++a) {
        for (int k = 0; k < n; ++k) {
          comp[static_cast<std::size_t>(k)] = perms[a][static_cast<std::size_t>(inv[static_cast<std::size_t>(k)])];
        }
        weight[a * np + b] = eval(comp);
      }
    }

    detail::for_each_occupation(m_modes, n, occ, 0, [&](const std::vector<int>& config) {
      std::vector<int> outs;
      double occ_factorial = 1.0;
      for (int l = 0; l < m_modes; ++l) {
        for (int c = 0; c < config[static_cast<std::size_t>(l)]; ++c) {
          outs.push_back(l);
          occ_factorial *= (c + 1);
        }
      }
      Complex total(0);
      std::vector<Complex> prods(np);
      detail::for_each_combination(n_total, n, [&](std::span<const int> ins) {
        for (std::size_t a = 0; a < np; ++a) {
          Complex p(1);
          for (int al = 0; al < n; ++al) {
            p *= t(ins[static_cast<std::size_t>(perms[a][static_cast<std::size_t>(al)])], outs[static_cast<std::size_t>(al)]);
          }
          prods[a] = p;
        }
        for (std::size_t a = 0; a < np; ++a) {
          Complex row(0);
          for (std::size_t b = 0; b < np; ++b) row += weight[a * np + b] * prods[b];
          total += std::conj(prods[a]) * row;
        }
      });
      const double p = lost * detail::real_checked(total, "output_distribution_small") / occ_factorial;
      dist[config] = p;
    });
  }
  return dist;
}

/// Half the L1 distance. Both distributions must cover the same configurations.
inline double tvd(const Distribution& p, const Distribution& q) {
  detail::require(p.size() == q.size(), "tvd: configuration spaces differ");
  double total = 0.0;
  auto qi = q.begin();
  for (const auto& [config, pv] : p) {
    detail::require(qi->first == config, "tvd: configuration spaces differ");
    total += std::abs(pv - qi->second);
    ++qi;
  }
  return 0.5 * total;
}

/// Probability that none of `ports` registers a boson.
inline double no_count_probability(const Distribution& dist, std::span<const int> ports) {
  double total = 0.0;
  for (const auto& [config, p] : dist) {
    bool empty = true;
    for (int l : ports) {
      detail::require(l >= 0 && static_cast<std::size_t>(l) < config.size(), "no_count_probability: port out of range");
      if (config[static_cast<std::size_t>(l)] != 0) empty = false;
    }
    if (empty) total += p;
  }
  return total;
}

}  // namespace bosondist
