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

// Haar-ensemble statistics of Delta P_L and P_L. Trial t draws its unitary
// from stream t of the seed, so results do not depend on scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "bosondist/errors.hpp"
#include "bosondist/interferometer.hpp"
#include "bosondist/nocount.hpp"
#include "bosondist/rng.hpp"

namespace bosondist {

struct EnsembleStats {
  double mean = 0.0;
  double std_error = 0.0;  // sqrt(variance / trials)
  double variance = 0.0;   // unbiased
  std::uint64_t trials = 0;
  RandomSeed seed{};
};

enum class KernelKind { exact, bruteforce };

struct EnsembleOptions {
  int workers = 1;
  std::uint64_t first_trial = 1;
  KernelKind kernel = KernelKind::exact;
  KernelOptions kernel_options{};
};

/// Per-trial value: receives the trial's (seed, stream) pair.
using TrialFunction = std::function<double(const RandomSeed&)>;

/// Values for trials first_trial .. first_trial + trials - 1, in trial order.
inline std::vector<double> ensemble_values(const TrialFunction& fn, std::uint64_t trials, std::uint64_t seed,
                                           const EnsembleOptions& opts = {}) {
  detail::require(trials >= 1, "ensemble: trials must be >= 1");
  detail::require(opts.workers >= 1, "ensemble: workers must be >= 1");
  std::vector<double> values(trials);
  auto run = [&](std::uint64_t i) {
    const double v = fn(RandomSeed{seed, opts.first_trial + i});
    if (!std::isfinite(v)) {
      throw numeric_error("ensemble: trial " + std::to_string(opts.first_trial + i) + " is not finite");
    }
    values[i] = v;
  };

  const auto workers = static_cast<std::uint64_t>(opts.workers);
  if (workers == 1 || trials == 1) {
    for (std::uint64_t i = 0; i < trials; ++i) run(i);
    return values;
  }

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::uint64_t w = 0; w < std::min(workers, trials); ++w) {
    pool.emplace_back([&] {
      while (!failed.load()) {
        const std::uint64_t i = next.fetch_add(1);
        if (i >= trials) return;
        try {
          run(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return values;
}

inline EnsembleStats summarize(const std::vector<double>& values, RandomSeed seed = {}) {
  detail::require(!values.empty(), "summarize: no values");
  EnsembleStats out;
  out.trials = values.size();
  out.seed = seed;
  // Shifted by the first value so constant samples give an exact mean.
  const double shift = values.front();
  double offset = 0.0;
  for (double v : values) offset += v - shift;
  const double mean = shift + offset / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  out.mean = mean;
  out.variance = values.size() > 1 ? ss / static_cast<double>(values.size() - 1) : 0.0;
  out.std_error = std::sqrt(out.variance / static_cast<double>(out.trials));
  return out;
}

/// Standard error of the unbiased sample variance,
/// sqrt((m4 - s^4 (n-3)/(n-1)) / n) with m4 the fourth central moment.
inline double sample_variance_std_error(const std::vector<double>& values) {
  detail::require(values.size() >= 4, "sample_variance_std_error: need at least 4 values");
  const auto st = summarize(values);
  double m4 = 0.0;
  for (double v : values) {
    const double d = v - st.mean;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(values.size());
  m4 /= n;
  const double s4 = st.variance * st.variance;
  return std::sqrt(std::max(0.0, (m4 - s4 * (n - 3.0) / (n - 1.0)) / n));
}

/// Combines statistics of disjoint trial ranges.
inline EnsembleStats pool(const EnsembleStats& a, const EnsembleStats& b) {
  detail::require(a.trials >= 1 && b.trials >= 1, "pool: empty statistics");
  const double na = static_cast<double>(a.trials);
  const double nb = static_cast<double>(b.trials);
  const double n = na + nb;
  const double delta = b.mean - a.mean;
  const double m2 = a.variance * (na - 1.0) + b.variance * (nb - 1.0) + delta * delta * na * nb / n;
  EnsembleStats out;
  out.trials = a.trials + b.trials;
  out.seed = a.seed;
  out.mean = a.mean + delta * nb / n;
  out.variance = m2 / (n - 1.0);
  out.std_error = std::sqrt(out.variance / n);
  return out;
}

namespace detail {

// Input-row x probe-column block of sqrt(eta) U for a Haar U on the trial stream.
inline ComplexMatrix haar_probe_block(const Setup& s, double eta, const RandomSeed& rng) {
  const int needed = *std::max_element(s.probe_ports.begin(), s.probe_ports.end()) + 1;
  const ComplexMatrix cols = haar_columns(s.n_modes, needed, rng);
  ComplexMatrix block(s.n_bosons, s.probe_count());
  for (int l = 0; l < s.probe_count(); ++l) {
    block.col(l) = cols.col(s.probe_ports[static_cast<std::size_t>(l)]).head(s.n_bosons);
  }
  return block * std::sqrt(eta);
}

}  // namespace detail

/// Per-trial Delta P_L, in trial order.
inline std::vector<double> ensemble_delta_p_values(const Setup& s, const NoiseParams& noise, std::uint64_t trials,
                                                   std::uint64_t seed, const EnsembleOptions& opts = {}) {
  s.validate();
  noise.validate();
  if (opts.kernel == KernelKind::exact && s.cutoff < s.n_bosons) {
    detail::check_budget(s.n_bosons, s.cutoff == 1 ? 0 : s.cutoff, opts.kernel_options.budget, "ensemble_delta_p");
  }
  const auto full = make_evaluator(DistinguishabilityModel::full(noise.xi));
  const auto reduced = make_evaluator(DistinguishabilityModel::reduced(s.cutoff, noise.xi));
  TrialFunction fn = [&](const RandomSeed& rng) {
    const ProbeMatrix pm = probe_matrix_from_block(detail::haar_probe_block(s, noise.eta, rng), noise.xi);
    if (opts.kernel == KernelKind::bruteforce) {
      return delta_p_bruteforce(pm, s.probe_count(), noise.nu, full, reduced);
    }
    return delta_p_exact(pm, s.cutoff, s.probe_count(), noise.nu, opts.kernel_options);
  };
  return ensemble_values(fn, trials, seed, opts);
}

inline EnsembleStats ensemble_delta_p(const Setup& s, const NoiseParams& noise, std::uint64_t trials,
                                      std::uint64_t seed, const EnsembleOptions& opts = {}) {
  return summarize(ensemble_delta_p_values(s, noise, trials, seed, opts), RandomSeed{seed, opts.first_trial});
}

/// Per-trial P_L, in trial order.
inline std::vector<double> ensemble_p1_values(const Setup& s, const NoiseParams& noise, std::uint64_t trials,
                                              std::uint64_t seed, const EnsembleOptions& opts = {}) {
  s.validate();
  noise.validate();
  TrialFunction fn = [&](const RandomSeed& rng) {
    const ProbeMatrix pm = probe_matrix_from_block(detail::haar_probe_block(s, noise.eta, rng), noise.xi);
    return p_nocount(pm, s.probe_count(), noise.nu, opts.kernel_options);
  };
  return ensemble_values(fn, trials, seed, opts);
}

inline EnsembleStats ensemble_p1(const Setup& s, const NoiseParams& noise, std::uint64_t trials,
                                 std::uint64_t seed, const EnsembleOptions& opts = {}) {
  return summarize(ensemble_p1_values(s, noise, trials, seed, opts), RandomSeed{seed, opts.first_trial});
}

/// Probe ports {0, ..., int(M/N) - 1}, capped at M - 1.
inline EnsembleStats ensemble_delta_p_multiport(int n, int m, int k, const NoiseParams& noise,
                                                std::uint64_t trials, std::uint64_t seed,
                                                const EnsembleOptions& opts = {}) {
  detail::require(n >= 1 && m >= n, "ensemble_delta_p_multiport: need 1 <= N <= M");
  const int l = std::min(m / n, m - 1);
  return ensemble_delta_p(Setup::with_first_ports(n, m, k, l), noise, trials, seed, opts);
}

}  // namespace bosondist
