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

// Built-in property suites for a quick health check of a build: permanent and
// kernel oracle equivalence, the TVD lower bound, and normalization of the
// small-system output distributions. Sizes stay at N <= 8.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bosondist/interferometer.hpp"
#include "bosondist/matcore.hpp"
#include "bosondist/noisemodel.hpp"
#include "bosondist/nocount.hpp"
#include "bosondist/rng.hpp"

namespace bosondist {

using PermanentFunction = std::function<Complex(const ComplexMatrix&)>;

struct SelftestOptions {
  // Implementation checked against the naive oracle. Tests inject a broken
  // one here as a negative control.
  PermanentFunction permanent = [](const ComplexMatrix& m) { return bosondist::permanent(m); };
  std::uint64_t seed = 20260;
  int cases = 24;
};

struct PropertyResult {
  std::string name;
  bool passed = true;
  std::string detail;  // worst deviation, or the first failing case
};

struct SuiteReport {
  std::string name;
  std::vector<PropertyResult> properties;
  double seconds = 0.0;

  bool passed() const {
    for (const auto& p : properties) {
      if (!p.passed) return false;
    }
    return true;
  }
};

struct SelftestReport {
  std::vector<SuiteReport> suites;

  bool passed() const {
    for (const auto& s : suites) {
      if (!s.passed()) return false;
    }
    return true;
  }
};

namespace detail {

inline int draw_int(PhiloxEngine& eng, int lo, int hi) {
  return lo + static_cast<int>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline ComplexMatrix gaussian_matrix(int n, const RandomSeed& rng) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = complex_gaussian(rng, static_cast<std::uint64_t>(i * n + j));
  }
  return m;
}

// Tracks the worst deviation of a property over many cases.
class PropertyCheck {
 public:
  explicit PropertyCheck(std::string name, double tol) : tol_(tol) { result_.name = std::move(name); }

  void observe(double deviation, const std::string& where) {
    if (!(deviation <= tol_)) {
      if (result_.passed) first_failure_ = where + " deviation " + std::to_string(deviation);
      result_.passed = false;
    }
    if (!(deviation <= worst_)) worst_ = deviation;
  }

  void fail(const std::string& where) {
    if (result_.passed) first_failure_ = where;
    result_.passed = false;
  }

  PropertyResult finish() {
    std::ostringstream os;
    if (result_.passed) {
      os << "max deviation " << worst_ << " (tol " << tol_ << ")";
    } else {
      os << first_failure_;
    }
    result_.detail = os.str();
    return result_;
  }

 private:
  double tol_;
  double worst_ = -std::numeric_limits<double>::infinity();
  std::string first_failure_;
  PropertyResult result_;
};

template <typename Body>
SuiteReport timed_suite(std::string name, Body&& body) {
  SuiteReport suite;
  suite.name = std::move(name);
  const auto t0 = std::chrono::steady_clock::now();
  body(suite.properties);
  suite.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return suite;
}

// Catches library exceptions so one bad case reports instead of aborting.
template <typename Fn>
void guarded(PropertyCheck& check, const std::string& where, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    check.fail(where + ": " + e.what());
  }
}

inline std::string case_name(int n, int m, int k, int l) {
  return "N=" + std::to_string(n) + " M=" + std::to_string(m) + " K=" + std::to_string(k) + " L=" + std::to_string(l);
}

}  // namespace detail

inline SuiteReport selftest_oracle_equivalence(const SelftestOptions& opts) {
  return detail::timed_suite("oracle-equivalence", [&](std::vector<PropertyResult>& out) {
    detail::PropertyCheck perm("permanent matches naive sum", 1e-10);
    for (int n = 0; n <= 8; ++n) {
      for (std::uint64_t rep = 0; rep < 3; ++rep) {
        const ComplexMatrix a = detail::gaussian_matrix(n, {opts.seed, static_cast<std::uint64_t>(n * 3) + rep});
        detail::guarded(perm, "n=" + std::to_string(n), [&] {
          const Complex ref = permanent_naive(a);
          const Complex got = opts.permanent(a);
          perm.observe(std::abs(got - ref) / std::max(1.0, std::abs(ref)), "n=" + std::to_string(n));
        });
      }
    }
    out.push_back(perm.finish());

    detail::PropertyCheck kernel("inclusion-exclusion matches brute force", 1e-10);
    detail::PropertyCheck consistency("P - P^(K) equals Delta P", 1e-12);
    PhiloxEngine eng({opts.seed, 1000});
    const double etas[] = {0.6, 0.8, 1.0};
    const double xis[] = {0.5, 1.0};
    for (int c = 0; c < opts.cases; ++c) {
      const int n = detail::draw_int(eng, 1, c < 2 ? 8 : 6);
      const int m = detail::draw_int(eng, n + 1, 2 * n + 2);
      const int k = detail::draw_int(eng, 0, n);
      const int l = detail::draw_int(eng, 1, std::min(2, m - 1));
      const NoiseParams noise{etas[eng() % 3], xis[eng() % 2], 0.0};
      const auto where = detail::case_name(n, m, k, l);
      const auto li = uniform_lossy(haar_unitary(m, {opts.seed, 2000 + static_cast<std::uint64_t>(c)}), noise.eta);
      const Setup s = Setup::with_first_ports(n, m, k, l);
      detail::guarded(kernel, where, [&] {
        const double exact = delta_p_exact(li, s, noise);
        kernel.observe(std::abs(exact - delta_p_bruteforce(li, s, noise)), where);
        consistency.observe(std::abs(p_nocount(li, s, noise) - p_nocount_reduced(li, s, noise) - exact), where);
      });
    }
    out.push_back(kernel.finish());
    out.push_back(consistency.finish());
  });
}

inline SuiteReport selftest_tvd(const SelftestOptions& opts) {
  return detail::timed_suite("tvd", [&](std::vector<PropertyResult>& out) {
    detail::PropertyCheck anchor("two-boson balanced splitter anchor", 1e-12);
    detail::guarded(anchor, "N=2 M=2", [&] {
      ComplexMatrix b(2, 2);
      b << 1, 1, 1, -1;
      const auto li = LossyInterferometer::unitary(b / std::sqrt(2.0));
      const Setup s = Setup::with_first_ports(2, 2, 1, 1);
      const NoiseParams noise{1.0, 1.0, 0.0};
      const auto p = output_distribution_small(li, s, noise, DistinguishabilityModel::full(1.0));
      const auto q = output_distribution_small(li, s, noise, DistinguishabilityModel::reduced(1, 1.0));
      anchor.observe(std::abs(p_nocount(li, s, noise) - 0.5), "P");
      anchor.observe(std::abs(p_nocount_reduced(li, s, noise) - 0.25), "P^(K)");
      anchor.observe(std::abs(delta_p_exact(li, s, noise) - 0.25), "Delta P");
      anchor.observe(std::abs(tvd(p, q) - 0.5), "tvd");
    });
    out.push_back(anchor.finish());

    detail::PropertyCheck bound("tvd >= |Delta P_L| for every L", 1e-10);
    PhiloxEngine eng({opts.seed, 3000});
    const double etas[] = {0.6, 0.8, 1.0};
    for (int c = 0; c < opts.cases; ++c) {
      const int n = detail::draw_int(eng, 1, 4);
      const int m = detail::draw_int(eng, std::max(2, n), 6);
      const int k = detail::draw_int(eng, 0, n);
      const NoiseParams noise{etas[eng() % 3], 0.25 + 0.75 * eng.uniform(), 0.0};
      const auto li = uniform_lossy(haar_unitary(m, {opts.seed, 4000 + static_cast<std::uint64_t>(c)}), noise.eta);
      const auto where = detail::case_name(n, m, k, 0);
      detail::guarded(bound, where, [&] {
        const Setup base = Setup::with_first_ports(n, m, k, 1);
        const auto p = output_distribution_small(li, base, noise, DistinguishabilityModel::full(noise.xi));
        const auto q = output_distribution_small(li, base, noise, DistinguishabilityModel::reduced(k, noise.xi));
        const double d = tvd(p, q);
        for (int l = 1; l < m; ++l) {
          const double dp = delta_p_exact(li, Setup::with_first_ports(n, m, k, l), noise);
          bound.observe(std::abs(dp) - d, detail::case_name(n, m, k, l));
        }
      });
    }
    out.push_back(bound.finish());
  });
}

inline SuiteReport selftest_normalization(const SelftestOptions& opts) {
  return detail::timed_suite("normalization", [&](std::vector<PropertyResult>& out) {
    detail::PropertyCheck total("output distributions sum to 1", 1e-12);
    detail::PropertyCheck marginal("no-count marginals match the probe-matrix kernels", 1e-12);
    detail::PropertyCheck unitary("Haar draws are unitary", 1e-12);
    PhiloxEngine eng({opts.seed, 5000});
    for (int c = 0; c < opts.cases; ++c) {
      const int n = detail::draw_int(eng, 1, 4);
      const int m = detail::draw_int(eng, std::max(2, n), 6);
      const int k = detail::draw_int(eng, 0, n);
      const int l = detail::draw_int(eng, 1, m - 1);
      const NoiseParams noise{0.5 + 0.5 * eng.uniform(), eng.uniform(), 0.0};
      const ComplexMatrix u = haar_unitary(m, {opts.seed, 6000 + static_cast<std::uint64_t>(c)});
      const auto where = detail::case_name(n, m, k, l);
      unitary.observe(unitarity_defect(u), where);
      const auto li = uniform_lossy(u, noise.eta);
      const Setup s = Setup::with_first_ports(n, m, k, l);
      detail::guarded(total, where, [&] {
        const DistinguishabilityModel models[] = {DistinguishabilityModel::full(noise.xi),
                                                  DistinguishabilityModel::reduced(k, noise.xi),
                                                  DistinguishabilityModel::cycle_plus(std::max(k, 1), noise.xi)};
        for (const auto& model : models) {
          const auto dist = output_distribution_small(li, s, noise, model);
          double sum = 0.0;
          for (const auto& [config, p] : dist) sum += p;
          total.observe(std::abs(sum - 1.0), where);
        }
        std::vector<int> ports(static_cast<std::size_t>(l));
        std::iota(ports.begin(), ports.end(), 0);
        const auto full = output_distribution_small(li, s, noise, models[0]);
        const auto reduced = output_distribution_small(li, s, noise, models[1]);
        marginal.observe(std::abs(no_count_probability(full, ports) - p_nocount(li, s, noise)), where);
        marginal.observe(std::abs(no_count_probability(reduced, ports) - p_nocount_reduced(li, s, noise)), where);
      });
    }
    out.push_back(total.finish());
    out.push_back(marginal.finish());
    out.push_back(unitary.finish());
  });
}

inline SelftestReport run_selftest(const SelftestOptions& opts = {}) {
  SelftestReport report;
  report.suites.push_back(selftest_oracle_equivalence(opts));
  report.suites.push_back(selftest_tvd(opts));
  report.suites.push_back(selftest_normalization(opts));
  return report;
}

inline void print_report(const SelftestReport& report, std::ostream& os) {
  for (const auto& suite : report.suites) {
    os << "[" << suite.name << "] " << (suite.passed() ? "PASS" : "FAIL") << " in " << suite.seconds << " s\n";
    for (const auto& p : suite.properties) {
      os << "  " << (p.passed ? "PASS" : "FAIL") << "  " << p.name << ": " << p.detail << '\n';
    }
  }
  os << (report.passed() ? "selftest: all properties pass" : "selftest: FAILED") << '\n';
}

}  // namespace bosondist
