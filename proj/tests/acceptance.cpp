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


// Acceptance checks. `acceptance <id>` runs one criterion, no argument runs
// all. Each check prints one PASS/FAIL line. Exit code 0 when everything
// passes, 1 on failure, 77 when a check cannot be measured on this machine.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "bosondist/bosondist.hpp"

namespace bd = bosondist;

namespace {

constexpr int kExitSkip = 77;

enum class Outcome { pass, fail, unmeasurable };

struct Line {
  std::string id;
  Outcome outcome;
  std::string detail;
};

std::vector<Line> g_lines;

void report(const std::string& id, bool ok, const std::string& detail, Outcome if_failed = Outcome::fail) {
  g_lines.push_back({id, ok ? Outcome::pass : if_failed, detail});
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int draw(bd::PhiloxEngine& eng, int lo, int hi) {
  return lo + static_cast<int>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
}

bd::ComplexMatrix balanced2() {
  bd::ComplexMatrix b(2, 2);
  b << 1, 1, 1, -1;
  return b / std::sqrt(2.0);
}

// 1. Inclusion-exclusion kernel against the permutation-sum oracle.
void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  bd::PhiloxEngine eng({101, 0});
  const double etas[] = {0.6, 0.8, 1.0};
  const double xis[] = {0.5, 1.0};
  double worst = 0.0;
  std::string worst_case;
  for (int c = 0; c < 200; ++c) {
    const int n = draw(eng, 1, 8);
    const int l = draw(eng, 1, 2);
    const int m = draw(eng, std::max(n, l + 1), 16);
    const int k = draw(eng, 0, n);
    const bd::NoiseParams noise{etas[eng() % 3], xis[eng() % 2], 0.0};
    const auto li = bd::uniform_lossy(bd::haar_unitary(m, {101, 1000 + static_cast<std::uint64_t>(c)}), noise.eta);
    const auto s = bd::Setup::with_first_ports(n, m, k, l);
    const double d = std::abs(bd::delta_p_exact(li, s, noise) - bd::delta_p_bruteforce(li, s, noise));
    if (d >= worst) {
      worst = d;
      worst_case = fmt("N=%d M=%d K=%d L=%d", n, m, k, l);
    }
  }
  const double t = seconds_since(t0);
  report("1", worst <= 1e-10 && t < 30.0,
         fmt("200 cases, max |exact - bruteforce| = %.3g at %s (tol 1e-10), %.2f s (limit 30 s)", worst,
             worst_case.c_str(), t));
}

// 2. Two bosons on a balanced beam splitter.
void criterion2() {
  const auto li = bd::LossyInterferometer::unitary(balanced2());
  const auto s = bd::Setup::with_first_ports(2, 2, 1, 1);
  const bd::NoiseParams noise{1.0, 1.0, 0.0};
  const double p = bd::p_nocount(li, s, noise);
  const double pk = bd::p_nocount_reduced(li, s, noise);
  const double dp = bd::delta_p_exact(li, s, noise);
  const double t = bd::tvd(bd::output_distribution_small(li, s, noise, bd::DistinguishabilityModel::full(1.0)),
                           bd::output_distribution_small(li, s, noise, bd::DistinguishabilityModel::reduced(1, 1.0)));
  const bool ok = std::abs(p - 0.5) <= 1e-12 && std::abs(pk - 0.25) <= 1e-12 && std::abs(dp - 0.25) <= 1e-12 &&
                  std::abs(t - 0.5) <= 1e-12 && t >= dp;
  report("2", ok, fmt("P1=%.17g P1^(K)=%.17g dP1=%.17g tvd=%.17g", p, pk, dp, t));
}

// 3. TVD dominates |Delta P_L| on tiny systems.
void criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  bd::PhiloxEngine eng({303, 0});
  double worst = -1.0;
  int checks = 0;
  for (int c = 0; c < 50; ++c) {
    const int n = draw(eng, 1, 4);
    const int m = draw(eng, std::max(2, n), 6);
    const int k = draw(eng, 0, n);
    const bd::NoiseParams noise{0.3 + 0.7 * eng.uniform(), eng.uniform(), 0.0};
    const auto li = bd::uniform_lossy(bd::haar_unitary(m, {303, 100 + static_cast<std::uint64_t>(c)}), noise.eta);
    const auto base = bd::Setup::with_first_ports(n, m, k, 1);
    const double d =
        bd::tvd(bd::output_distribution_small(li, base, noise, bd::DistinguishabilityModel::full(noise.xi)),
                bd::output_distribution_small(li, base, noise, bd::DistinguishabilityModel::reduced(k, noise.xi)));
    for (int l = 1; l < m; ++l) {
      worst = std::max(worst, std::abs(bd::delta_p_exact(li, bd::Setup::with_first_ports(n, m, k, l), noise)) - d);
      ++checks;
    }
  }
  const double t = seconds_since(t0);
  report("3", worst <= 1e-10 && t < 60.0,
         fmt("50 draws, %d (draw, L) pairs, max |dP_L| - tvd = %.3g (must be <= 1e-10), %.2f s", checks, worst, t));
}

// 4. K = 1 ensembles against the closed form, and N = 12 vs N = 24.
void criterion4() {
  const bd::NoiseParams noise{0.8, 1.0, 0.0};
  const double rhos[] = {0.1, 0.25, 0.5, 0.75, 1.0};
  bool ok = true;
  std::string detail;
  for (double rho : rhos) {
    const int m = static_cast<int>(std::lround(12 / rho));
    const auto st = bd::ensemble_delta_p(bd::Setup::with_first_ports(12, m, 1, 1), noise, 500, 2026);
    const double ref = bd::avg_delta_p1(12, m, noise, 1);
    const double z = std::abs(st.mean - ref) / st.std_error;
    ok = ok && z <= 3.0;
    detail += fmt(" rho=%.2f:%.2fse", rho, z);
  }
  report("4a", ok, "500-trial means within 3 stderr of the closed form;" + detail);

  // Same five densities; M = N/rho is an integer for both N there.
  double worst = 0.0;
  for (double rho : rhos) {
    const double a = bd::avg_delta_p1(12, static_cast<int>(std::lround(12 / rho)), noise, 1);
    const double b = bd::avg_delta_p1(24, static_cast<int>(std::lround(24 / rho)), noise, 1);
    worst = std::max(worst, std::abs(a - b) / std::abs(b));
  }
  report("4b", worst < 0.05, fmt("N=12 vs N=24 closed form at the same rho: max relative gap %.4f (< 0.05)", worst));
}

// 5. K = 3 closed form converging to W1.
void criterion5() {
  const bd::NoiseParams noise{0.8, 1.0, 0.0};
  const double w = bd::w1({0.5, noise, 3});
  const int ns[] = {12, 24, 48, 84};
  std::vector<double> dev;
  std::string detail;
  for (int n : ns) {
    dev.push_back(std::abs(std::abs(bd::avg_delta_p1(n, 2 * n, noise, 3)) - w) / w);
    detail += fmt(" N=%d:%.4g", n, dev.back());
  }
  bool ok = true;
  for (std::size_t i = 1; i < dev.size(); ++i) ok = ok && dev[i] < dev[i - 1];
  ok = ok && 2.0 * dev[3] <= dev[1];
  report("5", ok, "relative deviation from W1 decreases, N=84 at most half of N=24;" + detail);
}

// 6. Balanced output port of Fourier composites.
void criterion6() {
  const bd::NoiseParams noise{0.8, 1.0, 0.0};
  bool ok = true;
  std::string detail;
  for (double rho : {0.5, 1.0}) {
    const int m = static_cast<int>(std::lround(12 / rho));
    const double w = bd::w1({12.0 / m, noise, 1});
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::uint64_t t = 1; t <= 20; ++t) {
      const auto u = bd::balanced_composite(bd::haar_unitary(m - 1, {606, t}), m);
      const double dp = bd::delta_p_exact(bd::uniform_lossy(u, noise.eta), bd::Setup::with_first_ports(12, m, 1, 1), noise);
      min_ratio = std::min(min_ratio, dp / w);  // (-1)^{K+1} = +1 for K = 1
    }
    ok = ok && min_ratio > 0.0 && min_ratio >= 0.5;
    detail += fmt(" rho=%.1f: min dP1/W1=%.4f", rho, min_ratio);
  }
  report("6", ok, "20 composites per rho, dP1 > 0 and >= 0.5 W1;" + detail);
}

// 7. Haar moments at M = 8.
void criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kSamples = 10000;
  std::vector<double> a(kSamples), b(kSamples);
  for (int s = 0; s < kSamples; ++s) {
    const auto u = bd::haar_unitary(8, {707, static_cast<std::uint64_t>(s)});
    a[s] = std::norm(u(0, 0));
    b[s] = std::norm(u(0, 0)) * std::norm(u(1, 0));
  }
  const auto sa = bd::summarize(a);
  const auto sb = bd::summarize(b);
  const double za = std::abs(sa.mean - 1.0 / 8) / sa.std_error;
  const double zb = std::abs(sb.mean - 1.0 / 72) / sb.std_error;
  const double t = seconds_since(t0);
  report("7", za <= 5 && zb <= 5 && t < 10.0,
         fmt("<|U11|^2>=%.6f (%.2fse from 1/8), <|U11|^2|U21|^2>=%.6f (%.2fse from 1/72), %.2f s", sa.mean, za, sb.mean,
             zb, t));
}

// 8. Variance of Delta P_1 against its closed forms.
void criterion8() {
  const bd::NoiseParams noise{0.8, 1.0, 0.0};
  const auto values = bd::ensemble_delta_p_values(bd::Setup::with_first_ports(8, 16, 2, 1), noise, 10000, 808);
  const auto st = bd::summarize(values);
  const double se = bd::sample_variance_std_error(values);
  const double exact = bd::var_delta_p1_exact(8, 16, noise, 2);
  const double asym = bd::var_delta_p1_asymptotic(8, {0.5, noise, 2});
  const double z = std::abs(st.variance - exact) / se;
  report("8a", z <= 5.0, fmt("sample var %.6g vs exact %.6g: %.2f stderr (<= 5)", st.variance, exact, z));
  const double ratio = asym / st.variance;
  report("8b", ratio >= 0.5 && ratio <= 2.0, fmt("asymptotic %.6g / sample %.6g = %.3f (within factor 2)", asym,
                                                 st.variance, ratio));
}

// 9. Average no-count probability.
void criterion9() {
  const double v = bd::avg_p1_exact(2, 2, {1.0, 1.0, 0.0});
  report("9a", std::abs(v - 1.0 / 3.0) <= 1e-15, fmt("avg_p1_exact(2,2) = %.17g (1/3)", v));
  bool ok = true;
  std::string detail;
  for (double eta : {1.0, 0.5}) {
    const int m = static_cast<int>(std::lround(50 * eta / 0.1));
    const bd::NoiseParams noise{eta, 0.5, 0.0};
    const double exact = bd::avg_p1_exact(50, m, noise);
    const double approx = bd::avg_p1_approx({50.0 / m, noise, 0});
    const double rel = std::abs(approx - exact) / exact;
    ok = ok && rel <= 0.01;
    detail += fmt(" eta=%.1f M=%d rel=%.2e", eta, m, rel);
  }
  report("9b", ok, "N=50, rho*eta=0.1, xi=0.5: approx within 1% of exact;" + detail);
}

// 10. Derangement counts.
void criterion10() {
  bool ok = true;
  for (int m = 0; m <= 12; ++m) {
    // d_m = sum_j (-1)^j m!/j!
    std::int64_t direct = 0;
    std::int64_t term = 1;  // m!/j! for j = m downwards
    for (int j = m; j >= 0; --j) {
      direct += (j % 2 == 0 ? 1 : -1) * term;
      term *= j;
    }
    ok = ok && static_cast<std::int64_t>(bd::derangements(m)) == direct;
  }
  report("10a", ok, "recurrence equals the alternating sum for m <= 12");

  using big = boost::multiprecision::cpp_bin_float_50;
  bool bound_ok = true;
  double tightest = 0.0;
  for (int m = 1; m <= 20; ++m) {
    const big ratio = big(bd::derangements(m)) / big(bd::factorial(m));
    const big gap = abs(ratio - exp(big(-1)));
    const big limit = big(1) / (big(bd::factorial(m)) * (m + 1));  // 1/(m+1)!
    bound_ok = bound_ok && gap <= limit;
    tightest = std::max(tightest, static_cast<double>(gap / limit));
  }
  report("10b", bound_ok, fmt("|d_m/m! - 1/e| <= 1/(m+1)! for 1 <= m <= 20 (max gap/bound %.4f)", tightest));

  bool bounded_ok = true;
  int compared = 0;
  for (int m = 0; m <= 7; ++m) {
    std::map<int, std::uint64_t> counts;  // longest cycle -> count, derangements only
    std::vector<int> p(static_cast<std::size_t>(m));
    std::iota(p.begin(), p.end(), 0);
    do {
      const auto c = bd::summarize_cycles(p);
      if (c.fixed_points == 0) ++counts[c.longest];
    } while (std::next_permutation(p.begin(), p.end()));
    for (int k = 1; k <= std::max(m, 1); ++k) {
      std::uint64_t expected = 0;
      for (const auto& [longest, count] : counts) {
        if (longest <= k) expected += count;
      }
      bounded_ok = bounded_ok && bd::derangements_bounded_cycles(m, k) == expected;
      ++compared;
    }
  }
  report("10c", bounded_ok, fmt("d_m^(K) equals enumeration of S_m for m <= 7, all K (%d pairs)", compared));
}

// 11. Performance.
void criterion11() {
  {
    const bd::ComplexMatrix a = bd::haar_unitary(20, {1111, 0});
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = bd::permanent(a);
    const double t = seconds_since(t0);
    report("11a", std::isfinite(std::abs(p)) && t < 2.0, fmt("20x20 permanent in %.3f s (< 2 s)", t));
  }
  {
    const bd::NoiseParams noise{0.8, 1.0, 0.0};
    const auto li = bd::uniform_lossy(bd::haar_unitary(48, {1111, 1}), noise.eta);
    const auto t0 = std::chrono::steady_clock::now();
    const double dp = bd::delta_p_exact(li, bd::Setup::with_first_ports(24, 48, 3, 1), noise);
    const double t = seconds_since(t0);
    report("11b", std::isfinite(dp) && t < 60.0, fmt("delta_p_exact N=24 M=48 K=3 in %.2f s (< 60 s)", t));
  }
  {
    const bd::NoiseParams noise{0.8, 1.0, 0.0};
    const auto s = bd::Setup::with_first_ports(12, 24, 1, 1);
    bd::EnsembleOptions one;
    bd::EnsembleOptions four;
    four.workers = 4;
    auto t0 = std::chrono::steady_clock::now();
    const auto v1 = bd::ensemble_delta_p_values(s, noise, 500, 1111, one);
    const double t1 = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const auto v4 = bd::ensemble_delta_p_values(s, noise, 500, 1111, four);
    const double t4 = seconds_since(t0);
    const bool identical = v1 == v4;
    const double speedup = t1 / t4;
    const unsigned hw = std::thread::hardware_concurrency();
    const auto detail = fmt("N=12, 500 trials: 1 worker %.3f s, 4 workers %.3f s, speedup %.2fx (>= 3), "
                            "bit-identical: %s, hardware threads: %u",
                            t1, t4, speedup, identical ? "yes" : "no", hw);
    const bool ok = identical && speedup >= 3.0;
    // Without four hardware threads the speedup cannot be measured; a
    // bit-identity mismatch is still a genuine failure.
    report("11c", ok, detail, identical && hw < 4 ? Outcome::unmeasurable : Outcome::fail);
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<void()>> criteria{
      {"1", criterion1}, {"2", criterion2}, {"3", criterion3}, {"4", criterion4},  {"5", criterion5},  {"6", criterion6},
      {"7", criterion7}, {"8", criterion8}, {"9", criterion9}, {"10", criterion10}, {"11", criterion11}};
  try {
    if (argc > 1) {
      const auto it = criteria.find(argv[1]);
      if (it == criteria.end()) {
        std::cerr << "unknown criterion " << argv[1] << '\n';
        return 1;
      }
      it->second();
    } else {
      for (const char* id : {"1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "11"}) criteria.at(id)();
    }
  } catch (const std::exception& e) {
    std::printf("FAIL %s: exception: %s\n", argc > 1 ? argv[1] : "run", e.what());
    return 1;
  }
  bool any_fail = false;
  bool any_unmeasurable = false;
  for (const auto& line : g_lines) {
    any_fail = any_fail || line.outcome == Outcome::fail;
    any_unmeasurable = any_unmeasurable || line.outcome == Outcome::unmeasurable;
  }
  if (any_fail) return 1;
  return any_unmeasurable ? kExitSkip : 0;
}
