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

// Counter-based random numbers (Philox4x64-10) keyed by (seed, stream).
//
// Every variate is a pure function of (seed, stream, index), so ensembles can
// be evaluated in any order or on any number of workers with identical output.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

namespace bosondist {

struct RandomSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const RandomSeed&, const RandomSeed&) = default;
};

using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

namespace detail {

inline void mulhilo64(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 product = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(product >> 64);
  lo = static_cast<std::uint64_t>(product);
}

}  // namespace detail

/// Philox4x64 with 10 rounds (Salmon et al., SC'11).
inline PhiloxCounter philox4x64(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    detail::mulhilo64(kMul0, ctr[0], hi0, lo0);
    detail::mulhilo64(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

/// Uniform double in (0, 1] from the top 53 bits.
inline double unit_open_closed(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_closed_open(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Standard complex Gaussian (E|z|^2 = 1) number `index` of the stream.
/// Box-Muller on one Philox block, so the value does not depend on what else
/// was drawn from the stream.
inline std::complex<double> complex_gaussian(const RandomSeed& rng, std::uint64_t index) {
  const PhiloxCounter out = philox4x64({index, 0, 0, 0}, {rng.seed, rng.stream});
  const double radius = std::sqrt(-std::log(unit_open_closed(out[0])));
  const double angle = 2.0 * std::numbers::pi * unit_closed_open(out[1]);
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

/// UniformRandomBitGenerator over a (seed, stream) pair. Four outputs per
/// counter increment.
class PhiloxEngine {
 public:
  using result_type = std::uint64_t;

  explicit PhiloxEngine(RandomSeed rng = {}) : key_{rng.seed, rng.stream} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (pos_ == 4) {
      block_ = philox4x64({counter_++, 0, 0, 0}, key_);
      pos_ = 0;
    }
    return block_[pos_++];
  }

  void discard(std::uint64_t z) {
    for (; z > 0; --z) (*this)();
  }

  double uniform() { return unit_closed_open((*this)()); }

 private:
  PhiloxKey key_;
  std::uint64_t counter_ = 0;
  PhiloxCounter block_{};
  int pos_ = 4;
};

}  // namespace bosondist
