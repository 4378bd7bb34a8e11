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


#include "bosondist/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace bosondist {
namespace {

// Known-answer vectors for Philox4x64-10.
struct Vector {
  PhiloxCounter ctr;
  PhiloxKey key;
  PhiloxCounter out;
};

constexpr std::uint64_t kOnes = ~std::uint64_t{0};

TEST(Philox, KnownAnswers) {
  const Vector vectors[] = {
      {{0, 0, 0, 0},
       {0, 0},
       {0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL}},
      {{0, 1, 0, 0},
       {12345, 7},
       {0x899b18303521d6a8ULL, 0xaa041e474ad88039ULL, 0xef7bdf72afaad662ULL, 0xb2941f77b2ded472ULL}},
      {{5, 0, 0, 0},
       {12345, 7},
       {0x42875c9892b399c1ULL, 0x25589329e14f5fdcULL, 0x1b8ad173c4ac4cfeULL, 0x0d2ec53198b84c55ULL}},
      {{kOnes, kOnes, kOnes, kOnes},
       {kOnes, kOnes},
       {0x87b092c3013fe90bULL, 0x438c3c67be8d0224ULL, 0x9cc7d7c69cd777b6ULL, 0xa09caebf594f0ba0ULL}},
  };
  for (const auto& v : vectors) EXPECT_EQ(philox4x64(v.ctr, v.key), v.out);
}

TEST(Philox, UnitIntervals) {
  EXPECT_GT(unit_open_closed(0), 0.0);
  EXPECT_EQ(unit_open_closed(kOnes), 1.0);
  EXPECT_EQ(unit_closed_open(0), 0.0);
  EXPECT_LT(unit_closed_open(kOnes), 1.0);
}

TEST(Philox, GaussianReproducible) {
  const RandomSeed a{42, 3};
  EXPECT_EQ(complex_gaussian(a, 17), complex_gaussian(a, 17));
  EXPECT_NE(complex_gaussian(a, 17), complex_gaussian(a, 18));
  EXPECT_NE(complex_gaussian(a, 17), complex_gaussian(RandomSeed{42, 4}, 17));
}

TEST(Philox, GaussianMoments) {
  const RandomSeed rng{2026, 0};
  const int n = 200000;
  std::complex<double> mean = 0.0;
  double second = 0.0;
  double fourth = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto z = complex_gaussian(rng, static_cast<std::uint64_t>(i));
    mean += z;
    second += std::norm(z);
    fourth += std::norm(z) * std::norm(z);
  }
  mean /= n;
  second /= n;
  fourth /= n;
  // Standard complex normal: E|z|^2 = 1, E|z|^4 = 2.
  EXPECT_LT(std::abs(mean), 5.0 / std::sqrt(n));
  EXPECT_NEAR(second, 1.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(fourth, 2.0, 5.0 * std::sqrt(20.0 / n));
}

TEST(PhiloxEngine, MatchesBlockFunction) {
  PhiloxEngine eng(RandomSeed{12345, 7});
  const auto block = philox4x64({0, 0, 0, 0}, {12345, 7});
  for (int i = 0; i < 4; ++i) EXPECT_EQ(eng(), block[static_cast<std::size_t>(i)]);
  const auto next = philox4x64({1, 0, 0, 0}, {12345, 7});
  EXPECT_EQ(eng(), next[0]);
}

TEST(PhiloxEngine, DiscardSkips) {
  PhiloxEngine a(RandomSeed{1, 2});
  PhiloxEngine b(RandomSeed{1, 2});
  for (int i = 0; i < 6; ++i) a();
  b.discard(6);
  EXPECT_EQ(a(), b());
}

TEST(PhiloxEngine, WorksWithStdDistributions) {
  PhiloxEngine eng(RandomSeed{9, 0});
  std::uniform_int_distribution<int> d(1, 6);
  for (int i = 0; i < 100; ++i) {
    const int v = d(eng);
    EXPECT_GE(v, 1);
    EXPECT_LE(v, 6);
  }
  const double u = eng.uniform();
  EXPECT_GE(u, 0.0);
  EXPECT_LT(u, 1.0);
}

TEST(RandomSeed, Equality) {
  EXPECT_EQ((RandomSeed{1, 2}), (RandomSeed{1, 2}));
  EXPECT_NE((RandomSeed{1, 2}), (RandomSeed{1, 3}));
}

}  // namespace
}  // namespace bosondist
