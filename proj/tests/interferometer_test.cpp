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


#include "bosondist/interferometer.hpp"
#include "bosondist/matrix_io.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include <Eigen/SVD>

namespace bosondist {
namespace {

Eigen::VectorXd singular_values(const ComplexMatrix& m) {
  return Eigen::JacobiSVD<ComplexMatrix>(m).singularValues();
}

TEST(Haar, Unitary) {
  for (int m : {1, 2, 5, 16}) {
    for (std::uint64_t stream = 0; stream < 4; ++stream) {
      const ComplexMatrix u = haar_unitary(m, {77, stream});
      EXPECT_LE(unitarity_defect(u), 1e-12) << "m=" << m;
    }
  }
  const ComplexMatrix one = haar_unitary(1, {3, 1});
  EXPECT_NEAR(std::abs(one(0, 0)), 1.0, 1e-15);
}

TEST(Haar, BitIdenticalForEqualSeed) {
  EXPECT_EQ(haar_unitary(6, {5, 9}), haar_unitary(6, {5, 9}));
  EXPECT_NE(haar_unitary(6, {5, 9}), haar_unitary(6, {5, 10}));
}

TEST(Haar, LeadingColumnsMatchFullDraw) {
  const ComplexMatrix u = haar_unitary(9, {11, 4});
  const ComplexMatrix c = haar_columns(9, 3, {11, 4});
  EXPECT_LE((u.leftCols(3) - c).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Haar, RejectsBadSizes) {
  EXPECT_THROW(haar_unitary(0, {}), std::invalid_argument);
  EXPECT_THROW(haar_columns(3, 4, {}), std::invalid_argument);
}

// E|U11|^2 = 1/M, E|U11|^4 = 2/(M(M+1)), E|U11|^2|U21|^2 = 1/(M(M+1)).
TEST(Haar, LowOrderMoments) {
  const int m = 8;
  const int samples = 10000;
  std::vector<double> a(samples), b(samples), c(samples);
  for (int t = 0; t < samples; ++t) {
    const ComplexMatrix u = haar_unitary(m, {2026, static_cast<std::uint64_t>(t + 1)});
    a[static_cast<std::size_t>(t)] = std::norm(u(0, 0));
    b[static_cast<std::size_t>(t)] = std::norm(u(0, 0)) * std::norm(u(0, 0));
    c[static_cast<std::size_t>(t)] = std::norm(u(0, 0)) * std::norm(u(1, 0));
  }
  auto check = [&](const std::vector<double>& x, double expected) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= samples;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= samples - 1;
    EXPECT_LE(std::abs(mean - expected), 5.0 * std::sqrt(var / samples)) << "expected " << expected;
  };
  check(a, 1.0 / m);
  check(b, 2.0 / (m * (m + 1)));
  check(c, 1.0 / (m * (m + 1)));
}

TEST(Fourier, Properties) {
  EXPECT_LE(std::abs(fourier(1)(0, 0) - Complex(1.0)), 1e-15);
  const ComplexMatrix f = fourier(4);
  EXPECT_LE(unitarity_defect(f), 1e-12);
  for (int m : {3, 7}) {
    const ComplexMatrix g = fourier(m);
    EXPECT_LE((g.cwiseAbs().array() - 1.0 / std::sqrt(m)).abs().maxCoeff(), 1e-15);
  }
  EXPECT_THROW(fourier(0), std::invalid_argument);
}

TEST(BalancedComposite, FirstColumnBalanced) {
  EXPECT_LE((balanced_composite(ComplexMatrix::Identity(4, 4), 5) - fourier(5)).cwiseAbs().maxCoeff(), 1e-15);
  const ComplexMatrix u = balanced_composite(haar_unitary(5, {1, 1}), 6);
  EXPECT_LE(unitarity_defect(u), 1e-12);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(std::norm(u(k, 0)), 1.0 / 6.0, 1e-12);
  EXPECT_THROW(balanced_composite(ComplexMatrix(2.0 * ComplexMatrix::Identity(5, 5)), 6), std::invalid_argument);
  EXPECT_THROW(balanced_composite(ComplexMatrix::Identity(4, 4), 6), std::invalid_argument);
}

TEST(UniformLossy, SingularValues) {
  const ComplexMatrix u = haar_unitary(6, {8, 0});
  EXPECT_EQ(uniform_lossy(u, 1.0).transfer(), u);
  EXPECT_EQ(uniform_lossy(u, 0.0).transfer().cwiseAbs().maxCoeff(), 0.0);
  const auto li = uniform_lossy(u, 0.8);
  EXPECT_EQ(li.kind(), LossKind::uniform);
  EXPECT_DOUBLE_EQ(li.uniform_eta(), 0.8);
  const Eigen::VectorXd s = singular_values(li.transfer());
  EXPECT_LE((s.array() - std::sqrt(0.8)).abs().maxCoeff(), 1e-12);
  EXPECT_THROW(uniform_lossy(u, 1.2), std::invalid_argument);
  EXPECT_THROW(uniform_lossy(u, -0.1), std::invalid_argument);
  EXPECT_THROW(uniform_lossy(ComplexMatrix(2.0 * u), 0.5), std::invalid_argument);
}

TEST(DiagonalLossy, SingularValuesAreRootTransmissions) {
  const ComplexMatrix u = haar_unitary(4, {8, 1});
  EXPECT_LE((diagonal_lossy(u, {1, 1, 1, 1}).transfer() - u).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((diagonal_lossy(u, {0.8, 0.8, 0.8, 0.8}).transfer() - uniform_lossy(u, 0.8).transfer())
                .cwiseAbs()
                .maxCoeff(),
            1e-15);

  std::vector<double> d{0.9, 0.2, 0.5, 0.7};
  const auto li = diagonal_lossy(u, d);
  EXPECT_EQ(li.kind(), LossKind::diagonal);
  EXPECT_THROW(static_cast<void>(li.uniform_eta()), std::invalid_argument);
  Eigen::VectorXd s = singular_values(li.transfer());
  std::vector<double> got(s.data(), s.data() + s.size());
  std::vector<double> want;
  for (double x : d) want.push_back(std::sqrt(x));
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-10);
  EXPECT_THROW(diagonal_lossy(u, {1, 1, 1, 1.5}), std::invalid_argument);
  EXPECT_THROW(diagonal_lossy(u, {1, 1, 1}), std::invalid_argument);
}

TEST(General, RejectsAmplifyingTransfer) {
  ComplexMatrix t = 0.5 * haar_unitary(3, {1, 2});
  EXPECT_EQ(LossyInterferometer::general(t).kind(), LossKind::general);
  t(0, 0) += 2.0;
  EXPECT_THROW(LossyInterferometer::general(t), std::invalid_argument);
}

TEST(Embedding, Lossless) {
  const ComplexMatrix u = haar_unitary(4, {3, 3});
  const ComplexMatrix e = unitary_embedding(uniform_lossy(u, 1.0));
  EXPECT_LE(unitarity_defect(e), 1e-10);
  EXPECT_LE((e.topLeftCorner(4, 4) - u).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(e.topRightCorner(4, 4).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(e.bottomLeftCorner(4, 4).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Embedding, TotalLoss) {
  const ComplexMatrix e = unitary_embedding(uniform_lossy(haar_unitary(3, {3, 4}), 0.0));
  EXPECT_LE(unitarity_defect(e), 1e-10);
  EXPECT_LE(unitarity_defect(e.topRightCorner(3, 3)), 1e-12);
}

TEST(Embedding, PartialLossIsUnitary) {
  const auto li = uniform_lossy(haar_unitary(4, {3, 5}), 0.8);
  const ComplexMatrix e = unitary_embedding(li);
  EXPECT_LE(unitarity_defect(e), 1e-10);
  EXPECT_LE((e.topLeftCorner(4, 4) - li.transfer()).cwiseAbs().maxCoeff(), 0.0);

  const auto mixed = diagonal_lossy(haar_unitary(5, {3, 6}), {0.1, 0.4, 1.0, 0.0, 0.75});
  EXPECT_LE(unitarity_defect(unitary_embedding(mixed)), 1e-10);
}

TEST(MatrixJson, RoundTrip) {
  const ComplexMatrix u = haar_unitary(3, {10, 0});
  const ComplexMatrix back = matrix_from_json(matrix_to_json(u));
  EXPECT_EQ(back, u);

  const auto path = std::filesystem::temp_directory_path() / "bosondist_matrix_io_test.json";
  write_matrix_file(path.string(), u);
  EXPECT_EQ(read_matrix_file(path.string()), u);
  std::filesystem::remove(path);
}

TEST(MatrixJson, RejectsMalformed) {
  EXPECT_THROW(matrix_from_json(nlohmann::json{{"n", 2}, {"re", {1, 0, 0}}, {"im", {0, 0, 0, 0}}}),
               std::invalid_argument);
  EXPECT_THROW(matrix_from_json(nlohmann::json{{"n", 1}, {"re", {1}}}), std::invalid_argument);
  EXPECT_THROW(matrix_from_json(nlohmann::json::array()), std::invalid_argument);
  EXPECT_THROW(read_matrix_file("/nonexistent/bosondist.json"), std::invalid_argument);
}

}  // namespace
}  // namespace bosondist
