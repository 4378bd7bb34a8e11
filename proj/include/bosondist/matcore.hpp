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

// Dense complex matrices and the matrix permanent.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "bosondist/errors.hpp"

namespace bosondist {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr int kDefaultPermanentCap = 30;
inline constexpr int kNaivePermanentCap = 9;

struct PermanentOptions {
  // Dimensions above this are refused with resource_error.
  int max_dim = kDefaultPermanentCap;
  // Number of contiguous Gray-code blocks. Each block runs on its own thread
  // when greater than one; partial sums are added in block order, so the
  // result depends on the block count but not on thread scheduling.
  int blocks = 1;
};

namespace detail {

// Sum over subsets k in [begin, end) of the Gray-code sequence of
// (-1)^{|S|} prod_i sum_{j in S} a(i, j), where S = k ^ (k >> 1).
template <typename Scalar>
Scalar ryser_block(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a,
                   std::uint64_t begin, std::uint64_t end) {
  const auto n = static_cast<int>(a.rows());
  std::vector<Scalar> rowsum(static_cast<std::size_t>(n), Scalar(0));

  // Row sums of the subset preceding the block.
  const std::uint64_t start = (begin - 1) ^ ((begin - 1) >> 1);
  for (int j = 0; j < n; ++j) {
    if ((start >> j) & 1u) {
      for (int i = 0; i < n; ++i) rowsum[static_cast<std::size_t>(i)] += a(i, j);
    }
  }
  bool odd = (std::popcount(start) & 1) != 0;

  Scalar total(0);
  for (std::uint64_t k = begin; k < end; ++k) {
    const int j = std::countr_zero(k);
    const std::uint64_t subset = k ^ (k >> 1);
    const Scalar* col = a.data() + static_cast<std::ptrdiff_t>(j) * n;
    if ((subset >> j) & 1u) {
      for (int i = 0; i < n; ++i) rowsum[static_cast<std::size_t>(i)] += col[i];
    } else {
      for (int i = 0; i < n; ++i) rowsum[static_cast<std::size_t>(i)] -= col[i];
    }
    odd = !odd;

    Scalar prod = rowsum[0];
    for (int i = 1; i < n; ++i) prod *= rowsum[static_cast<std::size_t>(i)];
    if (odd) {
      total -= prod;
    } else {
      total += prod;
    }
  }
  return total;
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace detail

/// Permanent by Ryser's formula, visiting column subsets in Gray-code order
/// so each step updates the row sums in O(n). Total cost O(2^n n).
///
/// The permanent of the 0x0 matrix is 1.
template <typename Derived>
typename Derived::Scalar permanent(const Eigen::MatrixBase<Derived>& m,
                                   const PermanentOptions& opts = {}) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(m, "permanent");
  const auto n = static_cast<int>(m.rows());
  if (n > opts.max_dim || n > 62) {
    throw resource_error("permanent: dimension " + std::to_string(n) +
                         " exceeds the configured cap " + std::to_string(opts.max_dim));
  }
  if (n == 0) return Scalar(1);

  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a = m;
  const std::uint64_t steps = (std::uint64_t{1} << n) - 1;
  const auto blocks = static_cast<std::uint64_t>(
      std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(opts.blocks, 1)), 1, steps));

  std::vector<Scalar> partial(static_cast<std::size_t>(blocks), Scalar(0));
  auto bound = [&](std::uint64_t b) { return 1 + (steps / blocks) * b + std::min(b, steps % blocks); };
  if (blocks == 1) {
    partial[0] = detail::ryser_block(a, 1, steps + 1);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(blocks));
    for (std::uint64_t b = 0; b < blocks; ++b) {
      workers.emplace_back([&, b] { partial[static_cast<std::size_t>(b)] = detail::ryser_block(a, bound(b), bound(b + 1)); });
    }
    for (auto& w : workers) w.join();
  }

  Scalar total(0);
  for (const auto& p : partial) total += p;
  return (n % 2 == 1) ? Scalar(-total) : total;
}

/// Direct sum over all n! permutations. Oracle for `permanent`; n <= 9.
template <typename Derived>
typename Derived::Scalar permanent_naive(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(m, "permanent_naive");
  const auto n = static_cast<int>(m.rows());
  if (n > kNaivePermanentCap) {
    throw resource_error("permanent_naive: dimension " + std::to_string(n) + " exceeds " +
                         std::to_string(kNaivePermanentCap));
  }
  std::vector<int> sigma(static_cast<std::size_t>(n));
  std::iota(sigma.begin(), sigma.end(), 0);
  Scalar total(0);
  do {
    Scalar prod(1);
    for (int k = 0; k < n; ++k) prod *= m(k, sigma[static_cast<std::size_t>(k)]);
    total += prod;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return total;
}

/// Rows and columns restricted to `keep` (0-based), in ascending index order.
/// An empty `keep` gives the 0x0 matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> principal_submatrix(
    const Eigen::MatrixBase<Derived>& m, std::span<const int> keep) {
  detail::require_square(m, "principal_submatrix");
  std::vector<int> idx(keep.begin(), keep.end());
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) {
    throw std::invalid_argument("principal_submatrix: duplicate index");
  }
  for (int k : idx) {
    if (k < 0 || k >= m.rows()) {
      throw std::invalid_argument("principal_submatrix: index " + std::to_string(k) +
                                  " out of range for dimension " + std::to_string(m.rows()));
    }
  }
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) out(r, c) = m(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
  }
  return out;
}

/// max |(m m^dagger - I)_{kl}|.
inline double unitarity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m * m.adjoint() - ComplexMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

inline bool is_unitary(const ComplexMatrix& m, double tol = 1e-10) {
  return m.rows() == m.cols() && m.rows() >= 1 && unitarity_defect(m) <= tol;
}

inline bool all_finite(const ComplexMatrix& m) {
  return m.real().allFinite() && m.imag().allFinite();
}

}  // namespace bosondist
