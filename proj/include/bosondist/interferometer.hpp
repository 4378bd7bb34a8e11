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

// Unitary and lossy linear interferometers.
//
// Convention: row k is the input port, column l the output port, so
// a_k^dagger = sum_l U(k, l) b_l^dagger. Losses act on rows: sqrt(D) U.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "bosondist/errors.hpp"
#include "bosondist/matcore.hpp"
#include "bosondist/rng.hpp"

namespace bosondist {

inline constexpr double kSingularValueTol = 1e-10;

enum class LossKind { unitary, uniform, diagonal, general };

/// Transfer matrix of a (possibly lossy) M-port. Every constructor checks that
/// no singular value exceeds 1 + 1e-10.
class LossyInterferometer {
 public:
  static LossyInterferometer unitary(ComplexMatrix u) {
    require_unitary(u, "LossyInterferometer::unitary");
    return LossyInterferometer(std::move(u), LossKind::unitary, 1.0, {});
  }

  static LossyInterferometer uniform(const ComplexMatrix& u, double eta) {
    require_unitary(u, "uniform_lossy");
    detail::require(eta >= 0.0 && eta <= 1.0, "uniform_lossy: eta must lie in [0, 1]");
    return LossyInterferometer(std::sqrt(eta) * u, LossKind::uniform, eta, {});
  }

  static LossyInterferometer diagonal(const ComplexMatrix& u, std::vector<double> d) {
    require_unitary(u, "diagonal_lossy");
    detail::require(static_cast<Eigen::Index>(d.size()) == u.rows(),
                    "diagonal_lossy: need one transmission per port");
    ComplexMatrix t = u;
    for (Eigen::Index k = 0; k < u.rows(); ++k) {
      const double dk = d[static_cast<std::size_t>(k)];
      detail::require(dk >= 0.0 && dk <= 1.0, "diagonal_lossy: transmissions must lie in [0, 1]");
      t.row(k) *= std::sqrt(dk);
    }
    return LossyInterferometer(std::move(t), LossKind::diagonal, 0.0, std::move(d));
  }

  static LossyInterferometer general(ComplexMatrix transfer) {
    detail::require(transfer.rows() == transfer.cols() && transfer.rows() >= 1,
                    "LossyInterferometer::general: transfer must be square and non-empty");
    detail::require(all_finite(transfer), "LossyInterferometer::general: non-finite entry");
    const double smax = Eigen::JacobiSVD<ComplexMatrix>(transfer).singularValues()(0);
    if (smax > 1.0 + kSingularValueTol) {
      throw std::invalid_argument("LossyInterferometer::general: singular value " +
                                  std::to_string(smax) + " exceeds 1");
    }
    return LossyInterferometer(std::move(transfer), LossKind::general, 0.0, {});
  }

  const ComplexMatrix& transfer() const { return transfer_; }
  LossKind kind() const { return kind_; }
  int modes() const { return static_cast<int>(transfer_.rows()); }

  // Transmission for unitary (1) and uniform interferometers.
  double uniform_eta() const {
    if (kind_ != LossKind::unitary && kind_ != LossKind::uniform) {
      throw std::invalid_argument("LossyInterferometer: not a uniform-loss interferometer");
    }
    return eta_;
  }

  const std::vector<double>& transmissions() const { return transmissions_; }

 private:
  LossyInterferometer(ComplexMatrix t, LossKind kind, double eta, std::vector<double> d)
      : transfer_(std::move(t)), kind_(kind), eta_(eta), transmissions_(std::move(d)) {}

  static void require_unitary(const ComplexMatrix& u, const char* what) {
    detail::require(u.rows() == u.cols() && u.rows() >= 1,
                    std::string(what) + ": matrix must be square and non-empty");
    detail::require(all_finite(u), std::string(what) + ": non-finite entry");
    if (unitarity_defect(u) > kSingularValueTol) {
      throw std::invalid_argument(std::string(what) + ": matrix is not unitary");
    }
  }

  ComplexMatrix transfer_;
  LossKind kind_;
  double eta_;
  std::vector<double> transmissions_;
};

inline LossyInterferometer uniform_lossy(const ComplexMatrix& u, double eta) {
  return LossyInterferometer::uniform(u, eta);
}

inline LossyInterferometer diagonal_lossy(const ComplexMatrix& u, std::vector<double> d) {
  return LossyInterferometer::diagonal(u, std::move(d));
}

namespace detail {

// Q factor of a complex-Gaussian m x cols matrix with each column rescaled by
// the phase of R's diagonal. Entry (i, j) is Gaussian number j * m + i of the
// stream, so the leading columns do not depend on how many are requested.
inline ComplexMatrix haar_leading_columns(int m, int cols, const RandomSeed& rng) {
  ComplexMatrix z(m, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < m; ++i) {
      z(i, j) = complex_gaussian(rng, static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(m) +
                                          static_cast<std::uint64_t>(i));
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(m, cols);
  const ComplexMatrix& r = qr.matrixQR();
  for (int j = 0; j < cols; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

}  // namespace detail

/// Haar-random m x m unitary. The diagonal-phase correction of the QR factor
/// is what makes the distribution Haar rather than merely unitary.
inline ComplexMatrix haar_unitary(int m, const RandomSeed& rng) {
  detail::require(m >= 1, "haar_unitary: m must be at least 1");
  return detail::haar_leading_columns(m, m, rng);
}

/// First `cols` columns of haar_unitary(m, rng), up to rounding.
inline ComplexMatrix haar_columns(int m, int cols, const RandomSeed& rng) {
  detail::require(m >= 1, "haar_columns: m must be at least 1");
  detail::require(cols >= 1 && cols <= m, "haar_columns: need 1 <= cols <= m");
  return detail::haar_leading_columns(m, cols, rng);
}

/// F(k, l) = exp(2 pi i k l / m) / sqrt(m), with k, l counted from 1.
inline ComplexMatrix fourier(int m) {
  detail::require(m >= 1, "fourier: m must be at least 1");
  ComplexMatrix f(m, m);
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  for (int k = 1; k <= m; ++k) {
    for (int l = 1; l <= m; ++l) {
      const auto phase = static_cast<double>((static_cast<long long>(k) * l) % m);
      f(k - 1, l - 1) = std::polar(norm, 2.0 * std::numbers::pi * phase / m);
    }
  }
  return f;
}

/// F(m) * (1 (+) v). Output port 1 is balanced: |U(k, 1)|^2 = 1/m for all k.
inline ComplexMatrix balanced_composite(const ComplexMatrix& v, int m) {
  detail::require(m >= 2, "balanced_composite: m must be at least 2");
  detail::require(v.rows() == m - 1 && v.cols() == m - 1,
                  "balanced_composite: v must be (m-1)x(m-1)");
  detail::require(is_unitary(v, kSingularValueTol), "balanced_composite: v is not unitary");
  ComplexMatrix block = ComplexMatrix::Zero(m, m);
  block(0, 0) = 1.0;
  block.bottomRightCorner(m - 1, m - 1) = v;
  return fourier(m) * block;
}

/// 2M x 2M unitary [[T, V], [-V^dagger F, sqrt(D)]] containing the transfer
/// matrix T. With the SVD T = P S Q^dagger we take F = P Q^dagger (so
/// T = sqrt(T T^dagger) F), V = P sqrt(1 - S^2) and D = S^2. When T is
/// singular F is one of many valid completions; probabilities over the
/// physical ports do not depend on the choice.
inline ComplexMatrix unitary_embedding(const LossyInterferometer& li) {
  const ComplexMatrix& t = li.transfer();
  const Eigen::Index m = t.rows();
  Eigen::JacobiSVD<ComplexMatrix> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  if (s(0) > 1.0 + kSingularValueTol) {
    throw std::invalid_argument("unitary_embedding: singular value exceeds 1");
  }
  const ComplexMatrix& p = svd.matrixU();
  const ComplexMatrix f = p * svd.matrixV().adjoint();
  Eigen::VectorXd loss(m);
  Eigen::VectorXd gain(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    // Snap rounding-level deficits so a lossless transfer embeds with zero
    // off-diagonal blocks instead of ~1e-8 ones.
    const double sk = (1.0 - s(k) <= 1e-12) ? 1.0 : s(k);
    loss(k) = std::sqrt(std::max(0.0, 1.0 - sk * sk));
    gain(k) = sk;
  }
  const ComplexMatrix v = p * loss.cast<Complex>().asDiagonal();

  ComplexMatrix out(2 * m, 2 * m);
  out.topLeftCorner(m, m) = t;
  out.topRightCorner(m, m) = v;
  out.bottomLeftCorner(m, m) = -v.adjoint() * f;
  out.bottomRightCorner(m, m) = gain.cast<Complex>().asDiagonal();
  return out;
}

}  // namespace bosondist
