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

// JSON exchange format for square matrices:
//   {"n": M, "re": [row-major reals], "im": [row-major imaginaries]}

#include <fstream>
#include <string>

#include <json.hpp>

#include "bosondist/errors.hpp"
#include "bosondist/matcore.hpp"

namespace bosondist {

inline nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  detail::require(m.rows() == m.cols(), "matrix_to_json: matrix must be square");
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  }
  return {{"n", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

namespace detail {

inline ComplexMatrix matrix_from_json_unchecked(const nlohmann::json& j) {
  detail::require(j.is_object() && j.contains("n") && j.contains("re") && j.contains("im"),
                  "matrix json: expected keys n, re, im");
  const auto n = j.at("n").get<long long>();
  detail::require(n >= 1, "matrix json: n must be at least 1");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  const auto count = static_cast<std::size_t>(n * n);
  detail::require(re.is_array() && re.size() == count, "matrix json: re must hold n*n numbers");
  detail::require(im.is_array() && im.size() == count, "matrix json: im must hold n*n numbers");
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < count; ++i) {
    const auto r = static_cast<Eigen::Index>(i / static_cast<std::size_t>(n));
    const auto c = static_cast<Eigen::Index>(i % static_cast<std::size_t>(n));
    m(r, c) = Complex(re[i].get<double>(), im[i].get<double>());
  }
  detail::require(all_finite(m), "matrix json: non-finite entry");
  return m;
}

}  // namespace detail

/// {"n": M, "re": [...], "im": [...]}, row-major.
inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  try {
    return detail::matrix_from_json_unchecked(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("matrix json: ") + e.what());
  }
}

inline ComplexMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  detail::require(in.good(), "cannot open matrix file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("matrix file " + path + ": " + e.what());
  }
  return matrix_from_json(j);
}

inline void write_matrix_file(const std::string& path, const ComplexMatrix& m) {
  std::ofstream out(path);
  detail::require(out.good(), "cannot write matrix file " + path);
  out << matrix_to_json(m).dump() << '\n';
}

}  // namespace bosondist
