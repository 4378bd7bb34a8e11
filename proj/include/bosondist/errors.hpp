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

#include <stdexcept>
#include <string>

namespace bosondist {

// Refusal to run a computation whose cost exceeds a configured cap
// (permanent dimension, inclusion-exclusion budget, brute-force size).
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical result violated a guaranteed property, e.g. a probability with
// a non-negligible imaginary part or a non-finite ensemble trial.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The two distributions cannot be told apart at the requested order (W1 = 0).
class indistinguishable_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace detail

}  // namespace bosondist
