// Copyright 2026 The predrepo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PREDREPO_TYPES_HPP_
#define PREDREPO_TYPES_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace predrepo {

// Thrown for malformed or inconsistent repository contents and I/O failures.
class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProblemType : std::uint8_t { kBinary = 0, kMulticlass = 1, kRegression = 2 };

enum class MetricKind : std::uint8_t { kAucLoss, kLogLoss, kRmse };

constexpr MetricKind MetricFor(ProblemType problem) {
  switch (problem) {
    case ProblemType::kBinary:
      return MetricKind::kAucLoss;
    case ProblemType::kMulticlass:
      return MetricKind::kLogLoss;
    case ProblemType::kRegression:
      return MetricKind::kRmse;
  }
  return MetricKind::kRmse;
}

std::string_view ToString(ProblemType problem);
std::string_view ToString(MetricKind metric);
ProblemType ParseProblemType(std::string_view name);

enum class Split : std::uint8_t { kVal = 0, kTest = 1 };

struct TaskMeta {
  std::string dataset_id;
  int fold = 0;
  ProblemType problem = ProblemType::kRegression;
  std::uint32_t n_val = 0;
  std::uint32_t n_test = 0;
  std::uint32_t output_dim = 1;
  std::uint32_t n_features = 0;

  std::uint32_t rows(Split split) const { return split == Split::kVal ? n_val : n_test; }
};

struct ConfigMeta {
  std::string config_id;
  std::string family;
  bool is_default = false;
  std::string hyperparams;
};

struct EvaluationRecord {
  double loss_val = 0.0;
  double loss_test = 0.0;
  double time_fit = 0.0;
  double time_infer = 0.0;

  friend bool operator==(const EvaluationRecord&, const EvaluationRecord&) = default;
};

// Read-only view of a stored prediction matrix (row-major float32).
struct PredictionView {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::span<const float> values;

  float at(std::size_t row, std::size_t col) const { return values[row * cols + col]; }
};

// Owned row-major matrix used for computed predictions (ensembles, bag means).
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}

  double& at(std::size_t row, std::size_t col) { return values[row * cols + col]; }
  double at(std::size_t row, std::size_t col) const { return values[row * cols + col]; }

  static Matrix FromView(const PredictionView& view);
};

}  // namespace predrepo

#endif  // PREDREPO_TYPES_HPP_
