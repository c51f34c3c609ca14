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

#include "predrepo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace predrepo {
namespace {

void CheckFinite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + " contains NaN or infinity");
    }
  }
}

}  // namespace

std::string_view ToString(ProblemType problem) {
  switch (problem) {
    case ProblemType::kBinary:
      return "binary";
    case ProblemType::kMulticlass:
      return "multiclass";
    case ProblemType::kRegression:
      return "regression";
  }
  return "unknown";
}

std::string_view ToString(MetricKind metric) {
  switch (metric) {
    case MetricKind::kAucLoss:
      return "auc_loss";
    case MetricKind::kLogLoss:
      return "log_loss";
    case MetricKind::kRmse:
      return "rmse";
  }
  return "unknown";
}

ProblemType ParseProblemType(std::string_view name) {
  if (name == "binary") return ProblemType::kBinary;
  if (name == "multiclass") return ProblemType::kMulticlass;
  if (name == "regression") return ProblemType::kRegression;
  throw std::invalid_argument("unknown problem type: " + std::string(name));
}

Matrix Matrix::FromView(const PredictionView& view) {
  Matrix out(view.rows, view.cols);
  std::copy(view.values.begin(), view.values.end(), out.values.begin());
  return out;
}

double Rmse(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) {
    throw std::invalid_argument("rmse: length mismatch");
  }
  if (pred.empty()) {
    throw std::invalid_argument("rmse: empty input");
  }
  CheckFinite(pred, "rmse prediction");
  CheckFinite(target, "rmse target");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double diff = pred[i] - target[i];
    sum += diff * diff;
  }
  return std::sqrt(sum / static_cast<double>(pred.size()));
}

double AucLoss(std::span<const double> score, std::span<const double> label) {
  if (score.size() != label.size()) {
    throw std::invalid_argument("auc_loss: length mismatch");
  }
  if (score.empty()) {
    throw std::invalid_argument("auc_loss: empty input");
  }
  CheckFinite(score, "auc_loss score");
  const std::size_t n = score.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });

  // Sum of (1-based, tie-averaged) ranks of the positives. Ranks are
  // half-integers, so the sum is exact in double for any practical n.
  double positive_rank_sum = 0.0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && score[order[j]] == score[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      const double y = label[order[k]];
      if (y == 1.0) {
        positive_rank_sum += mean_rank;
        ++n_pos;
      } else if (y != 0.0) {
        throw std::invalid_argument("auc_loss: labels must be 0 or 1");
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("AUC undefined: labels contain a single class");
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  const double wins = positive_rank_sum - np * (np + 1.0) / 2.0;
  return 1.0 - wins / (np * nn);
}

double LogLoss(std::span<const double> probs, std::size_t num_classes,
               std::span<const double> label) {
  if (num_classes < 2) {
    throw std::invalid_argument("log_loss: need at least two classes");
  }
  if (label.empty() || probs.size() != label.size() * num_classes) {
    throw std::invalid_argument("log_loss: shape mismatch");
  }
  CheckFinite(probs, "log_loss probabilities");
  double sum = 0.0;
  for (std::size_t i = 0; i < label.size(); ++i) {
    const double y = label[i];
    if (!(y >= 0.0) || y >= static_cast<double>(num_classes) || y != std::floor(y)) {
      throw std::invalid_argument("log_loss: label out of range");
    }
    const auto row = probs.subspan(i * num_classes, num_classes);
    double row_sum = 0.0;
    for (double p : row) row_sum += p;
    if (std::abs(row_sum - 1.0) > kRowSumTolerance) {
      throw std::invalid_argument("log_loss: row " + std::to_string(i) + " is not row-stochastic");
    }
    const double p = std::clamp(row[static_cast<std::size_t>(y)], kLogLossEpsilon, 1.0 - kLogLossEpsilon);
    sum -= std::log(p);
  }
  return sum / static_cast<double>(label.size());
}

double TaskLoss(const TaskMeta& task, Split split, std::span<const double> pred,
                std::span<const double> target) {
  const std::size_t rows = task.rows(split);
  if (target.size() != rows || pred.size() != rows * static_cast<std::size_t>(task.output_dim)) {
    throw std::invalid_argument("task_loss: prediction shape does not match task " + task.dataset_id +
                                "/" + std::to_string(task.fold));
  }
  switch (MetricFor(task.problem)) {
    case MetricKind::kAucLoss:
      return AucLoss(pred, target);
    case MetricKind::kLogLoss:
      return LogLoss(pred, task.output_dim, target);
    case MetricKind::kRmse:
      return Rmse(pred, target);
  }
  throw std::logic_error("unreachable");
}

}  // namespace predrepo
