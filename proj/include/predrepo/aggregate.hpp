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

// Cross-method comparison: normalized error, fractional ranks, win rates and
// rescaled losses over a common set of tasks. All inputs are test losses
// where lower is better.

#ifndef PREDREPO_AGGREGATE_HPP_
#define PREDREPO_AGGREGATE_HPP_

#include <compare>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace predrepo {

inline constexpr double kNormalizedErrorMinDenominator = 1e-5;

struct TaskKey {
  std::string dataset;
  int fold = 0;

  friend auto operator<=>(const TaskKey&, const TaskKey&) = default;
};

struct MethodResults {
  std::string method;
  std::vector<TaskKey> tasks;
  std::vector<double> loss;
  // Optional; either empty or one entry per task.
  std::vector<double> time_fit;
  std::vector<double> time_infer;
};

// Thrown when compared methods do not cover the same tasks. The message
// lists the missing (method, task) cells.
class TaskSetMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Methods aligned on a common task order (the first method's order).
// Datasets are grouped in order of first appearance.
struct ResultTable {
  std::vector<std::string> methods;
  std::vector<TaskKey> tasks;
  std::vector<std::vector<double>> loss;        // [method][task]
  std::vector<std::vector<double>> time_fit;    // [method][task], zeros if absent
  std::vector<std::vector<double>> time_infer;  // [method][task], zeros if absent
  std::vector<std::string> datasets;
  std::vector<std::vector<std::size_t>> dataset_tasks;  // task indices per dataset

  static ResultTable FromMethods(const std::vector<MethodResults>& methods);

  std::size_t num_methods() const { return methods.size(); }
  std::size_t num_tasks() const { return tasks.size(); }
  std::size_t num_datasets() const { return datasets.size(); }
  // Mean loss of one method over the folds of dataset `d`.
  double DatasetMean(std::size_t method, std::size_t d) const;
};

// Element at index ceil(k/2) - 1 of the sorted values.
double LowerMedian(std::vector<double> values);

// Ranks starting at 1 for the lowest value; ties share the mean of the
// positions they occupy.
std::vector<double> FractionalRanks(std::span<const double> values);

// Per task: (loss - min) / max(lower_median - min, 1e-5), clipped to [0, 1].
// Returns [method][task]. Needs at least two methods.
std::vector<std::vector<double>> NormalizedError(const ResultTable& table);

// Mean over tasks of each method's fractional rank.
std::vector<double> AverageRank(const ResultTable& table);

struct WinRate {
  double winrate = 0.0;
  int n_better = 0;  // datasets where a has the strictly lower mean loss
  int n_worse = 0;
  int n_tied = 0;    // exact floating-point equality
};

// Compares per-dataset mean fold losses of methods a and b.
// winrate = (n_better + 0.5 * n_tied) / num_datasets.
WinRate ComputeWinRate(const ResultTable& table, std::size_t a, std::size_t b);

// Per dataset, fold-mean losses min-max rescaled across methods (all 0 when
// every method ties), then averaged over datasets. Needs two methods.
std::vector<double> RescaledLoss(const ResultTable& table);

struct ReportRow {
  std::string method;
  double normalized_error = 0.0;
  double rank = 0.0;
  double time_fit_s = 0.0;
  double time_infer_s = 0.0;
};

// One row per method, sorted by normalized error ascending (then name).
std::vector<ReportRow> Table2Rows(const ResultTable& table);

struct WinRateRow {
  std::string method;
  WinRate winrate;
  double time_fit_s = 0.0;
  double time_infer_s = 0.0;
  double rescaled_loss = 0.0;
  double rank = 0.0;
};

// Every method compared against `baseline`, sorted by rescaled loss
// ascending (then name).
std::vector<WinRateRow> WinRateRows(const ResultTable& table, std::size_t baseline);

double Mean(std::span<const double> values);

}  // namespace predrepo

#endif  // PREDREPO_AGGREGATE_HPP_
