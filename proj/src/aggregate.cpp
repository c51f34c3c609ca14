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

#include "predrepo/aggregate.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace predrepo {
namespace {

void RequireMethods(const ResultTable& table, std::size_t minimum, const char* op) {
  if (table.num_methods() < minimum) {
    throw std::invalid_argument(std::string(op) + ": needs at least " + std::to_string(minimum) + " methods");
  }
}

std::string TaskName(const TaskKey& key) { return key.dataset + "/" + std::to_string(key.fold); }

}  // namespace

double Mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

ResultTable ResultTable::FromMethods(const std::vector<MethodResults>& methods) {
  if (methods.empty()) throw std::invalid_argument("no methods to compare");
  ResultTable table;
  table.tasks = methods.front().tasks;
  std::map<TaskKey, std::size_t> position;
  for (std::size_t i = 0; i < table.tasks.size(); ++i) {
    if (!position.emplace(table.tasks[i], i).second) {
      throw std::invalid_argument("method " + methods.front().method + " lists task " + TaskName(table.tasks[i]) +
                                  " twice");
    }
  }

  std::string missing;
  for (const auto& m : methods) {
    if (m.loss.size() != m.tasks.size() || (!m.time_fit.empty() && m.time_fit.size() != m.tasks.size()) ||
        (!m.time_infer.empty() && m.time_infer.size() != m.tasks.size())) {
      throw std::invalid_argument("method " + m.method + ": column lengths differ");
    }
    std::vector<double> loss(table.tasks.size());
    std::vector<double> fit(table.tasks.size(), 0.0);
    std::vector<double> infer(table.tasks.size(), 0.0);
    std::vector<bool> seen(table.tasks.size(), false);
    for (std::size_t i = 0; i < m.tasks.size(); ++i) {
      const auto it = position.find(m.tasks[i]);
      if (it == position.end()) {
        missing += " (" + methods.front().method + ", " + TaskName(m.tasks[i]) + ")";
        continue;
      }
      if (seen[it->second]) throw std::invalid_argument("method " + m.method + " lists task " + TaskName(m.tasks[i]) + " twice");
      seen[it->second] = true;
      loss[it->second] = m.loss[i];
      if (!m.time_fit.empty()) fit[it->second] = m.time_fit[i];
      if (!m.time_infer.empty()) infer[it->second] = m.time_infer[i];
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
      if (!seen[i]) missing += " (" + m.method + ", " + TaskName(table.tasks[i]) + ")";
    }
    table.methods.push_back(m.method);
    table.loss.push_back(std::move(loss));
    table.time_fit.push_back(std::move(fit));
    table.time_infer.push_back(std::move(infer));
  }
  if (!missing.empty()) throw TaskSetMismatch("task sets differ; missing cells:" + missing);

  std::map<std::string, std::size_t> dataset_index;
  for (std::size_t i = 0; i < table.tasks.size(); ++i) {
    const auto [it, inserted] = dataset_index.emplace(table.tasks[i].dataset, table.datasets.size());
    if (inserted) {
      table.datasets.push_back(table.tasks[i].dataset);
      table.dataset_tasks.emplace_back();
    }
    table.dataset_tasks[it->second].push_back(i);
  }
  return table;
}

double ResultTable::DatasetMean(std::size_t method, std::size_t d) const {
  double sum = 0.0;
  for (std::size_t t : dataset_tasks[d]) sum += loss[method][t];
  return sum / static_cast<double>(dataset_tasks[d].size());
}

double LowerMedian(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  return values[(values.size() + 1) / 2 - 1];
}

std::vector<double> FractionalRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

std::vector<std::vector<double>> NormalizedError(const ResultTable& table) {
  RequireMethods(table, 2, "normalized_error");
  const std::size_t k = table.num_methods();
  std::vector<std::vector<double>> out(k, std::vector<double>(table.num_tasks()));
  std::vector<double> column(k);
  for (std::size_t t = 0; t < table.num_tasks(); ++t) {
    for (std::size_t m = 0; m < k; ++m) column[m] = table.loss[m][t];
    const double top = *std::min_element(column.begin(), column.end());
    const double base = LowerMedian(column);
    const double denom = std::max(base - top, kNormalizedErrorMinDenominator);
    for (std::size_t m = 0; m < k; ++m) out[m][t] = std::clamp((column[m] - top) / denom, 0.0, 1.0);
  }
  return out;
}

std::vector<double> AverageRank(const ResultTable& table) {
  RequireMethods(table, 1, "average_rank");
  const std::size_t k = table.num_methods();
  std::vector<double> sum(k, 0.0);
  std::vector<double> column(k);
  for (std::size_t t = 0; t < table.num_tasks(); ++t) {
    for (std::size_t m = 0; m < k; ++m) column[m] = table.loss[m][t];
    const auto ranks = FractionalRanks(column);
    for (std::size_t m = 0; m < k; ++m) sum[m] += ranks[m];
  }
  for (double& s : sum) s /= static_cast<double>(table.num_tasks());
  return sum;
}

WinRate ComputeWinRate(const ResultTable& table, std::size_t a, std::size_t b) {
  if (a >= table.num_methods() || b >= table.num_methods()) throw std::out_of_range("winrate: unknown method");
  if (table.num_datasets() == 0) throw std::invalid_argument("winrate: no datasets");
  WinRate out;
  for (std::size_t d = 0; d < table.num_datasets(); ++d) {
    const double la = table.DatasetMean(a, d);
    const double lb = table.DatasetMean(b, d);
    if (la < lb) {
      ++out.n_better;
    } else if (lb < la) {
      ++out.n_worse;
    } else {
      ++out.n_tied;
    }
  }
  out.winrate = (out.n_better + 0.5 * out.n_tied) / static_cast<double>(table.num_datasets());
  return out;
}

std::vector<double> RescaledLoss(const ResultTable& table) {
  RequireMethods(table, 2, "rescaled_loss");
  const std::size_t k = table.num_methods();
  std::vector<double> sum(k, 0.0);
  std::vector<double> means(k);
  for (std::size_t d = 0; d < table.num_datasets(); ++d) {
    for (std::size_t m = 0; m < k; ++m) means[m] = table.DatasetMean(m, d);
    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    const double min = *lo;
    const double range = *hi - *lo;
    for (std::size_t m = 0; m < k; ++m) sum[m] += range > 0.0 ? (means[m] - min) / range : 0.0;
  }
  for (double& s : sum) s /= static_cast<double>(table.num_datasets());
  return sum;
}

std::vector<ReportRow> Table2Rows(const ResultTable& table) {
  const auto errors = NormalizedError(table);
  const auto ranks = AverageRank(table);
  std::vector<ReportRow> rows;
  for (std::size_t m = 0; m < table.num_methods(); ++m) {
    rows.push_back({table.methods[m], Mean(errors[m]), ranks[m], Mean(table.time_fit[m]), Mean(table.time_infer[m])});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.normalized_error != b.normalized_error) return a.normalized_error < b.normalized_error;
    return a.method < b.method;
  });
  return rows;
}

std::vector<WinRateRow> WinRateRows(const ResultTable& table, std::size_t baseline) {
  const std::size_t k = table.num_methods();
  const std::vector<double> rescaled = k >= 2 ? RescaledLoss(table) : std::vector<double>(k, 0.0);
  const std::vector<double> ranks = AverageRank(table);
  std::vector<WinRateRow> rows;
  for (std::size_t m = 0; m < k; ++m) {
    rows.push_back({table.methods[m], ComputeWinRate(table, m, baseline), Mean(table.time_fit[m]),
                    Mean(table.time_infer[m]), rescaled[m], ranks[m]});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const WinRateRow& a, const WinRateRow& b) {
    if (a.rescaled_loss != b.rescaled_loss) return a.rescaled_loss < b.rescaled_loss;
    return a.method < b.method;
  });
  return rows;
}

}  // namespace predrepo
