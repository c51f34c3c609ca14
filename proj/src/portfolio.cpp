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

#include "predrepo/portfolio.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace predrepo {
namespace {

std::vector<std::size_t> SortedUnique(std::span<const std::size_t> values) {
  std::vector<std::size_t> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::string_view ToString(Aggregation aggregation) {
  return aggregation == Aggregation::kRawLoss ? "raw" : "normalized";
}

Aggregation ParseAggregation(std::string_view name) {
  if (name == "raw" || name == "raw_loss") return Aggregation::kRawLoss;
  if (name == "normalized" || name == "normalized_loss") return Aggregation::kNormalizedLoss;
  throw std::invalid_argument("unknown aggregation: " + std::string(name));
}

LossTable BuildLossTable(const Repository& repo, std::span<const std::size_t> tasks,
                         std::span<const std::size_t> candidates, Aggregation aggregation) {
  LossTable table;
  table.tasks = SortedUnique(tasks);
  table.candidates = SortedUnique(candidates);
  const std::size_t width = table.candidates.size();
  table.loss.resize(table.tasks.size() * width);
  for (std::size_t t = 0; t < table.tasks.size(); ++t) {
    double* row = table.loss.data() + t * width;
    for (std::size_t c = 0; c < width; ++c) row[c] = repo.Evaluation(table.tasks[t], table.candidates[c]).loss_val;
    if (aggregation == Aggregation::kNormalizedLoss && width > 0) {
      const auto [lo, hi] = std::minmax_element(row, row + width);
      const double min = *lo;
      const double range = *hi - *lo;
      for (std::size_t c = 0; c < width; ++c) row[c] = range > 0.0 ? (row[c] - min) / range : 0.0;
    }
  }
  return table;
}

Portfolio LearnPortfolio(const LossTable& table, int n_max, Aggregation aggregation) {
  if (table.tasks.empty()) throw std::invalid_argument("learn_portfolio: no training tasks");
  if (table.candidates.empty()) throw std::invalid_argument("learn_portfolio: no candidates");
  if (n_max < 1) throw std::invalid_argument("learn_portfolio: n_max must be positive");

  const std::size_t num_tasks = table.tasks.size();
  const std::size_t width = table.candidates.size();
  const std::size_t limit = std::min<std::size_t>(static_cast<std::size_t>(n_max), width);

  Portfolio portfolio;
  portfolio.aggregation = aggregation;
  std::vector<double> current(num_tasks, std::numeric_limits<double>::infinity());
  std::vector<bool> picked(width, false);
  while (portfolio.configs.size() < limit) {
    std::size_t best = width;
    double best_objective = 0.0;
    for (std::size_t c = 0; c < width; ++c) {
      if (picked[c]) continue;
      double sum = 0.0;
      for (std::size_t t = 0; t < num_tasks; ++t) sum += std::min(current[t], table.at(t, c));
      const double objective = sum / static_cast<double>(num_tasks);
      if (best == width || objective < best_objective) {
        best = c;
        best_objective = objective;
      }
    }
    picked[best] = true;
    for (std::size_t t = 0; t < num_tasks; ++t) current[t] = std::min(current[t], table.at(t, best));
    portfolio.configs.push_back(table.candidates[best]);
    portfolio.objective_trajectory.push_back(best_objective);
  }
  return portfolio;
}

Portfolio LearnPortfolio(const Repository& repo, std::span<const std::size_t> train_tasks,
                         std::span<const std::size_t> candidates, int n_max, Aggregation aggregation) {
  return LearnPortfolio(BuildLossTable(repo, train_tasks, candidates, aggregation), n_max, aggregation);
}

std::vector<std::size_t> LooTrainTasks(const Repository& repo, std::string_view held_out_dataset) {
  repo.FindDataset(held_out_dataset);
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < repo.num_tasks(); ++t) {
    if (repo.task(t).dataset_id != held_out_dataset) out.push_back(t);
  }
  return out;
}

}  // namespace predrepo
