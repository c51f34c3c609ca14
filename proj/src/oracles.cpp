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

#include "predrepo/oracles.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "predrepo/metrics.hpp"

namespace predrepo {

double OracleAucPairwise(std::span<const double> score, std::span<const double> label) {
  if (score.size() != label.size() || score.empty()) throw std::invalid_argument("oracle auc: bad input");
  double wins = 0.0;
  double n_pos = 0.0;
  double n_neg = 0.0;
  for (std::size_t i = 0; i < score.size(); ++i) {
    if (label[i] == 1.0) {
      n_pos += 1.0;
    } else {
      n_neg += 1.0;
    }
  }
  if (n_pos == 0.0 || n_neg == 0.0) throw std::invalid_argument("AUC undefined: labels contain a single class");
  for (std::size_t i = 0; i < score.size(); ++i) {
    if (label[i] != 1.0) continue;
    for (std::size_t j = 0; j < score.size(); ++j) {
      if (label[j] == 1.0) continue;
      if (score[i] > score[j]) {
        wins += 1.0;
      } else if (score[i] == score[j]) {
        wins += 0.5;
      }
    }
  }
  return 1.0 - wins / (n_pos * n_neg);
}

std::size_t OracleEnsembleExtension(const Repository& repo, std::size_t task, std::span<const std::size_t> picks,
                                    std::span<const std::size_t> candidates) {
  std::vector<std::size_t> pool(candidates.begin(), candidates.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  if (pool.empty()) throw std::invalid_argument("oracle: no candidates");
  if (pool.size() > kOracleMaxCandidates) throw std::invalid_argument("oracle: too many candidates");

  const TaskMeta& meta = repo.task(task);
  const auto labels = repo.Labels(task, Split::kVal);
  const double denom = static_cast<double>(picks.size() + 1);
  std::size_t best = pool.front();
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t candidate : pool) {
    const auto cand = repo.Predict(task, candidate, Split::kVal);
    std::vector<double> avg(cand.values.size());
    for (std::size_t i = 0; i < avg.size(); ++i) {
      double sum = 0.0;
      for (std::size_t p : picks) sum += static_cast<double>(repo.Predict(task, p, Split::kVal).values[i]);
      avg[i] = (sum + static_cast<double>(cand.values[i])) / denom;
    }
    const double loss = TaskLoss(meta, Split::kVal, avg, labels);
    if (loss < best_loss) {
      best = candidate;
      best_loss = loss;
    }
  }
  return best;
}

std::size_t OraclePortfolioExtension(const Repository& repo, std::span<const std::size_t> tasks,
                                     std::span<const std::size_t> candidates,
                                     std::span<const std::size_t> selected, Aggregation aggregation) {
  std::vector<std::size_t> pool(candidates.begin(), candidates.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  std::vector<std::size_t> task_list(tasks.begin(), tasks.end());
  std::sort(task_list.begin(), task_list.end());
  task_list.erase(std::unique(task_list.begin(), task_list.end()), task_list.end());
  if (pool.empty() || task_list.empty()) throw std::invalid_argument("oracle: empty input");
  if (pool.size() > kOracleMaxCandidates) throw std::invalid_argument("oracle: too many candidates");

  auto loss = [&](std::size_t t, std::size_t c) {
    const double raw = repo.Evaluation(t, c).loss_val;
    if (aggregation == Aggregation::kRawLoss) return raw;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t other : pool) {
      const double v = repo.Evaluation(t, other).loss_val;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi > lo ? (raw - lo) / (hi - lo) : 0.0;
  };

  std::size_t best = 0;
  bool found = false;
  double best_objective = std::numeric_limits<double>::infinity();
  for (std::size_t candidate : pool) {
    if (std::find(selected.begin(), selected.end(), candidate) != selected.end()) continue;
    double sum = 0.0;
    for (std::size_t t : task_list) {
      double m = loss(t, candidate);
      for (std::size_t s : selected) m = std::min(m, loss(t, s));
      sum += m;
    }
    const double objective = sum / static_cast<double>(task_list.size());
    if (!found || objective < best_objective) {
      found = true;
      best = candidate;
      best_objective = objective;
    }
  }
  if (!found) throw std::invalid_argument("oracle: every candidate already selected");
  return best;
}

}  // namespace predrepo
