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

#include "predrepo/ensemble.hpp"

#include <algorithm>
#include <stdexcept>

#include "predrepo/metrics.hpp"
#include "predrepo/parallel.hpp"

namespace predrepo {

double EnsembleWeights::Weight(std::size_t config) const {
  const auto it = counts.find(config);
  if (it == counts.end() || steps == 0) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(steps);
}

std::map<std::size_t, int> EnsembleWeights::CountsAtStep(int prefix) const {
  std::map<std::size_t, int> out;
  for (int s = 0; s < prefix && s < static_cast<int>(trajectory.size()); ++s) ++out[trajectory[s].config];
  return out;
}

EnsembleWeights CaruanaSelect(const Repository& repo, std::size_t task, std::span<const std::size_t> candidates,
                              int max_steps) {
  if (candidates.empty()) throw std::invalid_argument("caruana_select: empty candidate list");
  if (max_steps < 1) throw std::invalid_argument("caruana_select: max_steps must be positive");

  std::vector<std::size_t> pool(candidates.begin(), candidates.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  const TaskMeta& meta = repo.task(task);
  const auto labels = repo.Labels(task, Split::kVal);
  const std::size_t size = std::size_t{meta.n_val} * meta.output_dim;

  std::vector<std::vector<double>> preds;
  preds.reserve(pool.size());
  for (std::size_t config : pool) {
    const auto view = repo.Predict(task, config, Split::kVal);
    if (view.values.size() != size) throw std::invalid_argument("caruana_select: prediction shape mismatch");
    preds.emplace_back(view.values.begin(), view.values.end());
  }

  EnsembleWeights result;
  result.trajectory.reserve(static_cast<std::size_t>(max_steps));
  std::vector<double> sum(size, 0.0);
  std::vector<double> trial(size);
  for (int step = 1; step <= max_steps; ++step) {
    const double denom = static_cast<double>(step);
    std::size_t best = 0;
    double best_loss = 0.0;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      for (std::size_t i = 0; i < size; ++i) trial[i] = (sum[i] + preds[k][i]) / denom;
      const double loss = TaskLoss(meta, Split::kVal, trial, labels);
      if (k == 0 || loss < best_loss) {
        best = k;
        best_loss = loss;
      }
    }
    for (std::size_t i = 0; i < size; ++i) sum[i] += preds[best][i];
    result.trajectory.push_back({pool[best], best_loss});
  }

  std::size_t best_prefix = 0;
  for (std::size_t s = 1; s < result.trajectory.size(); ++s) {
    if (result.trajectory[s].val_loss < result.trajectory[best_prefix].val_loss) best_prefix = s;
  }
  result.steps = static_cast<int>(best_prefix) + 1;
  result.counts = result.CountsAtStep(result.steps);
  result.val_loss = result.trajectory[best_prefix].val_loss;
  return result;
}

Matrix EnsemblePredict(const EnsembleWeights& weights, std::size_t task, Split split, const Repository& repo) {
  if (weights.steps <= 0 || weights.counts.empty()) throw std::invalid_argument("ensemble_predict: empty ensemble");
  const TaskMeta& meta = repo.task(task);
  Matrix out(meta.rows(split), meta.output_dim);
  for (const auto& [config, count] : weights.counts) {
    const auto view = repo.Predict(task, config, split);
    if (view.rows != out.rows || view.cols != out.cols) {
      throw std::invalid_argument("ensemble_predict: member shape mismatch");
    }
    const double c = static_cast<double>(count);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += c * static_cast<double>(view.values[i]);
  }
  const double steps = static_cast<double>(weights.steps);
  for (double& v : out.values) v /= steps;
  return out;
}

std::vector<EnsembleEvaluation> EvaluateEnsemble(const Repository& repo, const std::vector<std::string>& datasets,
                                                 const std::vector<int>& folds,
                                                 const std::vector<std::string>& configs, int ensemble_size,
                                                 int threads) {
  std::vector<std::size_t> candidates;
  candidates.reserve(configs.size());
  for (const auto& id : configs) candidates.push_back(repo.FindConfig(id));
  std::vector<std::size_t> tasks;
  for (const auto& dataset : datasets) {
    for (int fold : folds) tasks.push_back(repo.FindTask(dataset, fold));
  }

  std::vector<EnsembleEvaluation> out(tasks.size());
  ParallelFor(tasks.size(), threads, [&](std::size_t i) {
    const std::size_t t = tasks[i];
    EnsembleEvaluation& eval = out[i];
    eval.dataset = repo.task(t).dataset_id;
    eval.fold = repo.task(t).fold;
    eval.weights = CaruanaSelect(repo, t, candidates, ensemble_size);
    for (Split split : {Split::kVal, Split::kTest}) {
      const Matrix pred = EnsemblePredict(eval.weights, t, split, repo);
      const double loss = TaskLoss(repo.task(t), split, pred.values, repo.Labels(t, split));
      (split == Split::kVal ? eval.val_loss : eval.test_loss) = loss;
    }
  });
  return out;
}

}  // namespace predrepo
