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

#include "predrepo/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "predrepo/aggregate.hpp"
#include "predrepo/rng.hpp"

namespace predrepo {
namespace {

constexpr std::uint64_t kConfigSubsetStream = 0x636f6e6673756273ULL;

}  // namespace

std::string_view ToString(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::kConfigsPerFamily:
      return "configs-per-family";
    case AblationAxis::kTrainDatasets:
      return "n-train-datasets";
    case AblationAxis::kPortfolioSize:
      return "portfolio-size";
    case AblationAxis::kEnsembleMembers:
      return "ensemble-members";
  }
  return "unknown";
}

AblationAxis ParseAblationAxis(std::string_view name) {
  for (AblationAxis axis : {AblationAxis::kConfigsPerFamily, AblationAxis::kTrainDatasets,
                            AblationAxis::kPortfolioSize, AblationAxis::kEnsembleMembers}) {
    if (ToString(axis) == name) return axis;
  }
  throw std::invalid_argument("unknown ablation axis: " + std::string(name));
}

double NormalizedErrorAgainstConfigs(const Repository& repo, const std::vector<SimResult>& results) {
  const std::size_t m = repo.num_configs();
  ResultTable table;
  table.loss.assign(m + 1, std::vector<double>(results.size()));
  table.methods.resize(m + 1);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const TaskMeta& task = repo.task(results[i].task);
    table.tasks.push_back({task.dataset_id, task.fold});
    for (std::size_t c = 0; c < m; ++c) table.loss[c][i] = repo.Evaluation(results[i].task, c).loss_test;
    table.loss[m][i] = results[i].test_loss;
  }
  return Mean(NormalizedError(table)[m]);
}

std::vector<std::size_t> SampleConfigsPerFamily(const Repository& repo, int per_family, std::uint64_t seed) {
  if (per_family < 1) throw std::invalid_argument("configs per family must be positive");
  std::vector<std::size_t> out;
  const auto families = Families(repo);
  for (std::size_t f = 0; f < families.size(); ++f) {
    std::vector<std::size_t> members;
    for (std::size_t c = 0; c < repo.num_configs(); ++c) {
      if (repo.config(c).family == families[f]) members.push_back(c);
    }
    if (static_cast<std::size_t>(per_family) > members.size()) {
      throw AblationRangeError("family " + families[f] + " has only " + std::to_string(members.size()) +
                               " configs, asked for " + std::to_string(per_family));
    }
    CounterRng rng(CounterRng::Key(seed, {kConfigSubsetStream, f}));
    for (std::size_t pick : rng.SampleSorted(members.size(), static_cast<std::size_t>(per_family))) {
      out.push_back(members[pick]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<AblationRow> RunAblation(const Repository& repo, const BudgetPolicy& policy, AblationAxis axis,
                                     std::span<const int> values, std::span<const std::uint64_t> seeds,
                                     const PortfolioSimOptions& base) {
  if (values.empty() || seeds.empty()) throw std::invalid_argument("ablation needs values and seeds");
  const std::size_t num_datasets = repo.datasets().size();
  for (int value : values) {
    if (value < 1) throw std::invalid_argument("ablation values must be positive");
    if (axis == AblationAxis::kTrainDatasets && static_cast<std::size_t>(value) + 1 > num_datasets) {
      throw AblationRangeError("n-train-datasets " + std::to_string(value) + " exceeds the " +
                               std::to_string(num_datasets - 1) + " available training datasets");
    }
    if (axis == AblationAxis::kPortfolioSize && static_cast<std::size_t>(value) > repo.num_configs()) {
      throw AblationRangeError("portfolio size " + std::to_string(value) + " exceeds the " +
                               std::to_string(repo.num_configs()) + " configs");
    }
  }

  std::vector<AblationRow> rows;
  for (int value : values) {
    const std::size_t first = rows.size();
    for (std::uint64_t seed : seeds) {
      PortfolioSimOptions options = base;
      options.seed = seed;
      switch (axis) {
        case AblationAxis::kConfigsPerFamily:
          options.candidates = SampleConfigsPerFamily(repo, value, seed);
          break;
        case AblationAxis::kTrainDatasets:
          options.n_train_datasets = value;
          break;
        case AblationAxis::kPortfolioSize:
          options.n_max = value;
          break;
        case AblationAxis::kEnsembleMembers:
          options.c_max = value;
          break;
      }
      const PortfolioSimulation sim = SimulatePortfolio(repo, policy, options);
      AblationRow row;
      row.axis = axis;
      row.value = value;
      row.seed = seed;
      row.normalized_error = NormalizedErrorAgainstConfigs(repo, sim.results);
      double loss_sum = 0.0;
      for (const SimResult& r : sim.results) loss_sum += r.test_loss;
      row.test_loss = loss_sum / static_cast<double>(sim.results.size());
      double objective_sum = 0.0;
      for (const Portfolio& p : sim.portfolios) objective_sum += p.objective_trajectory.back();
      row.train_objective = objective_sum / static_cast<double>(sim.portfolios.size());
      rows.push_back(row);
    }
    const std::size_t n = rows.size() - first;
    double mean = 0.0;
    for (std::size_t i = first; i < rows.size(); ++i) mean += rows[i].normalized_error;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = first; i < rows.size(); ++i) var += (rows[i].normalized_error - mean) * (rows[i].normalized_error - mean);
    const double stderr_value = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n)) : 0.0;
    for (std::size_t i = first; i < rows.size(); ++i) {
      rows[i].mean_normalized_error = mean;
      rows[i].stderr_normalized_error = stderr_value;
    }
  }
  return rows;
}

}  // namespace predrepo
