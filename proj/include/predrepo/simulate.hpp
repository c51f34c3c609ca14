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

// Anytime-budget simulation of portfolios and single-family baselines,
// computed entirely from recorded fit times and stored predictions.

#ifndef PREDREPO_SIMULATE_HPP_
#define PREDREPO_SIMULATE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "predrepo/ensemble.hpp"
#include "predrepo/portfolio.hpp"
#include "predrepo/store.hpp"

namespace predrepo {

// The fallback must be quick on every task.
inline constexpr double kMaxFallbackFitSeconds = 60.0;
// tuned+ensemble builds its ensemble from at most this many configs.
inline constexpr std::size_t kTunedEnsembleTopK = 20;

struct BudgetPolicy {
  double budget_s = 0.0;
  std::size_t fallback_config = 0;

  // Throws std::invalid_argument if the budget is not positive or the
  // fallback's recorded fit time exceeds kMaxFallbackFitSeconds on any task.
  static BudgetPolicy Create(const Repository& repo, double budget_s, std::size_t fallback_config);
};

// Default fallback: among default configs, the one whose slowest recorded
// fit is fastest (lowest ordinal on ties).
std::size_t PickFallbackConfig(const Repository& repo);

// Length of the longest prefix of `fit_times` whose cumulative sum stays
// within `budget_s`.
std::size_t AnytimePrefixLength(std::span<const double> fit_times, double budget_s);

struct AnytimeSelection {
  std::vector<std::size_t> included;
  bool used_fallback = false;
};

// Walks `order` accumulating recorded fit times on `task`; keeps configs
// while the cumulative time is within budget and stops at the first one
// that is not. If nothing fits, returns the fallback alone.
AnytimeSelection AnytimeFilter(std::span<const std::size_t> order, std::size_t task, const BudgetPolicy& policy,
                               const Repository& repo);

struct SimResult {
  std::size_t task = 0;
  std::vector<std::size_t> included;
  bool used_fallback = false;
  double val_loss = 0.0;
  double test_loss = 0.0;
  double sim_fit_time_s = 0.0;
  double sim_infer_time_s = 0.0;
  // Configs with nonzero weight in the final model.
  std::vector<std::size_t> members;
};

struct PortfolioSimOptions {
  int n_max = kDefaultPortfolioSize;
  int c_max = kDefaultCaruanaSteps;
  Aggregation aggregation = Aggregation::kNormalizedLoss;
  // Portfolio candidates; empty means every config.
  std::vector<std::size_t> candidates;
  // Number of training datasets sampled (with `seed`) from the D - 1
  // available ones; 0 uses all of them.
  int n_train_datasets = 0;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct PortfolioSimulation {
  // One per task, in repository task order.
  std::vector<SimResult> results;
  // Leave-one-dataset-out portfolio for each dataset, in repo.datasets() order.
  std::vector<Portfolio> portfolios;
};

// For each dataset: learn a portfolio on the other datasets' tasks, then on
// each of its folds keep the budget-feasible prefix and ensemble it with
// Caruana selection (c_max = 1 picks the best single config by validation
// loss). Output is independent of the thread count.
PortfolioSimulation SimulatePortfolio(const Repository& repo, const BudgetPolicy& policy,
                                      const PortfolioSimOptions& options);

enum class FamilyMode { kDefault, kTuned, kTunedEnsemble };

std::string_view ToString(FamilyMode mode);

// Baselines restricted to one config family. kDefault uses the family's
// default config as-is; kTuned walks the family's configs in repository
// order (or a per-task shuffle when `shuffle_seed` is set) under the budget
// and keeps the best by validation loss; kTunedEnsemble runs Caruana
// selection over the best kTunedEnsembleTopK configs that fit.
std::vector<SimResult> SimulateSingleFamily(const Repository& repo, std::string_view family, FamilyMode mode,
                                            const BudgetPolicy& policy, int c_max = kDefaultCaruanaSteps,
                                            std::optional<std::uint64_t> shuffle_seed = std::nullopt,
                                            int threads = 1);

// Config families in order of first appearance.
std::vector<std::string> Families(const Repository& repo);

}  // namespace predrepo

#endif  // PREDREPO_SIMULATE_HPP_
