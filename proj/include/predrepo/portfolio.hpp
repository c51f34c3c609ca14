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

// Zeroshot portfolios: an ordered list of configs chosen greedily on
// training tasks so that the best config in the list does well on average.

#ifndef PREDREPO_PORTFOLIO_HPP_
#define PREDREPO_PORTFOLIO_HPP_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "predrepo/store.hpp"

namespace predrepo {

inline constexpr int kDefaultPortfolioSize = 200;

enum class Aggregation {
  // Mean raw validation loss across tasks.
  kRawLoss,
  // Each task's candidate losses are min-max rescaled across the candidate
  // set first; tasks where all candidates tie rescale to 0.
  kNormalizedLoss,
};

std::string_view ToString(Aggregation aggregation);
Aggregation ParseAggregation(std::string_view name);

struct Portfolio {
  std::vector<std::size_t> configs;
  // Training objective after each pick; non-increasing.
  std::vector<double> objective_trajectory;
  Aggregation aggregation = Aggregation::kNormalizedLoss;
};

// Validation losses of `candidates` on `tasks`, both sorted ascending and
// de-duplicated, row-major [task][candidate], rescaled per task under
// kNormalizedLoss.
struct LossTable {
  std::vector<std::size_t> tasks;
  std::vector<std::size_t> candidates;
  std::vector<double> loss;

  double at(std::size_t t, std::size_t c) const { return loss[t * candidates.size() + c]; }
};

LossTable BuildLossTable(const Repository& repo, std::span<const std::size_t> tasks,
                         std::span<const std::size_t> candidates, Aggregation aggregation);

// Greedy portfolio over a prepared table. Each step appends the unpicked
// candidate minimizing mean over tasks of min(loss over picked + candidate);
// ties go to the lowest ordinal. Stops at n_max picks or when candidates
// run out.
Portfolio LearnPortfolio(const LossTable& table, int n_max, Aggregation aggregation);

Portfolio LearnPortfolio(const Repository& repo, std::span<const std::size_t> train_tasks,
                         std::span<const std::size_t> candidates, int n_max = kDefaultPortfolioSize,
                         Aggregation aggregation = Aggregation::kNormalizedLoss);

// All tasks (every fold) of every dataset other than `held_out_dataset`.
std::vector<std::size_t> LooTrainTasks(const Repository& repo, std::string_view held_out_dataset);

}  // namespace predrepo

#endif  // PREDREPO_PORTFOLIO_HPP_
