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

// Sensitivity sweeps of the leave-one-dataset-out portfolio ensemble along
// one axis at a time, repeated over seeds.

#ifndef PREDREPO_ABLATION_HPP_
#define PREDREPO_ABLATION_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "predrepo/simulate.hpp"

namespace predrepo {

enum class AblationAxis { kConfigsPerFamily, kTrainDatasets, kPortfolioSize, kEnsembleMembers };

std::string_view ToString(AblationAxis axis);
AblationAxis ParseAblationAxis(std::string_view name);

// A swept value exceeds what the repository offers.
class AblationRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

struct AblationRow {
  AblationAxis axis = AblationAxis::kPortfolioSize;
  int value = 0;
  std::uint64_t seed = 0;
  // Mean over tasks of the method's normalized error against every
  // single config's stored test loss.
  double normalized_error = 0.0;
  double test_loss = 0.0;
  // Final training objective averaged over the held-out datasets.
  double train_objective = 0.0;
  // Across seeds for this value; repeated on each of its rows.
  double mean_normalized_error = 0.0;
  double stderr_normalized_error = 0.0;
};

// Normalized error of one method's per-task test losses, scored on each
// task against the pool of all stored single-config test losses plus the
// method itself. Returns the mean over tasks.
double NormalizedErrorAgainstConfigs(const Repository& repo, const std::vector<SimResult>& results);

// Random subset of `per_family` configs from every family, sorted.
std::vector<std::size_t> SampleConfigsPerFamily(const Repository& repo, int per_family, std::uint64_t seed);

// One row per (value, seed), values outer. Each run starts from `base` and
// changes only the swept axis:
//   configs-per-family  portfolio candidates = `value` random configs per family
//   n-train-datasets    `value` random training datasets per held-out dataset
//   portfolio-size      n_max = value
//   ensemble-members    c_max = value
std::vector<AblationRow> RunAblation(const Repository& repo, const BudgetPolicy& policy, AblationAxis axis,
                                     std::span<const int> values, std::span<const std::uint64_t> seeds,
                                     const PortfolioSimOptions& base);

}  // namespace predrepo

#endif  // PREDREPO_ABLATION_HPP_
