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

// Brute-force references used to cross-check the fast implementations.
// They recompute everything from stored predictions or losses on every call
// and are only meant for small inputs.

#ifndef PREDREPO_ORACLES_HPP_
#define PREDREPO_ORACLES_HPP_

#include <cstddef>
#include <span>

#include "predrepo/portfolio.hpp"
#include "predrepo/store.hpp"

namespace predrepo {

inline constexpr std::size_t kOracleMaxCandidates = 8;

// 1 - AUC by counting every (positive, negative) pair: win 1, tie 0.5.
double OracleAucPairwise(std::span<const double> score, std::span<const double> label);

// The candidate that, appended to `picks` (in pick order), gives the lowest
// validation loss of the plain average; lowest ordinal on ties. Throws if
// more than kOracleMaxCandidates distinct candidates are given.
std::size_t OracleEnsembleExtension(const Repository& repo, std::size_t task, std::span<const std::size_t> picks,
                                    std::span<const std::size_t> candidates);

// The unpicked candidate minimizing the mean over `tasks` of
// min(loss over selected + candidate), where losses are validation losses,
// min-max rescaled across `candidates` per task under kNormalizedLoss.
std::size_t OraclePortfolioExtension(const Repository& repo, std::span<const std::size_t> tasks,
                                     std::span<const std::size_t> candidates,
                                     std::span<const std::size_t> selected, Aggregation aggregation);

}  // namespace predrepo

#endif  // PREDREPO_ORACLES_HPP_
