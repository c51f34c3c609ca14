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

#ifndef PREDREPO_METRICS_HPP_
#define PREDREPO_METRICS_HPP_

#include <span>

#include "predrepo/types.hpp"

namespace predrepo {

// All losses are minimized. AUC is reported as 1 - AUC.

inline constexpr double kLogLossEpsilon = 1e-15;
inline constexpr double kRowSumTolerance = 1e-5;

// sqrt(mean((pred - target)^2)). Throws std::invalid_argument on empty or
// mismatched input and on non-finite values.
double Rmse(std::span<const double> pred, std::span<const double> target);

// 1 - AUC using the rank statistic; tied scores contribute one half.
// `label` holds 0/1. Throws std::invalid_argument("AUC undefined ...") when
// only one class is present.
double AucLoss(std::span<const double> score, std::span<const double> label);

// Mean negative log-likelihood of the true class with probabilities clipped
// to [eps, 1 - eps]. `probs` is row-major n x k; `label` holds class indices.
double LogLoss(std::span<const double> probs, std::size_t num_classes,
               std::span<const double> label);

// Dispatches on the task's problem type. `pred` is rows x output_dim for the
// given split.
double TaskLoss(const TaskMeta& task, Split split, std::span<const double> pred,
                std::span<const double> target);

}  // namespace predrepo

#endif  // PREDREPO_METRICS_HPP_
