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

#include <gtest/gtest.h>

#include "predrepo/aggregate.hpp"
#include "predrepo/synth.hpp"
#include "test_util.hpp"

namespace predrepo {
namespace {

using testing::SmallSpec;

class AblationTest : public ::testing::Test {
 protected:
  AblationTest()
      : repo_(GenerateRepo(SmallSpec(3, 5, 2, 9))),
        policy_(BudgetPolicy::Create(repo_, 1e6, PickFallbackConfig(repo_))) {
    base_.n_max = 6;
    base_.c_max = 10;
  }
  Repository repo_;
  BudgetPolicy policy_;
  PortfolioSimOptions base_;
};

TEST_F(AblationTest, RowCountAndSummaries) {
  const std::vector<int> values = {1, 2, 4};
  const std::vector<std::uint64_t> seeds = {0, 1};
  const auto rows = RunAblation(repo_, policy_, AblationAxis::kPortfolioSize, values, seeds, base_);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t v = 0; v < 3; ++v) {
    const auto& a = rows[2 * v];
    const auto& b = rows[2 * v + 1];
    EXPECT_EQ(a.value, values[v]);
    EXPECT_EQ(a.seed, 0u);
    EXPECT_EQ(b.seed, 1u);
    EXPECT_DOUBLE_EQ(a.mean_normalized_error, (a.normalized_error + b.normalized_error) / 2);
    EXPECT_GE(a.normalized_error, 0.0);
    EXPECT_LE(a.normalized_error, 1.0);
  }
  EXPECT_GE(rows[0].train_objective, rows[2].train_objective);
  EXPECT_GE(rows[2].train_objective, rows[4].train_objective);
}

TEST_F(AblationTest, OneEnsembleMemberIsBestSingleOfPortfolio) {
  const std::vector<int> values = {1};
  const std::vector<std::uint64_t> seeds = {0};
  const auto rows = RunAblation(repo_, policy_, AblationAxis::kEnsembleMembers, values, seeds, base_);
  PortfolioSimOptions single = base_;
  single.c_max = 1;
  const auto sim = SimulatePortfolio(repo_, policy_, single);
  double loss = 0.0;
  for (const auto& r : sim.results) {
    ASSERT_EQ(r.members.size(), 1u);
    // The member is the portfolio config with the lowest validation loss.
    double best = repo_.Evaluation(r.task, r.included[0]).loss_val;
    for (std::size_t c : r.included) best = std::min(best, repo_.Evaluation(r.task, c).loss_val);
    EXPECT_EQ(repo_.Evaluation(r.task, r.members[0]).loss_val, best);
    EXPECT_EQ(r.test_loss, repo_.Evaluation(r.task, r.members[0]).loss_test);
    loss += r.test_loss;
  }
  EXPECT_DOUBLE_EQ(rows[0].test_loss, loss / static_cast<double>(sim.results.size()));
}

TEST_F(AblationTest, RangeErrors) {
  const std::vector<std::uint64_t> seeds = {0};
  EXPECT_THROW(RunAblation(repo_, policy_, AblationAxis::kPortfolioSize, std::vector<int>{10}, seeds, base_),
               AblationRangeError);
  EXPECT_THROW(RunAblation(repo_, policy_, AblationAxis::kTrainDatasets, std::vector<int>{5}, seeds, base_),
               AblationRangeError);
  EXPECT_THROW(RunAblation(repo_, policy_, AblationAxis::kConfigsPerFamily, std::vector<int>{4}, seeds, base_),
               AblationRangeError);
  EXPECT_THROW(RunAblation(repo_, policy_, AblationAxis::kEnsembleMembers, std::vector<int>{0}, seeds, base_),
               std::invalid_argument);
}

TEST_F(AblationTest, ConfigSubsetsAreSeededAndPerFamily) {
  const auto a = SampleConfigsPerFamily(repo_, 2, 7);
  EXPECT_EQ(a, SampleConfigsPerFamily(repo_, 2, 7));
  EXPECT_EQ(a.size(), 6u);
  std::map<std::string, int> per_family;
  for (std::size_t c : a) ++per_family[repo_.config(c).family];
  for (const auto& [family, n] : per_family) EXPECT_EQ(n, 2) << family;
}

TEST_F(AblationTest, NormalizedErrorAgainstConfigsMatchesDirect) {
  const auto sim = SimulatePortfolio(repo_, policy_, base_);
  const double got = NormalizedErrorAgainstConfigs(repo_, sim.results);
  double total = 0.0;
  for (const auto& r : sim.results) {
    std::vector<double> pool;
    for (std::size_t c = 0; c < repo_.num_configs(); ++c) pool.push_back(repo_.Evaluation(r.task, c).loss_test);
    pool.push_back(r.test_loss);
    std::sort(pool.begin(), pool.end());
    const double top = pool.front();
    const double base = pool[(pool.size() + 1) / 2 - 1];
    total += std::clamp((r.test_loss - top) / std::max(base - top, 1e-5), 0.0, 1.0);
  }
  EXPECT_NEAR(got, total / static_cast<double>(sim.results.size()), 1e-12);
}

TEST(AblationAxisNames, RoundTrip) {
  for (const char* name : {"configs-per-family", "n-train-datasets", "portfolio-size", "ensemble-members"}) {
    EXPECT_EQ(ToString(ParseAblationAxis(name)), name);
  }
  EXPECT_THROW(ParseAblationAxis("bogus"), std::invalid_argument);
}

}  // namespace
}  // namespace predrepo
