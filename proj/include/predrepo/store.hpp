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

// Prediction repository: task/config metadata, ground-truth labels, a dense
// table of evaluation records and a blob of float32 prediction matrices, one
// per (task, config, split).
//
// On-disk layout (all integers and floats little-endian):
//   manifest.json  schema version, folds per dataset, tasks, configs,
//                  per-task label checksums.
//   labels.bin     "TRLB", u32 version, then per task: n_val f64 labels
//                  followed by n_test f64 labels.
//   evals.bin      "TREV", u32 version, then per (task, config) in row-major
//                  order: loss_val, loss_test, time_fit, time_infer as f64.
//   preds.idx      "TRPI", u32 version, then one 28-byte record per
//                  (task, config, split) sorted by that key:
//                  u32 task, u32 config, u8 split, 3 pad bytes, u64 offset,
//                  u32 rows, u32 cols. Offsets are absolute within preds.blob.
//   preds.blob     "TRPB", u32 version, then raw float32 matrices
//                  back-to-back in index order.
//
// An opened repository maps the binary files and reads nothing from
// preds.blob until a matrix is requested.

#ifndef PREDREPO_STORE_HPP_
#define PREDREPO_STORE_HPP_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "predrepo/types.hpp"

namespace predrepo {

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kFileHeaderBytes = 8;
inline constexpr std::size_t kIndexRecordBytes = 28;
inline constexpr std::size_t kEvalRecordBytes = 32;

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kLabelsFile = "labels.bin";
inline constexpr const char* kEvalsFile = "evals.bin";
inline constexpr const char* kIndexFile = "preds.idx";
inline constexpr const char* kBlobFile = "preds.blob";

// Plain in-memory form used to build repositories (generator, tests).
struct RepositoryContents {
  int folds_per_dataset = 3;
  std::vector<TaskMeta> tasks;
  std::vector<ConfigMeta> configs;
  // Per task. Classification labels hold class indices as doubles.
  std::vector<std::vector<double>> labels_val;
  std::vector<std::vector<double>> labels_test;
  // Indexed by (task * configs.size() + config) * 2 + split.
  std::vector<std::vector<float>> predictions;
  // Indexed by task * configs.size() + config.
  std::vector<EvaluationRecord> evaluations;

  std::size_t PredictionSlot(std::size_t task, std::size_t config, Split split) const {
    return (task * configs.size() + config) * 2 + static_cast<std::size_t>(split);
  }
};

struct IndexEntry {
  std::uint64_t offset = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
};

class Repository {
 public:
  // Builds an in-memory repository. Checks structural invariants (unique
  // keys, shapes, density) and throws StoreError naming the offending cell.
  static Repository FromContents(const RepositoryContents& contents);

  // Maps an on-disk repository. Only manifest.json and preds.idx are read;
  // other files are mapped and header-checked.
  static Repository Open(const std::filesystem::path& dir);

  int folds_per_dataset() const { return folds_per_dataset_; }
  std::size_t num_tasks() const { return tasks_.size(); }
  std::size_t num_configs() const { return configs_.size(); }
  const std::vector<TaskMeta>& tasks() const { return tasks_; }
  const std::vector<ConfigMeta>& configs() const { return configs_; }
  const TaskMeta& task(std::size_t t) const { return tasks_.at(t); }
  const ConfigMeta& config(std::size_t c) const { return configs_.at(c); }

  // Dataset ids in order of first appearance in the task list.
  const std::vector<std::string>& datasets() const { return datasets_; }
  // Task ordinals of one dataset, in task-list order.
  std::vector<std::size_t> TasksOfDataset(std::string_view dataset) const;

  // Lookups throw std::out_of_range with the unknown id in the message.
  std::size_t FindTask(std::string_view dataset, int fold) const;
  std::size_t FindConfig(std::string_view config_id) const;
  std::size_t FindDataset(std::string_view dataset) const;

  PredictionView Predict(std::size_t task, std::size_t config, Split split) const;
  PredictionView PredictVal(std::string_view dataset, int fold, std::string_view config) const {
    return Predict(FindTask(dataset, fold), FindConfig(config), Split::kVal);
  }
  PredictionView PredictTest(std::string_view dataset, int fold, std::string_view config) const {
    return Predict(FindTask(dataset, fold), FindConfig(config), Split::kTest);
  }

  std::span<const double> Labels(std::size_t task, Split split) const;
  EvaluationRecord Evaluation(std::size_t task, std::size_t config) const;

  const IndexEntry& index_entry(std::size_t task, std::size_t config, Split split) const {
    return index_[(task * configs_.size() + config) * 2 + static_cast<std::size_t>(split)];
  }

  // Bytes of preds.blob handed out through Predict() since construction.
  std::uint64_t blob_bytes_served() const { return stats_->blob_bytes.load(std::memory_order_relaxed); }
  // Bytes read eagerly by Open() (manifest + index).
  std::uint64_t bytes_read_at_open() const { return stats_->open_bytes; }

  RepositoryContents ToContents() const;

  // Per-task label checksums recorded in manifest.json; empty for
  // repositories that were built in memory.
  const std::vector<std::string>& stored_label_checksums() const { return stored_label_checksums_; }

  // Raw file images, used by the writer.
  std::span<const std::byte> blob_bytes() const { return blob_; }
  std::span<const std::byte> evals_bytes() const { return evals_; }
  std::span<const std::byte> labels_bytes() const { return labels_; }

 private:
  struct Stats {
    std::atomic<std::uint64_t> blob_bytes{0};
    std::uint64_t open_bytes = 0;
  };
  struct Backing;

  Repository() = default;
  void BuildLookups();

  int folds_per_dataset_ = 3;
  std::vector<TaskMeta> tasks_;
  std::vector<ConfigMeta> configs_;
  std::vector<std::string> datasets_;
  std::map<std::pair<std::string, int>, std::size_t, std::less<>> task_lookup_;
  std::map<std::string, std::size_t, std::less<>> config_lookup_;
  std::map<std::string, std::size_t, std::less<>> dataset_lookup_;
  std::vector<IndexEntry> index_;
  std::vector<std::uint64_t> label_offsets_;  // per task, into labels_
  std::vector<std::string> stored_label_checksums_;

  std::shared_ptr<const Backing> backing_;
  std::span<const std::byte> blob_;
  std::span<const std::byte> evals_;
  std::span<const std::byte> labels_;
  std::shared_ptr<Stats> stats_ = std::make_shared<Stats>();
};

// Writes the five store files into `dir` (created if needed). Checks value
// invariants first: no NaN/inf, classification rows row-stochastic within
// 1e-5 with entries in [0, 1]. Violations throw StoreError naming the cell.
void WriteRepo(const Repository& repo, const std::filesystem::path& dir);

std::string ManifestJson(const Repository& repo);

// FNV-1a 64-bit over the label bytes of one task, as "fnv1a64:<16 hex>".
std::string LabelChecksum(std::span<const double> val, std::span<const double> test);

struct Violation {
  std::string task;    // "<dataset>/<fold>", empty for repository-level
  std::string config;  // config id, may be empty
  std::string message;
};

// Checks density, finiteness, row-stochasticity, label checksums and that
// stored loss_val matches the recomputed metric within 1e-6 relative.
// An empty result means the repository is valid.
std::vector<Violation> ValidateRepo(const Repository& repo);

inline constexpr double kLossRecomputeTolerance = 1e-6;

}  // namespace predrepo

#endif  // PREDREPO_STORE_HPP_
