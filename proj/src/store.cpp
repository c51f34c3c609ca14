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

#include "predrepo/store.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "predrepo/metrics.hpp"

static_assert(std::endian::native == std::endian::little,
              "the store format is little-endian and is mapped without byte swapping");

namespace predrepo {
namespace {

using nlohmann::json;

constexpr char kBlobMagic[4] = {'T', 'R', 'P', 'B'};
constexpr char kIndexMagic[4] = {'T', 'R', 'P', 'I'};
constexpr char kEvalsMagic[4] = {'T', 'R', 'E', 'V'};
constexpr char kLabelsMagic[4] = {'T', 'R', 'L', 'B'};

std::string CellName(const TaskMeta& task) { return task.dataset_id + "/" + std::to_string(task.fold); }

template <typename T>
T Load(std::span<const std::byte> bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

template <typename T>
void Append(std::vector<std::byte>& out, const T& value) {
  const auto* p = reinterpret_cast<const std::byte*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

void AppendHeader(std::vector<std::byte>& out, const char (&magic)[4]) {
  const auto* p = reinterpret_cast<const std::byte*>(magic);
  out.insert(out.end(), p, p + 4);
  Append(out, kFormatVersion);
}

void CheckHeader(std::span<const std::byte> bytes, const char (&magic)[4], const std::string& file) {
  if (bytes.size() < kFileHeaderBytes) {
    throw StoreError(file + ": file too short for header");
  }
  if (std::memcmp(bytes.data(), magic, 4) != 0) {
    throw StoreError(file + ": bad magic");
  }
  const auto version = Load<std::uint32_t>(bytes, 4);
  if (version != kFormatVersion) {
    throw StoreError(file + ": unsupported version " + std::to_string(version));
  }
}

class MappedFile {
 public:
  explicit MappedFile(const std::filesystem::path& path) {
    const int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd < 0) {
      throw StoreError("missing file: " + path.string());
    }
    struct stat st {};
    if (::fstat(fd, &st) != 0) {
      ::close(fd);
      throw StoreError("cannot stat: " + path.string());
    }
    size_ = static_cast<std::size_t>(st.st_size);
    if (size_ > 0) {
      void* addr = ::mmap(nullptr, size_, PROT_READ, MAP_PRIVATE, fd, 0);
      if (addr == MAP_FAILED) {
        ::close(fd);
        throw StoreError("mmap failed: " + path.string());
      }
      data_ = static_cast<const std::byte*>(addr);
    }
    ::close(fd);
  }
  ~MappedFile() {
    if (data_ != nullptr) ::munmap(const_cast<std::byte*>(data_), size_);
  }
  MappedFile(const MappedFile&) = delete;
  MappedFile& operator=(const MappedFile&) = delete;

  std::span<const std::byte> bytes() const { return {data_, size_}; }

 private:
  const std::byte* data_ = nullptr;
  std::size_t size_ = 0;
};

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("missing file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteBytes(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StoreError("cannot create file: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw StoreError("write failed: " + path.string());
}

void CheckTaskMeta(const TaskMeta& task, int folds_per_dataset) {
  const std::string name = CellName(task);
  if (task.fold < 0 || task.fold >= folds_per_dataset) {
    throw StoreError("task " + name + ": fold outside [0, " + std::to_string(folds_per_dataset) + ")");
  }
  if (task.n_val == 0 || task.n_test == 0) {
    throw StoreError("task " + name + ": row counts must be positive");
  }
  if (task.problem == ProblemType::kMulticlass ? task.output_dim < 2 : task.output_dim != 1) {
    throw StoreError("task " + name + ": output dimension inconsistent with problem type");
  }
}

std::string Hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

struct Repository::Backing {
  std::vector<std::byte> blob;
  std::vector<std::byte> evals;
  std::vector<std::byte> labels;
  std::unique_ptr<MappedFile> blob_map;
  std::unique_ptr<MappedFile> evals_map;
  std::unique_ptr<MappedFile> labels_map;
};

std::string LabelChecksum(std::span<const double> val, std::span<const double> test) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::span<const double> values) {
    for (std::byte b : std::as_bytes(values)) {
      h ^= static_cast<std::uint64_t>(b);
      h *= 0x100000001b3ULL;
    }
  };
  mix(val);
  mix(test);
  return "fnv1a64:" + Hex64(h);
}

void Repository::BuildLookups() {
  task_lookup_.clear();
  config_lookup_.clear();
  dataset_lookup_.clear();
  datasets_.clear();
  for (std::size_t t = 0; t < tasks_.size(); ++t) {
    const auto& task = tasks_[t];
    CheckTaskMeta(task, folds_per_dataset_);
    if (!task_lookup_.emplace(std::make_pair(task.dataset_id, task.fold), t).second) {
      throw StoreError("duplicate task " + CellName(task));
    }
    if (dataset_lookup_.emplace(task.dataset_id, datasets_.size()).second) {
      datasets_.push_back(task.dataset_id);
    }
  }
  for (std::size_t c = 0; c < configs_.size(); ++c) {
    if (!config_lookup_.emplace(configs_[c].config_id, c).second) {
      throw StoreError("duplicate config " + configs_[c].config_id);
    }
  }
  label_offsets_.assign(tasks_.size(), 0);
  std::uint64_t offset = kFileHeaderBytes;
  for (std::size_t t = 0; t < tasks_.size(); ++t) {
    label_offsets_[t] = offset;
    offset += (std::uint64_t{tasks_[t].n_val} + tasks_[t].n_test) * sizeof(double);
  }
}

Repository Repository::FromContents(const RepositoryContents& contents) {
  Repository repo;
  repo.folds_per_dataset_ = contents.folds_per_dataset;
  repo.tasks_ = contents.tasks;
  repo.configs_ = contents.configs;
  if (repo.folds_per_dataset_ <= 0) throw StoreError("folds per dataset must be positive");
  repo.BuildLookups();

  const std::size_t num_tasks = repo.tasks_.size();
  const std::size_t num_configs = repo.configs_.size();
  if (contents.labels_val.size() != num_tasks || contents.labels_test.size() != num_tasks) {
    throw StoreError("labels missing for some tasks");
  }
  if (contents.predictions.size() != num_tasks * num_configs * 2) {
    throw StoreError("prediction table is not dense");
  }
  if (contents.evaluations.size() != num_tasks * num_configs) {
    throw StoreError("evaluation table is not dense");
  }

  auto backing = std::make_shared<Backing>();
  AppendHeader(backing->labels, kLabelsMagic);
  for (std::size_t t = 0; t < num_tasks; ++t) {
    const auto& task = repo.tasks_[t];
    if (contents.labels_val[t].size() != task.n_val || contents.labels_test[t].size() != task.n_test) {
      throw StoreError("task " + CellName(task) + ": label count mismatch");
    }
    for (double y : contents.labels_val[t]) Append(backing->labels, y);
    for (double y : contents.labels_test[t]) Append(backing->labels, y);
  }

  AppendHeader(backing->evals, kEvalsMagic);
  for (const auto& rec : contents.evaluations) {
    Append(backing->evals, rec.loss_val);
    Append(backing->evals, rec.loss_test);
    Append(backing->evals, rec.time_fit);
    Append(backing->evals, rec.time_infer);
  }

  AppendHeader(backing->blob, kBlobMagic);
  repo.index_.reserve(contents.predictions.size());
  for (std::size_t t = 0; t < num_tasks; ++t) {
    const auto& task = repo.tasks_[t];
    for (std::size_t c = 0; c < num_configs; ++c) {
      for (Split split : {Split::kVal, Split::kTest}) {
        const auto& values = contents.predictions[contents.PredictionSlot(t, c, split)];
        const std::size_t rows = task.rows(split);
        if (values.size() != rows * task.output_dim) {
          throw StoreError("task " + CellName(task) + " config " + repo.configs_[c].config_id +
                           ": prediction shape mismatch");
        }
        repo.index_.push_back({backing->blob.size(), static_cast<std::uint32_t>(rows), task.output_dim});
        const auto bytes = std::as_bytes(std::span<const float>(values));
        backing->blob.insert(backing->blob.end(), bytes.begin(), bytes.end());
      }
    }
  }

  repo.blob_ = backing->blob;
  repo.evals_ = backing->evals;
  repo.labels_ = backing->labels;
  repo.backing_ = std::move(backing);
  return repo;
}

Repository Repository::Open(const std::filesystem::path& dir) {
  Repository repo;
  const std::string manifest_text = ReadTextFile(dir / kManifestFile);
  json manifest;
  try {
    manifest = json::parse(manifest_text);
  } catch (const json::parse_error& e) {
    throw StoreError(std::string("manifest.json: ") + e.what());
  }
  try {
    const int schema = manifest.at("schema_version").get<int>();
    if (schema != static_cast<int>(kFormatVersion)) {
      throw StoreError("manifest.json: unsupported version " + std::to_string(schema));
    }
    repo.folds_per_dataset_ = manifest.at("folds_per_dataset").get<int>();
    for (const auto& jt : manifest.at("tasks")) {
      TaskMeta task;
      task.dataset_id = jt.at("dataset").get<std::string>();
      task.fold = jt.at("fold").get<int>();
      task.problem = ParseProblemType(jt.at("problem").get<std::string>());
      task.n_val = jt.at("n_val").get<std::uint32_t>();
      task.n_test = jt.at("n_test").get<std::uint32_t>();
      task.output_dim = jt.at("output_dim").get<std::uint32_t>();
      task.n_features = jt.at("n_features").get<std::uint32_t>();
      repo.stored_label_checksums_.push_back(jt.at("label_checksum").get<std::string>());
      repo.tasks_.push_back(std::move(task));
    }
    for (const auto& jc : manifest.at("configs")) {
      ConfigMeta config;
      config.config_id = jc.at("id").get<std::string>();
      config.family = jc.at("family").get<std::string>();
      config.is_default = jc.at("is_default").get<bool>();
      config.hyperparams = jc.at("hyperparams").get<std::string>();
      repo.configs_.push_back(std::move(config));
    }
  } catch (const json::exception& e) {
    throw StoreError(std::string("manifest.json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw StoreError(std::string("manifest.json: ") + e.what());
  }
  if (repo.folds_per_dataset_ <= 0) throw StoreError("manifest.json: folds per dataset must be positive");
  repo.BuildLookups();

  const std::size_t num_tasks = repo.tasks_.size();
  const std::size_t num_configs = repo.configs_.size();
  const std::size_t num_entries = num_tasks * num_configs * 2;

  const std::string index_text = ReadTextFile(dir / kIndexFile);
  const auto index_bytes = std::as_bytes(std::span<const char>(index_text));
  CheckHeader(index_bytes, kIndexMagic, kIndexFile);
  if (index_bytes.size() != kFileHeaderBytes + num_entries * kIndexRecordBytes) {
    throw StoreError("preds.idx: record count does not match manifest");
  }
  repo.stats_->open_bytes = manifest_text.size() + index_text.size();

  auto backing = std::make_shared<Backing>();
  backing->blob_map = std::make_unique<MappedFile>(dir / kBlobFile);
  backing->evals_map = std::make_unique<MappedFile>(dir / kEvalsFile);
  backing->labels_map = std::make_unique<MappedFile>(dir / kLabelsFile);
  const auto blob = backing->blob_map->bytes();
  CheckHeader(blob, kBlobMagic, kBlobFile);
  CheckHeader(backing->evals_map->bytes(), kEvalsMagic, kEvalsFile);
  CheckHeader(backing->labels_map->bytes(), kLabelsMagic, kLabelsFile);

  if (backing->evals_map->bytes().size() != kFileHeaderBytes + num_tasks * num_configs * kEvalRecordBytes) {
    throw StoreError("evals.bin: length does not match manifest");
  }
  const std::uint64_t labels_end =
      num_tasks == 0 ? kFileHeaderBytes
                     : repo.label_offsets_.back() +
                           (std::uint64_t{repo.tasks_.back().n_val} + repo.tasks_.back().n_test) * sizeof(double);
  if (backing->labels_map->bytes().size() != labels_end) {
    throw StoreError("labels.bin: length does not match manifest");
  }

  repo.index_.reserve(num_entries);
  std::uint64_t max_extent = kFileHeaderBytes;
  std::size_t pos = kFileHeaderBytes;
  for (std::size_t t = 0; t < num_tasks; ++t) {
    for (std::size_t c = 0; c < num_configs; ++c) {
      for (Split split : {Split::kVal, Split::kTest}) {
        const auto task_ord = Load<std::uint32_t>(index_bytes, pos);
        const auto config_ord = Load<std::uint32_t>(index_bytes, pos + 4);
        const auto split_byte = Load<std::uint8_t>(index_bytes, pos + 8);
        IndexEntry entry;
        entry.offset = Load<std::uint64_t>(index_bytes, pos + 12);
        entry.rows = Load<std::uint32_t>(index_bytes, pos + 20);
        entry.cols = Load<std::uint32_t>(index_bytes, pos + 24);
        pos += kIndexRecordBytes;
        if (task_ord != t || config_ord != c || split_byte != static_cast<std::uint8_t>(split)) {
          throw StoreError("preds.idx: records not dense or not sorted by (task, config, split)");
        }
        const auto& task = repo.tasks_[t];
        if (entry.rows != task.rows(split) || entry.cols != task.output_dim) {
          throw StoreError("preds.idx: shape mismatch for task " + CellName(task) + " config " +
                           repo.configs_[c].config_id);
        }
        if (entry.offset < kFileHeaderBytes || entry.offset % alignof(float) != 0) {
          throw StoreError("preds.idx: bad offset");
        }
        max_extent = std::max<std::uint64_t>(max_extent, entry.offset + std::uint64_t{entry.rows} * entry.cols * 4);
        repo.index_.push_back(entry);
      }
    }
  }
  if (blob.size() < max_extent) {
    throw StoreError("preds.blob: blob shorter than index extent");
  }

  repo.blob_ = blob;
  repo.evals_ = backing->evals_map->bytes();
  repo.labels_ = backing->labels_map->bytes();
  repo.backing_ = std::move(backing);
  return repo;
}

std::vector<std::size_t> Repository::TasksOfDataset(std::string_view dataset) const {
  FindDataset(dataset);
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < tasks_.size(); ++t) {
    if (tasks_[t].dataset_id == dataset) out.push_back(t);
  }
  return out;
}

std::size_t Repository::FindTask(std::string_view dataset, int fold) const {
  const auto it = task_lookup_.find(std::make_pair(std::string(dataset), fold));
  if (it == task_lookup_.end()) {
    throw std::out_of_range("unknown task: " + std::string(dataset) + "/" + std::to_string(fold));
  }
  return it->second;
}

std::size_t Repository::FindConfig(std::string_view config_id) const {
  const auto it = config_lookup_.find(config_id);
  if (it == config_lookup_.end()) throw std::out_of_range("unknown config: " + std::string(config_id));
  return it->second;
}

std::size_t Repository::FindDataset(std::string_view dataset) const {
  const auto it = dataset_lookup_.find(dataset);
  if (it == dataset_lookup_.end()) throw std::out_of_range("unknown dataset: " + std::string(dataset));
  return it->second;
}

PredictionView Repository::Predict(std::size_t task, std::size_t config, Split split) const {
  if (task >= tasks_.size()) throw std::out_of_range("unknown task ordinal " + std::to_string(task));
  if (config >= configs_.size()) throw std::out_of_range("unknown config ordinal " + std::to_string(config));
  const IndexEntry& entry = index_entry(task, config, split);
  const std::size_t count = std::size_t{entry.rows} * entry.cols;
  stats_->blob_bytes.fetch_add(count * sizeof(float), std::memory_order_relaxed);
  const auto* first = reinterpret_cast<const float*>(blob_.data() + entry.offset);
  return PredictionView{entry.rows, entry.cols, std::span<const float>(first, count)};
}

std::span<const double> Repository::Labels(std::size_t task, Split split) const {
  const auto& meta = tasks_.at(task);
  std::uint64_t offset = label_offsets_[task];
  if (split == Split::kTest) offset += std::uint64_t{meta.n_val} * sizeof(double);
  const auto* first = reinterpret_cast<const double*>(labels_.data() + offset);
  return {first, meta.rows(split)};
}

EvaluationRecord Repository::Evaluation(std::size_t task, std::size_t config) const {
  if (task >= tasks_.size() || config >= configs_.size()) {
    throw std::out_of_range("evaluation cell out of range");
  }
  const std::size_t offset = kFileHeaderBytes + (task * configs_.size() + config) * kEvalRecordBytes;
  EvaluationRecord rec;
  rec.loss_val = Load<double>(evals_, offset);
  rec.loss_test = Load<double>(evals_, offset + 8);
  rec.time_fit = Load<double>(evals_, offset + 16);
  rec.time_infer = Load<double>(evals_, offset + 24);
  return rec;
}

RepositoryContents Repository::ToContents() const {
  RepositoryContents out;
  out.folds_per_dataset = folds_per_dataset_;
  out.tasks = tasks_;
  out.configs = configs_;
  for (std::size_t t = 0; t < tasks_.size(); ++t) {
    const auto val = Labels(t, Split::kVal);
    const auto test = Labels(t, Split::kTest);
    out.labels_val.emplace_back(val.begin(), val.end());
    out.labels_test.emplace_back(test.begin(), test.end());
  }
  out.predictions.resize(tasks_.size() * configs_.size() * 2);
  for (std::size_t t = 0; t < tasks_.size(); ++t) {
    for (std::size_t c = 0; c < configs_.size(); ++c) {
      for (Split split : {Split::kVal, Split::kTest}) {
        const auto view = Predict(t, c, split);
        out.predictions[out.PredictionSlot(t, c, split)].assign(view.values.begin(), view.values.end());
      }
      out.evaluations.push_back(Evaluation(t, c));
    }
  }
  return out;
}

std::string ManifestJson(const Repository& repo) {
  json manifest;
  manifest["format"] = "predrepo";
  manifest["schema_version"] = kFormatVersion;
  manifest["folds_per_dataset"] = repo.folds_per_dataset();
  json tasks = json::array();
  for (std::size_t t = 0; t < repo.num_tasks(); ++t) {
    const auto& task = repo.task(t);
    tasks.push_back({{"dataset", task.dataset_id},
                     {"fold", task.fold},
                     {"problem", ToString(task.problem)},
                     {"metric", ToString(MetricFor(task.problem))},
                     {"n_val", task.n_val},
                     {"n_test", task.n_test},
                     {"output_dim", task.output_dim},
                     {"n_features", task.n_features},
                     {"label_checksum", LabelChecksum(repo.Labels(t, Split::kVal), repo.Labels(t, Split::kTest))}});
  }
  manifest["tasks"] = std::move(tasks);
  json configs = json::array();
  for (const auto& config : repo.configs()) {
    configs.push_back({{"id", config.config_id},
                       {"family", config.family},
                       {"is_default", config.is_default},
                       {"hyperparams", config.hyperparams}});
  }
  manifest["configs"] = std::move(configs);
  return manifest.dump(2) + "\n";
}

namespace {

// Returns an empty string when the matrix satisfies the value invariants.
std::string CheckPredictionValues(const TaskMeta& task, const PredictionView& view) {
  for (std::size_t r = 0; r < view.rows; ++r) {
    double row_sum = 0.0;
    for (std::size_t c = 0; c < view.cols; ++c) {
      const float v = view.at(r, c);
      if (!std::isfinite(v)) return "NaN or infinity at row " + std::to_string(r);
      if (task.problem != ProblemType::kRegression && (v < 0.0f || v > 1.0f)) {
        return "probability outside [0, 1] at row " + std::to_string(r);
      }
      row_sum += v;
    }
    if (task.problem == ProblemType::kMulticlass && std::abs(row_sum - 1.0) > kRowSumTolerance) {
      return "row-stochastic violation at row " + std::to_string(r);
    }
  }
  return {};
}

}  // namespace

void WriteRepo(const Repository& repo, const std::filesystem::path& dir) {
  for (std::size_t t = 0; t < repo.num_tasks(); ++t) {
    const auto& task = repo.task(t);
    for (std::size_t c = 0; c < repo.num_configs(); ++c) {
      for (Split split : {Split::kVal, Split::kTest}) {
        const std::string problem = CheckPredictionValues(task, repo.Predict(t, c, split));
        if (!problem.empty()) {
          throw StoreError("task " + CellName(task) + " config " + repo.config(c).config_id + " split " +
                           (split == Split::kVal ? "val" : "test") + ": " + problem);
        }
      }
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw StoreError("cannot create directory " + dir.string() + ": " + ec.message());

  const std::string manifest = ManifestJson(repo);
  WriteBytes(dir / kManifestFile, std::as_bytes(std::span<const char>(manifest)));
  WriteBytes(dir / kLabelsFile, repo.labels_bytes());
  WriteBytes(dir / kEvalsFile, repo.evals_bytes());

  std::vector<std::byte> index;
  index.reserve(kFileHeaderBytes + repo.num_tasks() * repo.num_configs() * 2 * kIndexRecordBytes);
  AppendHeader(index, kIndexMagic);
  for (std::uint32_t t = 0; t < repo.num_tasks(); ++t) {
    for (std::uint32_t c = 0; c < repo.num_configs(); ++c) {
      for (Split split : {Split::kVal, Split::kTest}) {
        const IndexEntry& entry = repo.index_entry(t, c, split);
        Append(index, t);
        Append(index, c);
        Append(index, static_cast<std::uint8_t>(split));
        const std::uint8_t pad[3] = {0, 0, 0};
        Append(index, pad);
        Append(index, entry.offset);
        Append(index, entry.rows);
        Append(index, entry.cols);
      }
    }
  }
  WriteBytes(dir / kIndexFile, index);
  WriteBytes(dir / kBlobFile, repo.blob_bytes());
}

std::vector<Violation> ValidateRepo(const Repository& repo) {
  std::vector<Violation> report;
  std::vector<double> buffer;
  for (std::size_t t = 0; t < repo.num_tasks(); ++t) {
    const auto& task = repo.task(t);
    const std::string task_name = CellName(task);
    const auto val_labels = repo.Labels(t, Split::kVal);
    const auto test_labels = repo.Labels(t, Split::kTest);
    for (const auto& labels : {val_labels, test_labels}) {
      for (double y : labels) {
        const bool ok = task.problem == ProblemType::kRegression
                            ? std::isfinite(y)
                            : (y >= 0.0 && y < (task.problem == ProblemType::kBinary ? 2.0 : task.output_dim) &&
                               y == std::floor(y));
        if (!ok) {
          report.push_back({task_name, "", "invalid label value"});
          break;
        }
      }
    }

    for (std::size_t c = 0; c < repo.num_configs(); ++c) {
      const std::string& config_name = repo.config(c).config_id;
      bool values_ok = true;
      for (Split split : {Split::kVal, Split::kTest}) {
        const IndexEntry& entry = repo.index_entry(t, c, split);
        if (entry.rows != task.rows(split) || entry.cols != task.output_dim) {
          report.push_back({task_name, config_name, "prediction missing or misshapen"});
          values_ok = false;
          continue;
        }
        const std::string problem = CheckPredictionValues(task, repo.Predict(t, c, split));
        if (!problem.empty()) {
          report.push_back({task_name, config_name, std::string(split == Split::kVal ? "val" : "test") + ": " + problem});
          values_ok = false;
        }
      }
      const EvaluationRecord rec = repo.Evaluation(t, c);
      if (!(rec.loss_val >= 0.0) || !(rec.loss_test >= 0.0) || !(rec.time_fit >= 0.0) || !(rec.time_infer >= 0.0)) {
        report.push_back({task_name, config_name, "evaluation record has negative or NaN fields"});
      }
      if (!values_ok) continue;
      for (Split split : {Split::kVal, Split::kTest}) {
        const auto view = repo.Predict(t, c, split);
        buffer.assign(view.values.begin(), view.values.end());
        double recomputed = 0.0;
        try {
          recomputed = TaskLoss(task, split, buffer, split == Split::kVal ? val_labels : test_labels);
        } catch (const std::invalid_argument& e) {
          report.push_back({task_name, config_name, std::string("loss not computable: ") + e.what()});
          continue;
        }
        const double stored = split == Split::kVal ? rec.loss_val : rec.loss_test;
        if (!(std::abs(stored - recomputed) <= kLossRecomputeTolerance * std::max(1.0, std::abs(recomputed)))) {
          char msg[160];
          std::snprintf(msg, sizeof(msg), "stored %s loss %.9g differs from recomputed %.9g",
                        split == Split::kVal ? "val" : "test", stored, recomputed);
          report.push_back({task_name, config_name, msg});
        }
      }
    }
  }

  const auto& checksums = repo.stored_label_checksums();
  for (std::size_t t = 0; t < checksums.size(); ++t) {
    if (checksums[t] != LabelChecksum(repo.Labels(t, Split::kVal), repo.Labels(t, Split::kTest))) {
      report.push_back({CellName(repo.task(t)), "", "label checksum mismatch"});
    }
  }
  return report;
}

}  // namespace predrepo
