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

#include "predrepo/report.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace predrepo {
namespace {

double ParseDouble(const std::string& field, std::string_view source, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(source) + ":" + std::to_string(line) + ": bad number '" + field + "'");
  }
}

}  // namespace

std::string FormatFloat(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

std::vector<std::string> SplitFields(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

void WriteResultsHeader(std::ostream& out) { out << kResultsHeader << '\n'; }

void WriteResultsRows(std::ostream& out, const Repository& repo, std::string_view method,
                      const std::vector<SimResult>& results) {
  for (const SimResult& r : results) {
    const TaskMeta& task = repo.task(r.task);
    out << method << ',' << task.dataset_id << ',' << task.fold << ',' << FormatFloat(r.val_loss) << ','
        << FormatFloat(r.test_loss) << ',' << FormatFloat(r.sim_fit_time_s) << ',' << FormatFloat(r.sim_infer_time_s)
        << ',' << (r.used_fallback ? 1 : 0) << ',' << r.included.size() << ',';
    for (std::size_t i = 0; i < r.members.size(); ++i) {
      if (i > 0) out << ';';
      out << repo.config(r.members[i]).config_id;
    }
    out << '\n';
  }
}

MethodResults ToMethodResults(const Repository& repo, std::string method, const std::vector<SimResult>& results) {
  MethodResults m;
  m.method = std::move(method);
  for (const SimResult& r : results) {
    const TaskMeta& task = repo.task(r.task);
    m.tasks.push_back({task.dataset_id, task.fold});
    m.loss.push_back(r.test_loss);
    m.time_fit.push_back(r.sim_fit_time_s);
    m.time_infer.push_back(r.sim_infer_time_s);
  }
  return m;
}

std::vector<MethodResults> ReadResultsCsv(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw std::invalid_argument(std::string(source) + ": empty file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = SplitFields(line);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  for (const char* required : {"method", "dataset", "fold", "test_loss"}) {
    if (!column.contains(required)) {
      throw std::invalid_argument(std::string(source) + ":1: missing column '" + required + "'");
    }
  }
  const bool has_fit = column.contains("time_fit");
  const bool has_infer = column.contains("time_infer");

  std::vector<MethodResults> methods;
  std::map<std::string, std::size_t> method_index;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = SplitFields(line);
    if (fields.size() != header.size()) {
      throw std::invalid_argument(std::string(source) + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    const std::string& name = fields[column["method"]];
    auto [it, inserted] = method_index.emplace(name, methods.size());
    if (inserted) {
      methods.emplace_back();
      methods.back().method = name;
    }
    MethodResults& m = methods[it->second];
    const std::string& fold_text = fields[column["fold"]];
    int fold = 0;
    const auto [ptr, ec] = std::from_chars(fold_text.data(), fold_text.data() + fold_text.size(), fold);
    if (ec != std::errc() || ptr != fold_text.data() + fold_text.size()) {
      throw std::invalid_argument(std::string(source) + ":" + std::to_string(line_no) + ": bad fold '" + fold_text + "'");
    }
    m.tasks.push_back({fields[column["dataset"]], fold});
    m.loss.push_back(ParseDouble(fields[column["test_loss"]], source, line_no));
    if (has_fit) m.time_fit.push_back(ParseDouble(fields[column["time_fit"]], source, line_no));
    if (has_infer) m.time_infer.push_back(ParseDouble(fields[column["time_infer"]], source, line_no));
  }
  return methods;
}

void WriteTable2(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kTable2Header << '\n';
  for (const ReportRow& r : rows) {
    out << r.method << ',' << FormatFloat(r.normalized_error) << ',' << FormatFloat(r.rank) << ','
        << FormatFloat(r.time_fit_s) << ',' << FormatFloat(r.time_infer_s) << '\n';
  }
}

void WriteWinRateTable(std::ostream& out, const std::vector<WinRateRow>& rows) {
  out << kWinRateHeader << '\n';
  for (const WinRateRow& r : rows) {
    char rate[16];
    std::snprintf(rate, sizeof(rate), "%.3f", r.winrate.winrate);
    out << r.method << ',' << rate << ',' << r.winrate.n_better << ',' << r.winrate.n_worse << ','
        << r.winrate.n_tied << ',' << FormatFloat(r.time_fit_s) << ',' << FormatFloat(r.time_infer_s) << ','
        << FormatFloat(r.rescaled_loss) << ',' << FormatFloat(r.rank) << '\n';
  }
}

}  // namespace predrepo
