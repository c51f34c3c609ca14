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

// CSV emission and parsing for simulation results and report tables.
// Floats are written with 6 significant digits ("%.6g").

#ifndef PREDREPO_REPORT_HPP_
#define PREDREPO_REPORT_HPP_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "predrepo/aggregate.hpp"
#include "predrepo/simulate.hpp"
#include "predrepo/store.hpp"

namespace predrepo {

std::string FormatFloat(double value);

// Header of the per-task results format read back by ReadResultsCsv.
inline constexpr std::string_view kResultsHeader =
    "method,dataset,fold,val_loss,test_loss,time_fit,time_infer,used_fallback,n_included,members";

inline constexpr std::string_view kTable2Header = "method,normalized-error,rank,time fit (s),time infer (s)";
inline constexpr std::string_view kWinRateHeader =
    "method,winrate,>,<,=,time fit (s),time infer (s),loss (rescaled),rank";

void WriteResultsHeader(std::ostream& out);
// One row per SimResult; members are config ids joined by ';'.
void WriteResultsRows(std::ostream& out, const Repository& repo, std::string_view method,
                      const std::vector<SimResult>& results);

MethodResults ToMethodResults(const Repository& repo, std::string method, const std::vector<SimResult>& results);

// Parses a results CSV into one MethodResults per method, in order of first
// appearance. Throws std::invalid_argument with the line number on
// malformed input.
std::vector<MethodResults> ReadResultsCsv(std::istream& in, std::string_view source = "results");

void WriteTable2(std::ostream& out, const std::vector<ReportRow>& rows);
void WriteWinRateTable(std::ostream& out, const std::vector<WinRateRow>& rows);

// Splits on `sep`, no quoting.
std::vector<std::string> SplitFields(std::string_view line, char sep = ',');

}  // namespace predrepo

#endif  // PREDREPO_REPORT_HPP_
