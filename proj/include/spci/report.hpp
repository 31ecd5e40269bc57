// Copyright 2026 The spci Authors. All rights reserved.
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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spci/spc_index.hpp"
#include "spci/study.hpp"

namespace spci::report {

using Json = nlohmann::ordered_json;

enum class Format { kCsv, kJson, kPlot };

/// "csv", "json" or "plot"; throws kInvalidArgument otherwise.
Format parse_format(std::string_view name);

/// Six significant digits, "%.6g" style; non-finite values become "NaN".
std::string format_number(double v);

/// Value rounded to six significant digits, for JSON emission. Non-finite
/// values map to null.
Json rounded(double v);

/// RFC 4180 field: quoted when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view s);

/// Full parameter echo of an SPC-I evaluation.
Json params_to_json(const SpcParams& p);

Json result_to_json(const study::StudyResult& r);

/// Writes the report files for `r` next to `stem` and returns their paths.
///   csv   <stem>.csv (rows), <stem>.stats.csv, <stem>.params.csv and one
///         <stem>.<table>.csv per non-empty finding table
///   json  <stem>.json
///   plot  <stem>.dat: '#' comment header, then one row per x value (or per
///         group) and one whitespace-separated column per series
/// Output is byte-identical for identical input. Throws kIoError.
std::vector<std::filesystem::path> emit_report(
    const study::StudyResult& r, Format format,
    const std::filesystem::path& stem);

}  // namespace spci::report
