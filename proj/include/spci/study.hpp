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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spci/ingest.hpp"
#include "spci/spc_index.hpp"
#include "spci/stats.hpp"

namespace spci::study {

using ingest::DatasetManifest;

/// Conjunction of optional equality constraints on record metadata.
struct Selector {
  std::optional<std::string> plate_id;
  std::optional<int> tx_disc;
  std::optional<int> rx_disc;
  std::optional<int> excitation_pct;
  std::optional<int> gain_db;
  std::optional<std::string> series;

  bool matches(const ingest::MeasurementMeta& m) const;
  std::string describe() const;
};

/// Transmitter disc 2, receiver disc 3, 20 % excitation, 22 dB gain: the
/// condition used for the plate comparisons.
Selector reference_condition();

struct NamedGrid {
  std::string label;
  ThresholdGrid grid;
};

struct Variant {
  std::string label;
  PreprocessOptions options;
};

/// {no DC correction, DC correction} x {exact length, zero padded}.
std::vector<Variant> preprocess_matrix();

struct StudyRow {
  std::string group;
  std::string series;
  std::optional<double> x;
  double value = 0.0;
  SpcCurve curve;
};

struct GroupStats {
  std::string group;
  stats::Summary summary;
};

/// Two groups whose SPC-I order flips between two threshold grids.
struct OrderingReversal {
  std::string variant;
  std::string grid_a;
  std::string grid_b;
  std::string group_a;
  std::string group_b;
  double a_under_grid_a = 0.0;
  double b_under_grid_a = 0.0;
  double a_under_grid_b = 0.0;
  double b_under_grid_b = 0.0;
};

struct ReciprocityRow {
  std::string plate;
  std::string forward_label;
  std::string backward_label;
  double forward = 0.0;
  double backward = 0.0;
  double ratio = 0.0;  // backward / forward
  bool flagged = false;
};

struct TrendRow {
  std::string series;
  std::size_t n_points = 0;
  std::optional<double> tau;  // empty when undefined (constant series)
  std::size_t increasing = 0;
  std::size_t decreasing = 0;
  std::size_t constant = 0;
  std::size_t non_monotone = 0;

  std::size_t total() const {
    return increasing + decreasing + constant + non_monotone;
  }
};

struct TripleRow {
  std::string series;
  double x[3] = {0.0, 0.0, 0.0};
  double y[3] = {0.0, 0.0, 0.0};
  stats::TripleShape shape = stats::TripleShape::kConstant;
};

struct StabilityRow {
  std::size_t n_avg = 0;
  double value = 0.0;
  double delta = 0.0;  // |value - value at the largest n_avg|
  bool stable = false;
};

struct ParamSet {
  std::string label;
  SpcParams params;
};

struct StudyResult {
  std::string study;
  std::string selector;
  std::vector<ParamSet> params;
  std::vector<StudyRow> rows;
  std::vector<GroupStats> stats;
  std::vector<OrderingReversal> reversals;
  std::vector<ReciprocityRow> reciprocity;
  std::vector<TrendRow> trends;
  std::vector<TripleRow> triples;
  std::vector<StabilityRow> stability;
  std::vector<std::string> missing;
};

/// Per-group summaries of rows, groups in natural label order.
std::vector<GroupStats> group_stats(const std::vector<StudyRow>& rows);

struct RunOptions {
  std::size_t threads = 0;  // 0 = hardware concurrency
};

/// SPC-I of the selected record of every plate for each preprocessing
/// variant and threshold grid. Rows are grouped by plate with series
/// "<variant>|<grid>"; reversals lists every plate pair whose order flips
/// between two grids under the same variant. Throws kMissingRecord naming
/// each plate without a matching record.
StudyResult run_preprocess_sensitivity(
    const DatasetManifest& dataset, const SpcParams& base,
    const std::vector<NamedGrid>& grids,
    const Selector& selector = reference_condition(),
    const std::vector<Variant>& variants = preprocess_matrix(),
    const RunOptions& opts = {});

/// SPC-I per (plate, tx->rx pair) for records matching `condition`, whose
/// disc fields are ignored. When `pairs` is empty the union of pairs present
/// anywhere is expected on every plate; absent combinations are listed in
/// `missing`, never fatal.
StudyResult run_pair_sweep(const DatasetManifest& dataset,
                           const SpcParams& params, const Selector& condition,
                           std::vector<std::pair<int, int>> pairs = {},
                           const RunOptions& opts = {});

struct RatioBounds {
  double lo = 0.8;
  double hi = 1.25;
};

/// Pairs disc_a->disc_b with disc_b->disc_a per plate at matched excitation,
/// gain and repetition; the disc fields of `condition` are ignored. Throws
/// kUnpairedRecord listing every record that has no counterpart.
StudyResult run_reciprocity(const DatasetManifest& dataset,
                            const SpcParams& params, const Selector& condition,
                            int disc_a = 2, int disc_b = 3,
                            RatioBounds bounds = {},
                            const RunOptions& opts = {});

/// SPC-I against excitation percent, one series per (plate, tx->rx).
StudyResult run_amplitude_study(const DatasetManifest& dataset,
                                const SpcParams& params,
                                const std::vector<int>& amplitudes_pct,
                                const Selector& selector = {},
                                const RunOptions& opts = {});

struct AmplitudeSeries {
  std::string label;
  std::function<Waveform(double amplitude)> generate;
};

StudyResult run_amplitude_study(const std::vector<AmplitudeSeries>& series,
                                const std::vector<double>& amplitudes,
                                const SpcParams& params,
                                const RunOptions& opts = {});

/// True when every amplitude series is exactly constant.
bool amplitude_invariant(const StudyResult& amplitude_result);

enum class GroupKey { kSeries, kPlate };

/// Mean, sample std and relative error per group of repeated records.
/// Throws kInsufficientRepetitions if a group has fewer than two.
StudyResult run_repeatability(const DatasetManifest& dataset,
                              const SpcParams& params,
                              const Selector& selector,
                              GroupKey key = GroupKey::kSeries,
                              const RunOptions& opts = {});

/// SPC-I of the average of the first n realizations for each n; a point is
/// stable when n >= stable_from and its distance to the value at the largest
/// n is at most `tolerance`.
StudyResult run_averaging_study(
    const std::function<Waveform(std::uint64_t realization)>& generator,
    const std::vector<std::size_t>& n_avg_values, const SpcParams& params,
    double tolerance, std::size_t stable_from = 32,
    const RunOptions& opts = {});

}  // namespace spci::study
