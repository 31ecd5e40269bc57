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
#include <vector>

#include "spci/spectrum.hpp"
#include "spci/waveform.hpp"

namespace spci {

/// Equally spaced thresholds thr(i) = thr_min + (i - 1) * thr_step for
/// i = 1 .. count(), with count() = floor((thr_max - thr_min) / thr_step) + 1.
///
/// The floor tolerates a relative slack of 1e-9 so that grids such as
/// {0.001, 0.111, 1} whose span is an exact multiple of the step on paper
/// still include the final point despite binary rounding.
struct ThresholdGrid {
  double thr_min = 0.0;
  double thr_step = 0.0;
  double thr_max = 0.0;

  void validate() const;
  std::size_t count() const;
  double value(std::size_t i) const;  // zero-based: value(0) == thr_min
  std::vector<double> values() const;

  friend bool operator==(const ThresholdGrid&, const ThresholdGrid&) = default;
};

/// Every free parameter that changes an index value.
struct SpcParams {
  FrequencyBand band;
  ThresholdGrid grid;
  PreprocessOptions preprocess;
  NormScope norm_scope = NormScope::kBand;

  void validate() const;
  friend bool operator==(const SpcParams&, const SpcParams&) = default;
};

struct SpcCurve {
  std::vector<double> thresholds;
  std::vector<std::size_t> counts;

  bool is_non_increasing() const;
  friend bool operator==(const SpcCurve&, const SpcCurve&) = default;
};

struct SpcIndex {
  double value = 0.0;
  SpcCurve curve;
  SpcParams params;
  double norm_factor = 0.0;
  std::size_t n_input = 0;
  double freq_step = 0.0;
};

/// A local maximum of the spectrum, independent of any threshold.
struct Peak {
  std::size_t bin = 0;
  double height = 0.0;
};

/// All peaks whose (leftmost) bin lies inside `band`.
///
/// A peak is a strict local maximum m[k-1] < m[k] > m[k+1]; a flat run of
/// equal values bounded by strictly lower neighbours counts once at its
/// leftmost bin. Bins 0 and N/2, and runs touching either end, are never
/// peaks because they lack a neighbour in the spectrum. Neighbours outside
/// the band are still consulted.
std::vector<Peak> band_peaks(const Spectrum& s, const FrequencyBand& band);

/// Bins of band_peaks() whose height is strictly above `thr`.
std::vector<std::size_t> find_peaks(const NormalizedSpectrum& s,
                                    const FrequencyBand& band, double thr);

/// counts[i] = number of peaks strictly above grid.value(i).
SpcCurve spc_curve(const NormalizedSpectrum& s, const FrequencyBand& band,
                   const ThresholdGrid& grid);

/// Mean of the SPC curve for the full pipeline: preprocess, transform,
/// normalize, count.
SpcIndex spc_index(const Waveform& w, const SpcParams& params);

/// Spectrum stage of spc_index(), exposed for callers that want to inspect
/// or dump the normalized spectrum.
NormalizedSpectrum normalized_spectrum(const Waveform& w,
                                       const SpcParams& params);

/// Instrumentation hook called with every curve spc_curve() returns. May be
/// invoked concurrently from worker threads. Pass nullptr to remove.
using CurveObserver = void (*)(const SpcCurve&);
void set_curve_observer(CurveObserver observer);

}  // namespace spci
