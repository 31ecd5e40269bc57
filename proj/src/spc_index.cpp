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

#include "spci/spc_index.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "spci/error.hpp"

namespace spci {
namespace {

std::atomic<CurveObserver> g_curve_observer{nullptr};

}  // namespace

void set_curve_observer(CurveObserver observer) { g_curve_observer = observer; }

void ThresholdGrid::validate() const {
  require(std::isfinite(thr_min) && thr_min > 0.0 && thr_min <= 1.0,
          "thr-min must lie in (0, 1]");
  require(std::isfinite(thr_step) && thr_step > 0.0,
          "thr-step must be positive");
  require(std::isfinite(thr_max) && thr_max <= 1.0, "thr-max must be <= 1");
  require(thr_min <= thr_max, "thr-min must not exceed thr-max");
}

std::size_t ThresholdGrid::count() const {
  const double q = (thr_max - thr_min) / thr_step;
  const double slack = 1e-9 * std::max(1.0, q);
  return static_cast<std::size_t>(std::floor(q + slack)) + 1;
}

double ThresholdGrid::value(std::size_t i) const {
  return thr_min + static_cast<double>(i) * thr_step;
}

std::vector<double> ThresholdGrid::values() const {
  std::vector<double> v(count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = value(i);
  return v;
}

void SpcParams::validate() const {
  band.validate();
  grid.validate();
}

bool SpcCurve::is_non_increasing() const {
  return std::is_sorted(counts.rbegin(), counts.rend());
}

std::vector<Peak> band_peaks(const Spectrum& s, const FrequencyBand& band) {
  const BinRange range = band_bins(s, band);
  const std::vector<double>& m = s.magnitudes;
  const std::size_t n = m.size();
  std::vector<Peak> peaks;
  std::size_t k = std::max<std::size_t>(range.first, 1);
  while (k <= range.last && k + 1 < n) {
    if (!(m[k - 1] < m[k])) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end + 1 < n && m[end + 1] == m[k]) ++end;
    if (end + 1 < n && m[end + 1] < m[k]) peaks.push_back({k, m[k]});
    k = end + 1;
  }
  return peaks;
}

std::vector<std::size_t> find_peaks(const NormalizedSpectrum& s,
                                    const FrequencyBand& band, double thr) {
  require(thr > 0.0 && thr <= 1.0, "threshold must lie in (0, 1]");
  std::vector<std::size_t> bins;
  for (const Peak& p : band_peaks(s, band)) {
    if (p.height > thr) bins.push_back(p.bin);
  }
  return bins;
}

SpcCurve spc_curve(const NormalizedSpectrum& s, const FrequencyBand& band,
                   const ThresholdGrid& grid) {
  grid.validate();
  std::vector<double> heights;
  for (const Peak& p : band_peaks(s, band)) heights.push_back(p.height);
  std::sort(heights.begin(), heights.end());

  SpcCurve curve;
  curve.thresholds = grid.values();
  curve.counts.reserve(curve.thresholds.size());
  for (double thr : curve.thresholds) {
    const auto above = std::upper_bound(heights.begin(), heights.end(), thr);
    curve.counts.push_back(static_cast<std::size_t>(heights.end() - above));
  }
  if (const CurveObserver obs = g_curve_observer.load()) obs(curve);
  return curve;
}

NormalizedSpectrum normalized_spectrum(const Waveform& w,
                                       const SpcParams& params) {
  params.validate();
  const Waveform prepared = preprocess(w, params.preprocess);
  return normalize(magnitude_spectrum(prepared), params.band,
                   params.norm_scope);
}

SpcIndex spc_index(const Waveform& w, const SpcParams& params) {
  const NormalizedSpectrum s = normalized_spectrum(w, params);
  SpcIndex out;
  out.curve = spc_curve(s, params.band, params.grid);
  out.params = params;
  out.norm_factor = s.norm_factor;
  out.n_input = s.n_input;
  out.freq_step = s.freq_step;
  std::size_t total = 0;
  for (std::size_t c : out.curve.counts) total += c;
  out.value =
      static_cast<double>(total) / static_cast<double>(out.curve.counts.size());
  return out;
}

}  // namespace spci
