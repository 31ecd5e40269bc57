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

#include "spci/spectrum.hpp"

#include <cmath>
#include <string>

#include "spci/error.hpp"
#include "spci/fft.hpp"

namespace spci {

void FrequencyBand::validate() const {
  require(std::isfinite(f_min) && std::isfinite(f_max),
          "band limits must be finite");
  require(f_min >= 0.0, "f-min must be >= 0");
  require(f_min < f_max, "f-min must be below f-max");
}

BinRange band_bins(const Spectrum& s, const FrequencyBand& band) {
  band.validate();
  const double nyquist =
      0.5 * s.freq_step * static_cast<double>(s.n_input);
  if (band.f_max > nyquist) {
    fail(ErrorKind::kBandOutOfRange,
         "f-max " + std::to_string(band.f_max) + " Hz exceeds Nyquist " +
             std::to_string(nyquist) + " Hz");
  }
  const std::size_t n = s.magnitudes.size();
  // Start from the rounded guess and walk until the defining inequalities
  // f_min <= k * step <= f_max hold with the same arithmetic as frequency().
  auto first = static_cast<std::size_t>(std::ceil(band.f_min / s.freq_step));
  while (first > 0 && s.frequency(first - 1) >= band.f_min) --first;
  while (first < n && s.frequency(first) < band.f_min) ++first;

  auto last = static_cast<std::size_t>(std::floor(band.f_max / s.freq_step));
  if (last >= n) last = n - 1;
  while (last + 1 < n && s.frequency(last + 1) <= band.f_max) ++last;
  while (last > 0 && s.frequency(last) > band.f_max) --last;

  if (first >= n || first > last || s.frequency(last) > band.f_max) {
    fail(ErrorKind::kBandOutOfRange, "no spectral bin inside the band");
  }
  return {first, last};
}

Spectrum magnitude_spectrum(const Waveform& w) {
  const std::vector<cplx> full = dft_real(w.samples());
  const std::size_t n = w.size();
  Spectrum s;
  s.n_input = n;
  s.freq_step = w.sample_rate() / static_cast<double>(n);
  s.magnitudes.resize(n / 2 + 1);
  for (std::size_t k = 0; k < s.magnitudes.size(); ++k) {
    s.magnitudes[k] = std::abs(full[k]);
  }
  return s;
}

NormalizedSpectrum normalize(const Spectrum& s, const FrequencyBand& band,
                             NormScope scope) {
  std::size_t lo = 0;
  std::size_t hi = s.magnitudes.size() - 1;
  if (scope == NormScope::kBand) {
    const BinRange r = band_bins(s, band);
    lo = r.first;
    hi = r.last;
  }
  double peak = 0.0;
  for (std::size_t k = lo; k <= hi; ++k) {
    if (s.magnitudes[k] > peak) peak = s.magnitudes[k];
  }
  if (!(peak > 0.0)) {
    fail(ErrorKind::kAllZeroInBand,
         "no positive magnitude in the normalization range");
  }
  NormalizedSpectrum out;
  out.freq_step = s.freq_step;
  out.n_input = s.n_input;
  out.norm_factor = peak;
  out.magnitudes.resize(s.magnitudes.size());
  for (std::size_t k = 0; k < s.magnitudes.size(); ++k) {
    out.magnitudes[k] = s.magnitudes[k] / peak;
  }
  return out;
}

}  // namespace spci
