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

#include "spci/waveform.hpp"

namespace spci {

/// Closed frequency interval [f_min, f_max] in Hz; 0 <= f_min < f_max.
struct FrequencyBand {
  double f_min = 0.0;
  double f_max = 0.0;

  void validate() const;
  friend bool operator==(const FrequencyBand&, const FrequencyBand&) = default;
};

/// One-sided magnitude spectrum, bins 0 .. floor(N/2) at k * freq_step.
struct Spectrum {
  std::vector<double> magnitudes;
  double freq_step = 0.0;
  std::size_t n_input = 0;  // time samples the transform consumed

  double frequency(std::size_t k) const {
    return static_cast<double>(k) * freq_step;
  }
};

struct NormalizedSpectrum : Spectrum {
  double norm_factor = 1.0;
};

/// Inclusive bin range [first, last] whose frequencies lie inside a band.
struct BinRange {
  std::size_t first = 0;
  std::size_t last = 0;
};

/// Bins k with f_min <= k * freq_step <= f_max. Throws kBandOutOfRange when
/// f_max exceeds the spectrum's top frequency or no bin falls in the band.
BinRange band_bins(const Spectrum& s, const FrequencyBand& band);

/// Unwindowed, unscaled DFT moduli over the exact sample count of `w`.
Spectrum magnitude_spectrum(const Waveform& w);

/// Where normalize() looks for the reference maximum.
enum class NormScope {
  kBand,  // only bins inside the analysis band
  kFull,  // every bin of the one-sided spectrum, DC included
};

/// Divides all bins by the largest magnitude in the chosen scope; that bin
/// becomes exactly 1. Throws kAllZeroInBand when the scope has no positive
/// magnitude.
NormalizedSpectrum normalize(const Spectrum& s, const FrequencyBand& band,
                             NormScope scope = NormScope::kBand);

}  // namespace spci
