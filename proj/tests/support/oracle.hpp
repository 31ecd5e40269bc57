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

// Brute-force reference implementations used only by the tests. Nothing
// here calls into the library's spectral or peak code.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "spci/spc_index.hpp"

namespace spci::oracle {

/// O(N^2) DFT in long double with exactly reduced twiddle angles.
std::vector<std::complex<long double>> dft(std::span<const std::complex<double>> x);

/// |X_k| for k = 0..floor(N/2) of a real sequence, O(N^2).
std::vector<long double> magnitudes(std::span<const double> x);

/// First-sample subtraction and power-of-two zero padding, written out.
std::vector<double> prepare(std::span<const double> x, bool dc_correct, bool zero_pad);

/// Peaks by definition: k in [first, last], 0 < k < size-1, left neighbour
/// strictly lower, and the run of equal values starting at k ends in a
/// strictly lower value.
std::vector<std::size_t> naive_peaks(const std::vector<double>& m, std::size_t first,
                                     std::size_t last);

struct OracleResult {
  std::vector<double> normalized;
  std::size_t first = 0;
  std::size_t last = 0;
  SpcCurve curve;
};

/// Full pipeline: prepare, brute-force DFT, normalize, naive peak scan and
/// a threshold-by-threshold count over every peak.
OracleResult spc(const std::vector<double>& samples, double sample_rate,
                 const SpcParams& p);

}  // namespace spci::oracle
