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

#include <complex>
#include <span>
#include <vector>

namespace spci {

using cplx = std::complex<double>;

/// Forward DFT of arbitrary length, X[k] = sum_n x[n] exp(-2 pi i k n / N),
/// unscaled. Mixed-radix Cooley-Tukey over the prime factors of N; lengths
/// with a prime factor above 256 go through Bluestein's chirp-z instead.
///
/// The transform is a fixed sequence of multiplications and additions, so
/// scaling the input by a power of two scales every output bit-exactly.
std::vector<cplx> dft(std::span<const cplx> input);

/// Inverse of dft() including the 1/N factor.
std::vector<cplx> idft(std::span<const cplx> input);

/// dft() of a real sequence; returns all N bins.
std::vector<cplx> dft_real(std::span<const double> input);

}  // namespace spci
