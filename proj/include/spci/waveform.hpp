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
#include <span>
#include <vector>

namespace spci {

/// Uniformly sampled voltage record.
///
/// Always holds at least one sample and a strictly positive sample rate; the
/// constructor rejects anything else with ErrorKind::kInvalidArgument.
/// Immutable once built, so instances can be shared freely across threads.
class Waveform {
 public:
  Waveform(std::vector<double> samples, double sample_rate, double t0 = 0.0);

  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }
  double sample_rate() const noexcept { return sample_rate_; }
  double t0() const noexcept { return t0_; }
  double duration() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_;
  }

  /// Every sample multiplied by `factor`; rate and t0 kept.
  Waveform scaled(double factor) const;

  friend bool operator==(const Waveform&, const Waveform&) = default;

 private:
  std::vector<double> samples_;
  double sample_rate_;
  double t0_;
};

struct PreprocessOptions {
  bool dc_correct = false;  // subtract the first sample from every sample
  bool zero_pad = false;    // pad to the next power of two before transforming

  friend bool operator==(const PreprocessOptions&,
                         const PreprocessOptions&) = default;
};

/// result[i] = w[i] - w[0]. Idempotent.
Waveform dc_correct(const Waveform& w);

/// Appends zeros up to the smallest power of two >= w.size(). A record whose
/// length is already a power of two comes back unchanged.
Waveform zero_pad_pow2(const Waveform& w);

/// Applies the enabled steps in the fixed order DC correction, then padding.
Waveform preprocess(const Waveform& w, const PreprocessOptions& opts);

std::size_t next_pow2(std::size_t n);

/// Sum of squared samples.
double energy(const Waveform& w);

}  // namespace spci
