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

#include "spci/waveform.hpp"

#include <bit>
#include <cmath>
#include <utility>

#include "spci/error.hpp"

namespace spci {

Waveform::Waveform(std::vector<double> samples, double sample_rate, double t0)
    : samples_(std::move(samples)), sample_rate_(sample_rate), t0_(t0) {
  require(!samples_.empty(), "waveform must contain at least one sample");
  require(std::isfinite(sample_rate_) && sample_rate_ > 0.0,
          "sample rate must be positive");
}

Waveform Waveform::scaled(double factor) const {
  std::vector<double> out(samples_);
  for (double& v : out) v *= factor;
  return Waveform(std::move(out), sample_rate_, t0_);
}

Waveform dc_correct(const Waveform& w) {
  std::vector<double> out(w.samples().begin(), w.samples().end());
  const double offset = out.front();
  for (double& v : out) v -= offset;
  return Waveform(std::move(out), w.sample_rate(), w.t0());
}

std::size_t next_pow2(std::size_t n) { return std::bit_ceil(n); }

Waveform zero_pad_pow2(const Waveform& w) {
  std::vector<double> out(w.samples().begin(), w.samples().end());
  out.resize(next_pow2(out.size()), 0.0);
  return Waveform(std::move(out), w.sample_rate(), w.t0());
}

Waveform preprocess(const Waveform& w, const PreprocessOptions& opts) {
  if (!opts.dc_correct && !opts.zero_pad) return w;
  Waveform out = opts.dc_correct ? dc_correct(w) : w;
  if (opts.zero_pad) out = zero_pad_pow2(out);
  return out;
}

double energy(const Waveform& w) {
  double acc = 0.0;
  for (double v : w.samples()) acc += v * v;
  return acc;
}

}  // namespace spci
