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

#include "spci/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spci/error.hpp"
#include "spci/noise.hpp"

namespace spci::synth {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// sin(2 pi f n / fs) with the cycle count reduced to [0, 1) first, so
// exact-bin tones stay leakage-free to rounding level over long records.
double tone_sin(double freq, std::size_t n, double sample_rate) {
  double cycles = freq * static_cast<double>(n) / sample_rate;
  cycles -= std::floor(cycles);
  return std::sin(kTwoPi * cycles);
}

double tone_cos(double freq, std::size_t n, double sample_rate) {
  double cycles = freq * static_cast<double>(n) / sample_rate;
  cycles -= std::floor(cycles);
  return std::cos(kTwoPi * cycles);
}

void validate_tones(const std::vector<Tone>& tones, double sample_rate) {
  require(!tones.empty(), "at least one tone required");
  for (const Tone& t : tones) {
    require(t.amplitude > 0.0, "tone amplitudes must be positive");
    require(t.freq > 0.0 && t.freq < sample_rate / 2.0,
            "tone frequencies must lie in (0, Nyquist)");
  }
}

void validate_record(double duration, double sample_rate) {
  require(std::isfinite(sample_rate) && sample_rate > 0.0,
          "sample rate must be positive");
  require(std::isfinite(duration) && duration > 0.0,
          "duration must be positive");
  require(sample_count(duration, sample_rate) > 0,
          "duration shorter than one sample");
}

// sum_i c_i sin(2 pi f_i t_n)
std::vector<double> tone_sum(const std::vector<Tone>& tones, std::size_t n,
                             double sample_rate) {
  std::vector<double> s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (const Tone& t : tones) {
      acc += t.amplitude * tone_sin(t.freq, i, sample_rate);
    }
    s[i] = acc;
  }
  return s;
}

}  // namespace

std::size_t sample_count(double duration, double sample_rate) {
  return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

double exact_bin_freq(std::size_t k, std::size_t n, double sample_rate) {
  return static_cast<double>(k) * sample_rate / static_cast<double>(n);
}

void Rc1Pulse::validate() const {
  require(std::isfinite(u0) && u0 > 0.0, "u0 must be positive");
  require(std::isfinite(fc) && fc > 0.0, "fc must be positive");
  require(std::isfinite(delay) && delay >= 0.0, "delay must be >= 0");
}

Waveform rc1_waveform(const Rc1Pulse& p, double sample_rate,
                      double duration) {
  p.validate();
  validate_record(duration, sample_rate);
  const double end = p.delay + 1.0 / p.fc;
  if (end > duration * (1.0 + 1e-12)) {
    fail(ErrorKind::kDurationTooShort,
         "record of " + std::to_string(duration) +
             " s ends before the burst (" + std::to_string(end) + " s)");
  }
  const std::size_t n = sample_count(duration, sample_rate);
  std::vector<double> u(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double phase =
        (static_cast<double>(i) / sample_rate - p.delay) * p.fc;
    if (phase < 0.0 || phase > 1.0) continue;
    const double c = std::cos(kTwoPi * phase);
    u[i] = -0.5 * (1.0 - c) * c * p.u0;
  }
  return Waveform(std::move(u), sample_rate);
}

void QuadraticMixSpec::validate() const {
  require(e0 > 0.0, "E0 must be positive");
  require(e1 >= 0.0, "E1 must be >= 0");
  require(amplitude >= 0.0, "amplitude must be >= 0");
  validate_record(duration, sample_rate);
  validate_tones(tones, sample_rate);
}

Waveform quadratic_mix_waveform(const QuadraticMixSpec& spec) {
  spec.validate();
  const std::size_t n = sample_count(spec.duration, spec.sample_rate);
  std::vector<double> out = tone_sum(spec.tones, n, spec.sample_rate);
  for (double& v : out) {
    // Evaluation order matters for exact scaling under power-of-two factors.
    const double eps = spec.amplitude * v;
    v = spec.e0 * eps - spec.e1 * (eps * eps);
  }
  return Waveform(std::move(out), spec.sample_rate);
}

void HertzianMixSpec::validate() const {
  require(e0 > 0.0, "E0 must be positive");
  require(h1 >= 0.0, "h1 must be >= 0");
  require(amplitude >= 0.0, "amplitude must be >= 0");
  require(exponent > 0.0, "exponent must be positive");
  validate_record(duration, sample_rate);
  validate_tones(tones, sample_rate);
}

Waveform hertzian_mix_waveform(const HertzianMixSpec& spec) {
  spec.validate();
  const std::size_t n = sample_count(spec.duration, spec.sample_rate);
  std::vector<double> out = tone_sum(spec.tones, n, spec.sample_rate);
  const double linear_gain = spec.e0 * spec.amplitude;
  for (double& v : out) v *= linear_gain;
  if (spec.h1 == 0.0) return Waveform(std::move(out), spec.sample_rate);

  const double mix_gain = spec.h1 * std::pow(spec.amplitude, spec.exponent);
  const std::size_t m = spec.tones.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const Tone& a = spec.tones[i];
      const Tone& b = spec.tones[j];
      const double line = mix_gain * a.amplitude * b.amplitude;
      const double f_sum = a.freq + b.freq;
      const double f_diff = std::abs(a.freq - b.freq);
      for (std::size_t k = 0; k < n; ++k) {
        double v = line * tone_cos(f_sum, k, spec.sample_rate);
        if (i != j) v -= line * tone_cos(f_diff, k, spec.sample_rate);
        out[k] += v;
      }
    }
  }
  return Waveform(std::move(out), spec.sample_rate);
}

void ModalPlateSpec::validate(double sample_rate) const {
  require(!modes.empty(), "modal spec needs at least one mode");
  for (const Mode& m : modes) {
    require(m.freq > 0.0 && m.freq < sample_rate / 2.0,
            "mode frequencies must lie in (0, Nyquist)");
    require(m.q > 0.0, "mode Q must be positive");
  }
  require(noise_rms >= 0.0, "noise rms must be >= 0");
}

std::vector<double> modal_impulse_response(const ModalPlateSpec& spec,
                                           double sample_rate,
                                           std::size_t n) {
  spec.validate(sample_rate);
  std::vector<double> h(n, 0.0);
  for (const Mode& m : spec.modes) {
    const double decay = std::numbers::pi * m.freq / m.q;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / sample_rate;
      h[i] += m.gain * std::exp(-decay * t) * tone_sin(m.freq, i, sample_rate);
    }
  }
  return h;
}

Waveform modal_plate_response(const Waveform& excitation,
                              const ModalPlateSpec& spec,
                              const std::optional<Nonlinearity>& nonlinearity,
                              std::uint64_t realization) {
  const std::size_t n = excitation.size();
  const double rate = excitation.sample_rate();
  const std::vector<double> h = modal_impulse_response(spec, rate, n);

  std::vector<double> y(n, 0.0);
  const auto x = excitation.samples();
  for (std::size_t m = 0; m < n; ++m) {
    const double xm = x[m];
    if (xm == 0.0) continue;
    for (std::size_t i = m; i < n; ++i) y[i] += xm * h[i - m];
  }

  if (nonlinearity && nonlinearity->strength != 0.0) {
    const Nonlinearity& nl = *nonlinearity;
    for (double& v : y) {
      if (nl.kind == NonlinearityKind::kQuadratic) {
        v -= nl.strength * (v * v);
      } else {
        v -= nl.strength * std::pow(std::abs(v), nl.exponent);
      }
    }
  }

  Waveform out(std::move(y), rate, excitation.t0());
  if (spec.noise_rms > 0.0) {
    out = add_noise(out, spec.noise_rms, spec.seed, realization);
  }
  return out;
}

Waveform add_noise(const Waveform& w, double rms, std::uint64_t seed,
                   std::uint64_t realization) {
  const CounterRng rng(seed, realization);
  std::vector<double> out(w.samples().begin(), w.samples().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += rms * rng.gaussian(i);
  return Waveform(std::move(out), w.sample_rate(), w.t0());
}

ModalPlateSpec random_modal_plate(std::uint64_t seed, std::size_t n_modes,
                                  double f_lo, double f_hi, double q_lo,
                                  double q_hi) {
  require(n_modes > 0, "need at least one mode");
  require(0.0 < f_lo && f_lo < f_hi, "invalid mode frequency range");
  require(0.0 < q_lo && q_lo <= q_hi, "invalid Q range");
  const CounterRng rng(seed, 0x6d6f646573ULL);
  ModalPlateSpec spec;
  spec.seed = seed;
  spec.modes.reserve(n_modes);
  for (std::size_t k = 0; k < n_modes; ++k) {
    Mode m;
    m.freq = rng.uniform(3 * k, f_lo, f_hi);
    m.q = rng.uniform(3 * k + 1, q_lo, q_hi);
    m.gain = rng.uniform(3 * k + 2, 0.2, 1.0);
    spec.modes.push_back(m);
  }
  return spec;
}

Waveform average_realizations(
    const std::function<Waveform(std::uint64_t)>& generator,
    std::size_t n_avg) {
  require(n_avg > 0, "n_avg must be positive");
  Waveform first = generator(0);
  std::vector<double> acc(first.samples().begin(), first.samples().end());
  for (std::uint64_t r = 1; r < n_avg; ++r) {
    const Waveform w = generator(r);
    require(w.size() == acc.size(), "realizations differ in length");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w[i];
  }
  const double inv = 1.0 / static_cast<double>(n_avg);
  for (double& v : acc) v *= inv;
  return Waveform(std::move(acc), first.sample_rate(), first.t0());
}

double rms(const Waveform& w) {
  return std::sqrt(energy(w) / static_cast<double>(w.size()));
}

}  // namespace spci::synth
