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
#include <vector>

#include "spci/waveform.hpp"

namespace spci::synth {

/// Number of samples for a record of `duration` seconds, rounded to nearest.
std::size_t sample_count(double duration, double sample_rate);

/// Single-cycle raised-cosine burst
///   u(t) = -u0 / 2 * (1 - cos(2 pi fc t)) * cos(2 pi fc t),  0 <= t <= 1/fc
/// and zero elsewhere. `delay` shifts the burst start.
struct Rc1Pulse {
  double u0 = 1.0;
  double fc = 500e3;
  double delay = 0.0;

  void validate() const;
};

/// Throws kDurationTooShort when the record ends before the burst does.
Waveform rc1_waveform(const Rc1Pulse& p, double sample_rate, double duration);

struct Tone {
  double amplitude = 1.0;  // relative amplitude c_i
  double freq = 0.0;       // Hz
};

/// Frequency of bin k for an N-sample record; tones placed here avoid leakage.
double exact_bin_freq(std::size_t k, std::size_t n, double sample_rate);

/// Strain eps(t) = A * sum_i c_i sin(2 pi f_i t) pushed through the quadratic
/// law sigma = E0 * eps - E1 * eps^2.
struct QuadraticMixSpec {
  double e0 = 1.0;
  double e1 = 0.0;
  double amplitude = 1.0;  // A
  std::vector<Tone> tones;
  double duration = 0.0;
  double sample_rate = 0.0;

  void validate() const;
};

Waveform quadratic_mix_waveform(const QuadraticMixSpec& spec);

/// Linear two-tone field E0 * A * sum c_i sin(2 pi f_i t) plus mixing lines
/// at f_i + f_j (i <= j) and |f_i - f_j| (i < j) of amplitude
/// h1 * A^exponent * c_i * c_j. Phenomenological; no contact mechanics.
struct HertzianMixSpec {
  double e0 = 1.0;
  double h1 = 0.0;
  double amplitude = 1.0;
  double exponent = 1.5;
  std::vector<Tone> tones;
  double duration = 0.0;
  double sample_rate = 0.0;

  void validate() const;
};

Waveform hertzian_mix_waveform(const HertzianMixSpec& spec);

struct Mode {
  double freq = 0.0;  // Hz
  double q = 1.0;     // quality factor
  double gain = 1.0;
};

struct ModalPlateSpec {
  std::vector<Mode> modes;
  double noise_rms = 0.0;  // volts
  std::uint64_t seed = 0;

  void validate(double sample_rate) const;
};

enum class NonlinearityKind { kQuadratic, kHertzian };

/// Memoryless distortion applied to the modal response:
///   quadratic  y -> y - strength * y^2
///   hertzian   y -> y - strength * |y|^exponent
struct Nonlinearity {
  NonlinearityKind kind = NonlinearityKind::kQuadratic;
  double strength = 0.0;
  double exponent = 1.5;
};

/// Impulse response sum_k g_k exp(-pi f_k t / Q_k) sin(2 pi f_k t), n samples.
std::vector<double> modal_impulse_response(const ModalPlateSpec& spec,
                                           double sample_rate, std::size_t n);

/// Excitation convolved with the modal impulse response (output truncated to
/// the excitation length), optionally distorted, plus seeded white noise.
/// `realization` selects an independent noise draw for the same seed.
Waveform modal_plate_response(const Waveform& excitation,
                              const ModalPlateSpec& spec,
                              const std::optional<Nonlinearity>& nonlinearity =
                                  std::nullopt,
                              std::uint64_t realization = 0);

/// `w` plus Gaussian white noise of standard deviation `rms`.
Waveform add_noise(const Waveform& w, double rms, std::uint64_t seed,
                   std::uint64_t realization = 0);

/// `n_modes` modes with frequencies uniform in [f_lo, f_hi], Q uniform in
/// [q_lo, q_hi] and gains uniform in [0.2, 1], all drawn from `seed`.
ModalPlateSpec random_modal_plate(std::uint64_t seed, std::size_t n_modes,
                                  double f_lo, double f_hi, double q_lo,
                                  double q_hi);

/// Mean of realizations 0 .. n_avg-1 of `generator`, sample by sample, as an
/// averaging digitizer would produce.
Waveform average_realizations(
    const std::function<Waveform(std::uint64_t)>& generator,
    std::size_t n_avg);

/// Root-mean-square of the samples.
double rms(const Waveform& w);

}  // namespace spci::synth
