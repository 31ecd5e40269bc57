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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "spci/error.hpp"
#include "spci/spc_index.hpp"
#include "spci/spectrum.hpp"
#include "spci/synth.hpp"

namespace spci::synth {
namespace {

constexpr double kRate = 12.5e6;
constexpr std::size_t kN = 10000;  // bin step 1250 Hz, so 50 and 300 kHz are exact bins

std::size_t bin_of(double f) { return static_cast<std::size_t>(std::llround(f / (kRate / kN))); }

QuadraticMixSpec qmix(double e1, double a) {
  QuadraticMixSpec s;
  s.e0 = 1.0;
  s.e1 = e1;
  s.amplitude = a;
  s.tones = {{1.0, 50e3}, {1.0, 300e3}};
  s.sample_rate = kRate;
  s.duration = kN / kRate;
  return s;
}

HertzianMixSpec hmix(double h1, double a) {
  HertzianMixSpec s;
  s.e0 = 1.0;
  s.h1 = h1;
  s.amplitude = a;
  s.tones = {{1.0, 50e3}, {1.0, 300e3}};
  s.sample_rate = kRate;
  s.duration = kN / kRate;
  return s;
}

TEST(Rc1, EndpointsMidpointAndSupport) {
  Rc1Pulse p;
  p.u0 = 2.5;
  p.fc = 500e3;
  const Waveform w = rc1_waveform(p, 25e6, 1e-4);  // 50 samples per cycle
  EXPECT_EQ(w[0], 0.0);
  EXPECT_NEAR(w[50], 0.0, 1e-15);
  EXPECT_NEAR(w[25], 2.5, 1e-12);
  for (std::size_t i = 51; i < w.size(); ++i) ASSERT_EQ(w[i], 0.0);

  const Waveform s = rc1_waveform(Rc1Pulse{}, kRate, 804e-6);
  std::size_t support = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != 0.0) support = i + 1;
  }
  EXPECT_LE(support, 25u);
  for (std::size_t i = 1; i < 25; ++i) EXPECT_NE(s[i], 0.0) << i;
}

TEST(Rc1, RecordLengthConventions) {
  EXPECT_EQ(rc1_waveform(Rc1Pulse{}, kRate, 804e-6).size(), 10050u);
  EXPECT_EQ(rc1_waveform(Rc1Pulse{}, kRate, 803.84e-6).size(), 10048u);
}

TEST(Rc1, FlatSpectrumUpTo500k) {
  const Waveform w = rc1_waveform(Rc1Pulse{}, kRate, kN / kRate);
  const Spectrum s = magnitude_spectrum(w);
  const double at50 = s.magnitudes[bin_of(50e3)];
  const double at250 = s.magnitudes[bin_of(250e3)];
  EXPECT_LE(std::abs(20.0 * std::log10(at250 / at50)), 6.0);
}

TEST(Rc1, DurationTooShort) {
  Rc1Pulse p;
  p.delay = 1e-6;
  try {
    rc1_waveform(p, kRate, 2.5e-6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDurationTooShort);
  }
}

TEST(QuadraticMix, LinearLimitHasOnlyPrimaries) {
  const Spectrum s = magnitude_spectrum(quadratic_mix_waveform(qmix(0.0, 1.0)));
  const std::size_t k1 = bin_of(50e3);
  const std::size_t k2 = bin_of(300e3);
  EXPECT_NEAR(s.magnitudes[k1], kN / 2.0, 1e-9 * kN);
  EXPECT_NEAR(s.magnitudes[k2], kN / 2.0, 1e-9 * kN);
  for (std::size_t k = 0; k < s.magnitudes.size(); ++k) {
    if (k != k1 && k != k2) ASSERT_LE(s.magnitudes[k], 1e-9 * kN) << k;
  }
}

// sigma = E0 A S - E1 A^2 S^2 with S = sin a + sin b expands into
// E1 A^2 [ -1 + cos(2a)/2 + cos(2b)/2 - cos(a-b) + cos(a+b) ]; a cosine of
// amplitude B on an exact bin has DFT modulus B N / 2, and DC has B N.
TEST(QuadraticMix, MixingLinesMatchExpansion) {
  const double e1 = 0.3;
  const double a = 1.7;
  const Spectrum s = magnitude_spectrum(quadratic_mix_waveform(qmix(e1, a)));
  const double q = e1 * a * a;
  const struct {
    double f;
    double amp;
  } lines[] = {{100e3, q / 2}, {600e3, q / 2}, {350e3, q}, {250e3, q}};
  for (const auto& l : lines) {
    EXPECT_NEAR(s.magnitudes[bin_of(l.f)], l.amp * kN / 2, 1e-9 * kN) << l.f;
  }
  EXPECT_NEAR(s.magnitudes[0], q * kN, 1e-9 * kN);
  EXPECT_NEAR(s.magnitudes[bin_of(50e3)], a * kN / 2, 1e-9 * kN);
  const std::size_t expected[] = {0,
                                  bin_of(50e3),
                                  bin_of(300e3),
                                  bin_of(100e3),
                                  bin_of(600e3),
                                  bin_of(350e3),
                                  bin_of(250e3)};
  for (std::size_t k = 0; k < s.magnitudes.size(); ++k) {
    if (std::find(std::begin(expected), std::end(expected), k) == std::end(expected)) {
      ASSERT_LE(s.magnitudes[k], 1e-9 * kN) << k;
    }
  }
}

double normalized_line(const Waveform& w, double f) {
  const NormalizedSpectrum s = normalize(magnitude_spectrum(w), {10e3, 700e3});
  return s.magnitudes[bin_of(f)];
}

TEST(QuadraticMix, SumLineGrowsLinearlyInAmplitude) {
  const double r = normalized_line(quadratic_mix_waveform(qmix(0.01, 2.0)), 350e3) /
                   normalized_line(quadratic_mix_waveform(qmix(0.01, 1.0)), 350e3);
  EXPECT_NEAR(r, 2.0, 2e-6);
}

TEST(HertzianMix, LinearLimitIsTwoTone) {
  const Waveform h = hertzian_mix_waveform(hmix(0.0, 1.0));
  const Waveform q = quadratic_mix_waveform(qmix(0.0, 1.0));
  for (std::size_t i = 0; i < h.size(); ++i) ASSERT_NEAR(h[i], q[i], 1e-12);
}

TEST(HertzianMix, SidebandsAtSumAndDifference) {
  const Spectrum s = magnitude_spectrum(hertzian_mix_waveform(hmix(0.01, 1.0)));
  EXPECT_NEAR(s.magnitudes[bin_of(350e3)], 0.01 * kN / 2, 1e-9 * kN);
  EXPECT_NEAR(s.magnitudes[bin_of(250e3)], 0.01 * kN / 2, 1e-9 * kN);
}

TEST(HertzianMix, ThreeHalvesScaling) {
  const double r = normalized_line(hertzian_mix_waveform(hmix(0.01, 4.0)), 350e3) /
                   normalized_line(hertzian_mix_waveform(hmix(0.01, 1.0)), 350e3);
  EXPECT_NEAR(r, 2.0, 2e-6);
}

ModalPlateSpec single_mode() {
  ModalPlateSpec s;
  s.modes = {{200e3, 50.0, 1.0}};
  return s;
}

Waveform burst(double u0 = 1.0) {
  Rc1Pulse p;
  p.u0 = u0;
  return rc1_waveform(p, kRate, 10048 / kRate);
}

TEST(Modal, ZeroInputZeroOutput) {
  const Waveform zero(std::vector<double>(4096, 0.0), kRate);
  ModalPlateSpec spec = random_modal_plate(3, 40, 10e3, 700e3, 20, 300);
  const Waveform y = modal_plate_response(zero, spec);
  for (double v : y.samples()) ASSERT_EQ(v, 0.0);

  spec.noise_rms = 0.01;
  spec.seed = 42;
  EXPECT_EQ(modal_plate_response(zero, spec, std::nullopt, 5), add_noise(zero, 0.01, 42, 5));
}

TEST(Modal, SingleModeGivesOnePeak) {
  const Waveform y = modal_plate_response(burst(), single_mode());
  SpcParams p;
  p.band = {10e3, 700e3};
  p.grid = {0.01, 0.01, 0.99};
  const SpcIndex r = spc_index(y, p);
  EXPECT_EQ(r.value, 1.0);
}

TEST(Modal, LinearPlateAmplitudeLadderInvariant) {
  const ModalPlateSpec spec = random_modal_plate(11, 40, 10e3, 700e3, 20, 300);
  SpcParams p;
  p.band = {10e3, 700e3};
  p.grid = {0.001, 0.01, 1.0};
  const SpcIndex ref = spc_index(modal_plate_response(burst(1.0), spec), p);
  for (double a : {0.05, 0.1, 0.2, 0.4, 0.8}) {
    const SpcIndex r = spc_index(modal_plate_response(burst(a), spec), p);
    EXPECT_EQ(r.curve, ref.curve) << a;
  }
}

TEST(Modal, EnergyScalesQuadratically) {
  const ModalPlateSpec spec = random_modal_plate(12, 40, 10e3, 700e3, 20, 300);
  const double e1 = energy(modal_plate_response(burst(1.0), spec));
  for (double a : {0.05, 0.4, 3.0}) {
    const double ea = energy(modal_plate_response(burst(a), spec));
    EXPECT_NEAR(ea / e1, a * a, 1e-12 * a * a);
  }
}

TEST(Modal, DeterministicAndSeedSensitive) {
  ModalPlateSpec spec = random_modal_plate(7, 40, 10e3, 700e3, 20, 300);
  EXPECT_EQ(spec.modes.size(), 40u);
  spec.noise_rms = 1e-3;
  const Nonlinearity nl{NonlinearityKind::kHertzian, 0.1, 1.5};
  const Waveform a = modal_plate_response(burst(), spec, nl, 3);
  const Waveform b = modal_plate_response(burst(), spec, nl, 3);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, modal_plate_response(burst(), spec, nl, 4));
  EXPECT_EQ(random_modal_plate(7, 40, 10e3, 700e3, 20, 300).modes.front().freq,
            spec.modes.front().freq);
  for (const Mode& m : spec.modes) {
    EXPECT_GE(m.freq, 10e3);
    EXPECT_LE(m.freq, 700e3);
    EXPECT_GE(m.q, 20.0);
    EXPECT_LE(m.q, 300.0);
  }
}

TEST(Modal, QuadraticNonlinearityAddsHarmonic) {
  ModalPlateSpec spec;
  spec.modes = {{100e3, 400.0, 1.0}};
  const Waveform lin = modal_plate_response(burst(), spec);
  const Waveform nl =
      modal_plate_response(burst(), spec, Nonlinearity{NonlinearityKind::kQuadratic, 0.5, 1.5});
  const Spectrum sl = magnitude_spectrum(lin);
  const Spectrum sn = magnitude_spectrum(nl);
  const std::size_t k2 = static_cast<std::size_t>(std::llround(200e3 / sl.freq_step));
  EXPECT_GT(sn.magnitudes[k2], 10.0 * sl.magnitudes[k2]);
}

TEST(Noise, RmsAndIndependence) {
  const Waveform zero(std::vector<double>(200000, 0.0), kRate);
  const Waveform a = add_noise(zero, 0.5, 1, 0);
  EXPECT_NEAR(rms(a), 0.5, 0.005);
  const Waveform b = add_noise(zero, 0.5, 1, 1);
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  EXPECT_LT(std::abs(dot / a.size()), 0.25 * 0.02);
}

TEST(Noise, AveragingReducesRmsBySqrtN) {
  const Waveform zero(std::vector<double>(10048, 0.0), kRate);
  for (std::size_t n : {1u, 2u, 4u, 8u, 16u, 32u, 64u, 128u, 256u}) {
    const Waveform avg =
        average_realizations([&](std::uint64_t r) { return add_noise(zero, 1.0, 9, r); }, n);
    EXPECT_NEAR(rms(avg) * std::sqrt(static_cast<double>(n)), 1.0, 0.05) << n;
  }
}

TEST(Validation, BadSpecs) {
  ModalPlateSpec s;
  EXPECT_THROW(s.validate(kRate), Error);
  s.modes = {{7e6, 10, 1}};
  EXPECT_THROW(s.validate(kRate), Error);
  EXPECT_THROW(random_modal_plate(1, 0, 1, 2, 1, 2), Error);
  QuadraticMixSpec q = qmix(0.0, 1.0);
  q.tones.clear();
  EXPECT_THROW(quadratic_mix_waveform(q), Error);
}

}  // namespace
}  // namespace spci::synth
