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

// Regenerates the frozen fixture in tests/data:
//   surrogate_10J_t2r3.i16(.json)     synthetic 10J 2->3 record, int16
//   surrogate_10J_t2r3.spectrum.csv   normalized band spectrum, %.17g
//   surrogate_10J_t2r3.curve.csv      threshold,count on the fine grid
// Aborts when the library and the brute-force oracle disagree.
//
// usage: spci_make_golden <tests/data>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "oracle.hpp"
#include "spci/ingest.hpp"
#include "spci/spc_index.hpp"
#include "spci/synth_dataset.hpp"

namespace fs = std::filesystem;

namespace {

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: spci_make_golden <dir>\n";
    return 2;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir);

  spci::synth::SyntheticDatasetSpec spec;
  spec.plates = {"10J"};
  spec.pairs = {{2, 3}};
  const spci::Waveform clean = spci::synth::make_synthetic_dataset(spec).records.at(0).load();

  double peak = 0.0;
  for (double x : clean.samples()) peak = std::max(peak, std::abs(x));
  const double scale = peak / 30000.0;
  spci::ingest::BinaryLayout layout = spci::ingest::BinaryLayout::parse("i16le");
  layout.scale = scale;
  const fs::path rec = dir / "surrogate_10J_t2r3.i16";
  spci::ingest::write_binary_waveform(rec, clean, layout);
  {
    std::ofstream f(dir / "surrogate_10J_t2r3.i16.json", std::ios::binary);
    f << "{\n  \"layout\": \"i16le\",\n  \"sample_rate\": " << full(clean.sample_rate())
      << ",\n  \"scale\": " << full(scale) << "\n}\n";
  }
  const spci::Waveform w = spci::ingest::read_binary_waveform(rec, layout, clean.sample_rate());

  spci::SpcParams p;
  p.band = {10e3, 700e3};
  p.grid = {0.001, 0.01, 1.0};
  const spci::NormalizedSpectrum s = spci::normalized_spectrum(w, p);
  const spci::SpcIndex idx = spci::spc_index(w, p);

  const std::vector<double> x(w.samples().begin(), w.samples().end());
  const spci::oracle::OracleResult o = spci::oracle::spc(x, w.sample_rate(), p);
  if (o.curve != idx.curve) {
    std::cerr << "curve disagrees with oracle\n";
    return 1;
  }
  double worst = 0.0;
  for (std::size_t k = o.first; k <= o.last; ++k) {
    worst = std::max(worst, std::abs(o.normalized[k] - s.magnitudes[k]));
  }
  if (worst > 1e-12) {
    std::cerr << "spectrum disagrees with oracle by " << worst << '\n';
    return 1;
  }

  {
    std::ofstream f(dir / "surrogate_10J_t2r3.spectrum.csv", std::ios::binary);
    f << "freq_hz,magnitude\n";
    for (std::size_t k = o.first; k <= o.last; ++k) {
      f << full(s.frequency(k)) << ',' << full(s.magnitudes[k]) << '\n';
    }
  }
  {
    std::ofstream f(dir / "surrogate_10J_t2r3.curve.csv", std::ios::binary);
    f << "threshold,count\n";
    for (std::size_t i = 0; i < idx.curve.counts.size(); ++i) {
      f << full(idx.curve.thresholds[i]) << ',' << idx.curve.counts[i] << '\n';
    }
  }
  std::cout << "spc_index " << full(idx.value) << ", oracle max deviation " << worst << '\n';
  return 0;
}
