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

#include "spci/synth_dataset.hpp"

#include <algorithm>
#include <cmath>

#include "spci/error.hpp"
#include "spci/noise.hpp"
#include "spci/parallel.hpp"

namespace spci::synth {
namespace fs = std::filesystem;

std::vector<std::pair<int, int>> default_pairs() {
  return {{1, 2}, {2, 1}, {1, 3}, {3, 1}, {2, 3}, {3, 2},
          {2, 5}, {5, 2}, {3, 5}, {5, 3}, {1, 4}, {4, 1}};
}

std::vector<std::string> default_plates() {
  return {"10J", "15J", "20J", "25J", "30J", "40J", "50J"};
}

void SyntheticDatasetSpec::validate() const {
  require(!plates.empty(), "no plates");
  require(!pairs.empty(), "no disc pairs");
  require(!excitation_pcts.empty(), "no excitation levels");
  require(repetitions >= 1, "repetitions must be >= 1");
  require(sample_rate > 0.0 && n_samples > 0, "invalid record shape");
  require(noise_rms >= 0.0, "noise rms must be >= 0");
  for (const auto& [tx, rx] : pairs) {
    require(tx >= 1 && tx <= 5 && rx >= 1 && rx <= 5 && tx != rx,
            "disc pairs must be distinct discs in 1..5");
  }
  for (int pct : excitation_pcts) {
    require(pct > 0 && pct <= 100, "excitation percent must be in (0, 100]");
  }
}

ModalPlateSpec path_model(const SyntheticDatasetSpec& spec,
                          std::size_t plate_index, int tx, int rx) {
  int a = tx;
  int b = rx;
  if (spec.reciprocal && a > b) std::swap(a, b);
  const std::uint64_t key =
      splitmix64(spec.seed ^ splitmix64((plate_index << 8) | (a << 4) | b));
  return random_modal_plate(key, spec.n_modes, spec.f_lo, spec.f_hi,
                            spec.q_lo, spec.q_hi);
}

namespace {

struct Cell {
  std::size_t plate;
  int tx;
  int rx;
  int pct;
  int rep;
};

Waveform record_waveform(const SyntheticDatasetSpec& spec, const Cell& c) {
  const double duration =
      static_cast<double>(spec.n_samples) / spec.sample_rate;
  Rc1Pulse pulse;
  pulse.fc = spec.fc;
  pulse.u0 = spec.volts_full * c.pct / 100.0;
  const Waveform exc = rc1_waveform(pulse, spec.sample_rate, duration);

  ModalPlateSpec model = path_model(spec, c.plate, c.tx, c.rx);
  std::optional<Nonlinearity> nl;
  if (spec.nonlinearity && spec.strength != 0.0) {
    nl = Nonlinearity{*spec.nonlinearity,
                      spec.strength * static_cast<double>(c.plate + 1) /
                          static_cast<double>(spec.plates.size()),
                      1.5};
  }
  Waveform y = modal_plate_response(exc, model, nl);
  std::vector<double> v(y.samples().begin(), y.samples().end());
  v.resize(spec.n_samples, 0.0);
  if (spec.apply_gain) {
    const double g = std::pow(10.0, ingest::paired_gain_db(c.pct).value_or(22) / 20.0);
    for (double& x : v) x *= g;
  }
  if (spec.noise_rms > 0.0) {
    const std::uint64_t noise_seed = splitmix64(
        spec.seed ^ splitmix64(0x6e6f697365ULL + (c.plate << 24) +
                               (static_cast<std::uint64_t>(c.tx) << 20) +
                               (static_cast<std::uint64_t>(c.rx) << 16) +
                               (static_cast<std::uint64_t>(c.pct) << 8) +
                               static_cast<std::uint64_t>(c.rep)));
    const CounterRng rng(noise_seed, 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] += spec.noise_rms * rng.gaussian(i);
    }
  }
  for (double& x : v) x += spec.dc_offset;
  return Waveform(std::move(v), spec.sample_rate);
}

std::vector<Cell> cells_of(const SyntheticDatasetSpec& spec) {
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < spec.plates.size(); ++p) {
    const auto lost_it = spec.lost_discs.find(spec.plates[p]);
    for (const auto& [tx, rx] : spec.pairs) {
      if (lost_it != spec.lost_discs.end()) {
        const auto& lost = lost_it->second;
        if (std::find(lost.begin(), lost.end(), tx) != lost.end() ||
            std::find(lost.begin(), lost.end(), rx) != lost.end()) {
          continue;
        }
      }
      for (int pct : spec.excitation_pcts) {
        for (int rep = 0; rep < spec.repetitions; ++rep) {
          cells.push_back({p, tx, rx, pct, rep});
        }
      }
    }
  }
  return cells;
}

ingest::MeasurementMeta meta_of(const SyntheticDatasetSpec& spec, const Cell& c) {
  ingest::MeasurementMeta m;
  m.plate_id = spec.plates[c.plate];
  m.tx_disc = c.tx;
  m.rx_disc = c.rx;
  m.tx_channel = "Ch" + std::to_string(c.tx);
  m.rx_channel = "Ch" + std::to_string(c.rx);
  m.excitation_pct = c.pct;
  m.gain_db = ingest::paired_gain_db(c.pct).value_or(22);
  m.n_avg = 1;
  m.repetition = c.rep;
  m.series = spec.series;
  return m;
}

}  // namespace

ingest::DatasetManifest make_synthetic_dataset(const SyntheticDatasetSpec& spec) {
  spec.validate();
  const std::vector<Cell> cells = cells_of(spec);
  std::vector<std::optional<Waveform>> waves(cells.size());
  parallel_for(cells.size(), 0, [&](std::size_t i) {
    waves[i] = record_waveform(spec, cells[i]);
  });
  ingest::DatasetManifest m;
  m.sample_rate = spec.sample_rate;
  m.n_samples = spec.n_samples;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    ingest::StudyRecord r;
    r.meta = meta_of(spec, cells[i]);
    r.source = std::move(*waves[i]);
    r.sample_rate = spec.sample_rate;
    r.n_samples = spec.n_samples;
    m.records.push_back(std::move(r));
  }
  m.validate();
  return m;
}

fs::path write_synthetic_dataset(const SyntheticDatasetSpec& spec,
                                 const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIoError, "cannot create " + dir.string());
  ingest::DatasetManifest m = make_synthetic_dataset(spec);
  const ingest::BinaryLayout layout = ingest::BinaryLayout::parse("f64le");
  for (ingest::StudyRecord& r : m.records) {
    const auto& meta = r.meta;
    std::string name = meta.plate_id + "_t" + std::to_string(meta.tx_disc) +
                       "r" + std::to_string(meta.rx_disc) + "_a" +
                       std::to_string(meta.excitation_pct) + "_n" +
                       std::to_string(meta.repetition);
    if (!meta.series.empty()) name += "_" + meta.series;
    const fs::path file = dir / (name + ".f64");
    ingest::write_binary_waveform(file, std::get<Waveform>(r.source), layout);
    r.source = ingest::FileRef{file, layout};
  }
  const fs::path manifest = dir / "manifest.json";
  ingest::write_manifest(manifest, m);
  return manifest;
}

}  // namespace spci::synth
