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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spci/ingest.hpp"
#include "spci/synth.hpp"

namespace spci::synth {

/// The twelve transmitter->receiver pairs of the desk-scale sweep.
std::vector<std::pair<int, int>> default_pairs();

/// Seven plate labels, 10J to 50J.
std::vector<std::string> default_plates();

/// Dataset-shaped collection of modal-plate records. Every (plate, unordered
/// disc pair) gets its own random modal model, so both propagation
/// directions share a path unless `reciprocal` is false.
struct SyntheticDatasetSpec {
  std::vector<std::string> plates = default_plates();
  std::vector<std::pair<int, int>> pairs = default_pairs();
  std::vector<int> excitation_pcts = {20};
  int repetitions = 1;
  std::string series;
  std::map<std::string, std::vector<int>> lost_discs;  // plate -> discs

  double sample_rate = 12.5e6;
  std::size_t n_samples = 10048;
  double fc = 500e3;        // excitation burst centre frequency
  double volts_full = 10.0; // burst amplitude at 100 %
  bool apply_gain = true;   // multiply by the paired receiver gain

  std::size_t n_modes = 40;
  double f_lo = 15e3;
  double f_hi = 800e3;
  double q_lo = 20.0;
  double q_hi = 300.0;

  double noise_rms = 0.0;   // added after gain, volts
  double dc_offset = 0.0;   // constant added to every record
  std::optional<NonlinearityKind> nonlinearity;
  double strength = 0.0;    // scaled by plate position (i + 1) / n_plates
  bool reciprocal = true;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Modal model of one record path.
ModalPlateSpec path_model(const SyntheticDatasetSpec& spec,
                          std::size_t plate_index, int tx, int rx);

/// Manifest with resident waveforms, validated and sorted.
ingest::DatasetManifest make_synthetic_dataset(const SyntheticDatasetSpec& spec);

/// Writes one f64le file per record plus `manifest.json` into `dir` and
/// returns the manifest path.
std::filesystem::path write_synthetic_dataset(const SyntheticDatasetSpec& spec,
                                              const std::filesystem::path& dir);

}  // namespace spci::synth
