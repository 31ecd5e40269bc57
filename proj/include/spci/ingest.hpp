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

#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spci/waveform.hpp"

namespace spci::ingest {

enum class Endianness { kLittle, kBig };
enum class SampleType { kI16, kF32, kF64 };

/// Raw sample file description. Samples are decoded as stored * scale volts.
struct BinaryLayout {
  Endianness endianness = Endianness::kLittle;
  SampleType dtype = SampleType::kF64;
  std::size_t header_bytes = 0;
  double scale = 1.0;                     // volts per stored unit
  std::optional<std::size_t> n_samples;   // declared length, if known

  /// "i16le", "f32be", "f64le", ... ; throws kUnknownLayout otherwise.
  static BinaryLayout parse(std::string_view name);
  std::string name() const;
  std::size_t sample_width() const;
};

Waveform read_binary_waveform(const std::filesystem::path& path,
                              const BinaryLayout& layout, double sample_rate);
void write_binary_waveform(const std::filesystem::path& path,
                           const Waveform& w, const BinaryLayout& layout);

/// One or two numeric columns (time, voltage) separated by commas or
/// whitespace, with an optional non-numeric header line. A time column
/// defines the sample rate and must be uniform to 1e-3 of the sample
/// interval; voltage-only files need `sample_rate_hint`.
Waveform read_csv_waveform(const std::filesystem::path& path,
                           std::optional<double> sample_rate_hint);
void write_csv_waveform(const std::filesystem::path& path, const Waveform& w,
                        bool with_time = true);

/// Excitation percent to receiver gain in dB as used during acquisition.
std::optional<int> paired_gain_db(int excitation_pct);

struct MeasurementMeta {
  std::string plate_id;    // e.g. "10J"
  int tx_disc = 0;         // 1..5
  int rx_disc = 0;         // 1..5
  std::string tx_channel;  // electronics channel labels, e.g. "Ch2"
  std::string rx_channel;
  int excitation_pct = 0;
  int gain_db = 0;
  int n_avg = 1;
  int repetition = 0;  // repositioning index
  std::string series;  // free label for repetition groups, e.g. "v1"

  void validate(bool enforce_pairing) const;
};

/// Uniqueness key of a record within a manifest.
struct RecordKey {
  std::string plate_id;
  int tx_disc = 0;
  int rx_disc = 0;
  int excitation_pct = 0;
  int repetition = 0;

  std::string to_string() const;
  std::strong_ordering operator<=>(const RecordKey& o) const;
  bool operator==(const RecordKey&) const = default;
};

RecordKey key_of(const MeasurementMeta& m);

/// "10J" < "15J" < "100J": numeric prefixes compare by value, then text.
std::strong_ordering compare_labels(std::string_view a, std::string_view b);

struct CsvFormat {
  std::optional<double> sample_rate_hint;
};

using FileFormat = std::variant<BinaryLayout, CsvFormat>;

struct FileRef {
  std::filesystem::path path;
  FileFormat format;
};

/// A measurement plus its samples, either resident or loaded on demand.
struct StudyRecord {
  MeasurementMeta meta;
  std::variant<FileRef, Waveform> source;
  double sample_rate = 0.0;               // declared by the manifest
  std::optional<std::size_t> n_samples;   // declared by the manifest

  /// Resolves the samples and checks them against the declarations.
  Waveform load() const;
};

struct DatasetManifest {
  std::vector<StudyRecord> records;  // sorted by RecordKey
  double sample_rate = 0.0;
  std::optional<std::size_t> n_samples;
  bool enforce_pairing = false;

  /// Sorts records, checks key uniqueness and metadata invariants.
  void validate();
  std::vector<std::string> plate_ids() const;  // natural order
};

struct LoadOptions {
  std::optional<bool> enforce_pairing;  // overrides the manifest's flag
};

/// Parses a JSON manifest (schema documented in docs/manifest.md). Relative
/// file paths resolve against the manifest's directory.
DatasetManifest load_manifest(const std::filesystem::path& path,
                              const LoadOptions& opts = {});

/// Writes `m` as a manifest; file references are stored relative to the
/// manifest directory when possible. Resident waveforms are not allowed.
void write_manifest(const std::filesystem::path& path,
                    const DatasetManifest& m);

}  // namespace spci::ingest
