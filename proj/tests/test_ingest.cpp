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
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <vector>

#include <json.hpp>

#include "spci/error.hpp"
#include "spci/ingest.hpp"
#include "spci/synth.hpp"
#include "spci/synth_dataset.hpp"
#include "temp_dir.hpp"

namespace spci::ingest {
namespace {

using spci::testing::TempDir;
namespace fs = std::filesystem;

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no spci::Error thrown";
  return ErrorKind::kInvalidArgument;
}

void write_bytes(const fs::path& p, const std::vector<unsigned char>& b) {
  std::ofstream f(p, std::ios::binary);
  f.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  f << s;
}

Waveform random_wave(std::size_t n, unsigned seed, double rate = 12.5e6) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> d(0.0, 0.3);
  std::vector<double> v(n);
  for (double& x : v) x = d(g);
  return Waveform(v, rate);
}

TEST(BinaryLayout, Parse) {
  const BinaryLayout a = BinaryLayout::parse("i16le");
  EXPECT_EQ(a.dtype, SampleType::kI16);
  EXPECT_EQ(a.endianness, Endianness::kLittle);
  EXPECT_EQ(a.sample_width(), 2u);
  EXPECT_EQ(BinaryLayout::parse("f32be").name(), "f32be");
  EXPECT_EQ(BinaryLayout::parse("f64le").sample_width(), 8u);
  EXPECT_EQ(kind_of([] { BinaryLayout::parse("i24le"); }), ErrorKind::kUnknownLayout);
  EXPECT_EQ(kind_of([] { BinaryLayout::parse("f32xx"); }), ErrorKind::kUnknownLayout);
  EXPECT_EQ(kind_of([] { BinaryLayout::parse(""); }), ErrorKind::kUnknownLayout);
}

TEST(ReadBinary, Int16LittleEndianWithScale) {
  TempDir dir;
  std::vector<unsigned char> bytes;
  std::vector<std::int16_t> raw(10048);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = static_cast<std::int16_t>(static_cast<int>(i % 2000) - 1000);
    const auto u = static_cast<std::uint16_t>(raw[i]);
    bytes.push_back(static_cast<unsigned char>(u & 0xff));
    bytes.push_back(static_cast<unsigned char>(u >> 8));
  }
  write_bytes(dir / "r.bin", bytes);
  BinaryLayout l = BinaryLayout::parse("i16le");
  l.scale = 0.5 / 32768.0;
  const Waveform w = read_binary_waveform(dir / "r.bin", l, 12.5e6);
  ASSERT_EQ(w.size(), 10048u);
  for (std::size_t i = 0; i < raw.size(); ++i) ASSERT_EQ(w[i], raw[i] * l.scale);
}

TEST(ReadBinary, BigEndianFloatAndHeader) {
  TempDir dir;
  std::vector<unsigned char> bytes = {0xde, 0xad, 0xbe};  // header
  for (float f : {1.5f, -2.25f}) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    for (int s = 24; s >= 0; s -= 8) bytes.push_back(static_cast<unsigned char>(u >> s));
  }
  write_bytes(dir / "r.bin", bytes);
  BinaryLayout l = BinaryLayout::parse("f32be");
  l.header_bytes = 3;
  const Waveform w = read_binary_waveform(dir / "r.bin", l, 1.0);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w[0], 1.5);
  EXPECT_EQ(w[1], -2.25);
}

TEST(ReadBinary, Errors) {
  TempDir dir;
  write_bytes(dir / "short.bin", std::vector<unsigned char>(100, 0));
  BinaryLayout l = BinaryLayout::parse("i16le");
  l.n_samples = 10048;
  EXPECT_EQ(kind_of([&] { read_binary_waveform(dir / "short.bin", l, 1.0); }),
            ErrorKind::kTruncatedFile);
  BinaryLayout h = BinaryLayout::parse("i16le");
  h.header_bytes = 200;
  EXPECT_EQ(kind_of([&] { read_binary_waveform(dir / "short.bin", h, 1.0); }),
            ErrorKind::kTruncatedFile);
  write_bytes(dir / "odd.bin", std::vector<unsigned char>(7, 0));
  EXPECT_EQ(kind_of([&] { read_binary_waveform(dir / "odd.bin", BinaryLayout::parse("i16le"), 1.0); }),
            ErrorKind::kTruncatedFile);
  write_bytes(dir / "empty.bin", {});
  EXPECT_EQ(
      kind_of([&] { read_binary_waveform(dir / "empty.bin", BinaryLayout::parse("f64le"), 1.0); }),
      ErrorKind::kEmptyFile);
  EXPECT_EQ(kind_of([&] { read_binary_waveform(dir / "nope.bin", BinaryLayout::parse("f64le"), 1.0); }),
            ErrorKind::kMissingFile);
}

TEST(RoundTrip, FloatFormatsExact) {
  TempDir dir;
  const Waveform w = synth::modal_plate_response(
      synth::rc1_waveform({}, 12.5e6, 10048 / 12.5e6),
      synth::random_modal_plate(2, 40, 10e3, 700e3, 20, 300));
  for (const char* name : {"f64le", "f64be"}) {
    const BinaryLayout l = BinaryLayout::parse(name);
    write_binary_waveform(dir / "w.bin", w, l);
    EXPECT_EQ(read_binary_waveform(dir / "w.bin", l, 12.5e6), w) << name;
  }
  std::vector<double> fv;
  for (double x : w.samples()) fv.push_back(static_cast<float>(x));
  const Waveform wf(fv, 12.5e6);
  for (const char* name : {"f32le", "f32be"}) {
    const BinaryLayout l = BinaryLayout::parse(name);
    write_binary_waveform(dir / "w.bin", wf, l);
    EXPECT_EQ(read_binary_waveform(dir / "w.bin", l, 12.5e6), wf) << name;
  }
}

TEST(RoundTrip, Int16WithinOneStep) {
  TempDir dir;
  const Waveform w = random_wave(5000, 4);
  for (const char* name : {"i16le", "i16be"}) {
    BinaryLayout l = BinaryLayout::parse(name);
    l.scale = 2.0 / 32767.0;
    write_binary_waveform(dir / "w.bin", w, l);
    const Waveform r = read_binary_waveform(dir / "w.bin", l, 12.5e6);
    ASSERT_EQ(r.size(), w.size());
    for (std::size_t i = 0; i < w.size(); ++i) ASSERT_LE(std::abs(r[i] - w[i]), l.scale);
  }
}

TEST(RoundTrip, CsvExact) {
  TempDir dir;
  const Waveform w = random_wave(3000, 5);
  write_csv_waveform(dir / "w.csv", w);
  const Waveform r = read_csv_waveform(dir / "w.csv", std::nullopt);
  ASSERT_EQ(r.size(), w.size());
  for (std::size_t i = 0; i < w.size(); ++i) ASSERT_EQ(r[i], w[i]);
  EXPECT_NEAR(r.sample_rate(), 12.5e6, 1e-6 * 12.5e6);
}

TEST(ReadCsv, TwoColumnsDefineRate) {
  TempDir dir;
  std::string s = "time_s,voltage_v\n";
  char buf[64];
  for (int n = 0; n < 1000; ++n) {
    std::snprintf(buf, sizeof buf, "%.10e,%.6f\n", n / 12.5e6, 0.001 * n);
    s += buf;
  }
  write_text(dir / "a.csv", s);
  const Waveform w = read_csv_waveform(dir / "a.csv", std::nullopt);
  EXPECT_NEAR(w.sample_rate(), 12.5e6, 1.0);
  EXPECT_EQ(w.size(), 1000u);
  EXPECT_DOUBLE_EQ(w[10], 0.01);
}

TEST(ReadCsv, VoltageOnlyUsesHint) {
  TempDir dir;
  write_text(dir / "v.csv", "# comment\nvolts\n0.5\n-0.25\n1\n");
  const Waveform w = read_csv_waveform(dir / "v.csv", 12.5e6);
  EXPECT_EQ(w.sample_rate(), 12.5e6);
  EXPECT_EQ(w.size(), 3u);
  EXPECT_EQ(w[1], -0.25);
  EXPECT_EQ(kind_of([&] { read_csv_waveform(dir / "v.csv", std::nullopt); }),
            ErrorKind::kParseError);
}

TEST(ReadCsv, WhitespaceAndSemicolon) {
  TempDir dir;
  write_text(dir / "w.csv", "0 1\n1e-6 2\n2e-6 3\n");
  EXPECT_NEAR(read_csv_waveform(dir / "w.csv", std::nullopt).sample_rate(), 1e6, 1e-3);
  write_text(dir / "s.csv", "0;1\n1e-6;2\n2e-6;3\n");
  EXPECT_EQ(read_csv_waveform(dir / "s.csv", std::nullopt)[2], 3.0);
}

TEST(ReadCsv, Errors) {
  TempDir dir;
  std::string s;
  char buf[64];
  double t = 0.0;
  for (int n = 0; n < 50; ++n) {
    std::snprintf(buf, sizeof buf, "%.17g,%d\n", t, n);
    s += buf;
    t += (n % 2 == 0 ? 1.01 : 0.99) * 8e-8;  // 1 % jitter
  }
  write_text(dir / "j.csv", s);
  EXPECT_EQ(kind_of([&] { read_csv_waveform(dir / "j.csv", std::nullopt); }),
            ErrorKind::kNonUniformSampling);
  write_text(dir / "p.csv", "t,v\n0,1\n1,abc\n");
  EXPECT_EQ(kind_of([&] { read_csv_waveform(dir / "p.csv", std::nullopt); }),
            ErrorKind::kParseError);
  write_text(dir / "c.csv", "0,1\n1,2,3\n");
  EXPECT_EQ(kind_of([&] { read_csv_waveform(dir / "c.csv", std::nullopt); }),
            ErrorKind::kParseError);
  write_text(dir / "e.csv", "time,volts\n");
  EXPECT_EQ(kind_of([&] { read_csv_waveform(dir / "e.csv", 1.0); }), ErrorKind::kEmptyFile);
}

TEST(Meta, PairingTable) {
  EXPECT_EQ(paired_gain_db(5), 35);
  EXPECT_EQ(paired_gain_db(10), 28);
  EXPECT_EQ(paired_gain_db(20), 22);
  EXPECT_EQ(paired_gain_db(40), 16);
  EXPECT_EQ(paired_gain_db(80), 10);
  EXPECT_EQ(paired_gain_db(100), 10);
  EXPECT_FALSE(paired_gain_db(15));

  MeasurementMeta m{"10J", 2, 3, "Ch2", "Ch3", 20, 35, 256, 0, ""};
  EXPECT_NO_THROW(m.validate(false));
  EXPECT_EQ(kind_of([&] { m.validate(true); }), ErrorKind::kInvalidPairing);
  m.gain_db = 22;
  EXPECT_NO_THROW(m.validate(true));
  m.rx_disc = 2;
  EXPECT_EQ(kind_of([&] { m.validate(false); }), ErrorKind::kInvalidArgument);
}

TEST(Labels, NaturalOrder) {
  EXPECT_TRUE(compare_labels("10J", "15J") < 0);
  EXPECT_TRUE(compare_labels("5J", "10J") < 0);
  EXPECT_TRUE(compare_labels("50J", "40J") > 0);
  EXPECT_TRUE(compare_labels("25J", "25J") == 0);
}

synth::SyntheticDatasetSpec desk_spec() {
  synth::SyntheticDatasetSpec s;
  s.lost_discs["25J"] = {4};
  s.n_samples = 1024;
  s.n_modes = 8;
  return s;
}

TEST(Manifest, DeskScaleMinusLostDisc) {
  TempDir dir;
  const fs::path mpath = synth::write_synthetic_dataset(desk_spec(), dir.path());
  const DatasetManifest m = load_manifest(mpath);
  EXPECT_EQ(m.records.size(), 82u);
  EXPECT_EQ(m.plate_ids(), (std::vector<std::string>{"10J", "15J", "20J", "25J", "30J", "40J",
                                                    "50J"}));
  for (const auto& r : m.records) {
    if (r.meta.plate_id == "25J") {
      EXPECT_NE(r.meta.tx_disc, 4);
      EXPECT_NE(r.meta.rx_disc, 4);
    }
  }
  const DatasetManifest resident = synth::make_synthetic_dataset(desk_spec());
  ASSERT_EQ(resident.records.size(), m.records.size());
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    ASSERT_EQ(m.records[i].load(), resident.records[i].load());
  }
}

nlohmann::json small_manifest(const fs::path& dir) {
  write_binary_waveform(dir / "a.f64", random_wave(64, 1), BinaryLayout::parse("f64le"));
  write_csv_waveform(dir / "b.csv", random_wave(64, 2));
  nlohmann::json j;
  j["schema"] = 1;
  j["sample_rate"] = 12.5e6;
  j["n_samples"] = 64;
  j["format"] = {{"kind", "binary"}, {"layout", "f64le"}};
  j["records"] = nlohmann::json::array();
  j["records"].push_back({{"file", "a.f64"}, {"plate", "10J"}, {"tx_disc", 2}, {"rx_disc", 3},
                          {"tx_channel", "Ch2"}, {"rx_channel", "Ch3"}, {"excitation_pct", 20},
                          {"gain_db", 22}});
  j["records"].push_back({{"file", "b.csv"}, {"plate", "10J"}, {"tx_disc", 3}, {"rx_disc", 2},
                          {"tx_channel", "Ch2"}, {"rx_channel", "Ch3"}, {"excitation_pct", 20},
                          {"gain_db", 22}, {"format", {{"kind", "csv"}}}});
  return j;
}

TEST(Manifest, ErrorPaths) {
  TempDir dir;
  nlohmann::json j = small_manifest(dir.path());
  std::ofstream(dir / "m.json") << j.dump();
  EXPECT_EQ(load_manifest(dir / "m.json").records.size(), 2u);

  nlohmann::json dup = j;
  dup["records"][1] = dup["records"][0];
  std::ofstream(dir / "dup.json") << dup.dump();
  EXPECT_EQ(kind_of([&] { load_manifest(dir / "dup.json"); }), ErrorKind::kDuplicateKey);

  nlohmann::json pairing = j;
  pairing["enforce_pairing"] = true;
  pairing["records"][0]["gain_db"] = 35;
  std::ofstream(dir / "pair.json") << pairing.dump();
  EXPECT_EQ(kind_of([&] { load_manifest(dir / "pair.json"); }), ErrorKind::kInvalidPairing);
  LoadOptions relaxed;
  relaxed.enforce_pairing = false;
  EXPECT_NO_THROW(load_manifest(dir / "pair.json", relaxed));

  nlohmann::json missing = j;
  missing["records"][0]["file"] = "gone.f64";
  std::ofstream(dir / "miss.json") << missing.dump();
  EXPECT_EQ(kind_of([&] { load_manifest(dir / "miss.json"); }), ErrorKind::kMissingFile);
  EXPECT_EQ(kind_of([&] { load_manifest(dir / "absent.json"); }), ErrorKind::kMissingFile);

  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_EQ(kind_of([&] { load_manifest(dir / "bad.json"); }), ErrorKind::kParseError);

  nlohmann::json nofield = j;
  nofield["records"][0].erase("plate");
  std::ofstream(dir / "nf.json") << nofield.dump();
  EXPECT_EQ(kind_of([&] { load_manifest(dir / "nf.json"); }), ErrorKind::kParseError);
}

TEST(Manifest, OrderIndependent) {
  TempDir dir;
  const fs::path mpath = synth::write_synthetic_dataset(desk_spec(), dir.path());
  nlohmann::json j;
  std::ifstream(mpath) >> j;
  std::mt19937 g(3);
  std::shuffle(j["records"].begin(), j["records"].end(), g);
  std::ofstream(dir / "shuffled.json") << j.dump();
  const DatasetManifest a = load_manifest(mpath);
  const DatasetManifest b = load_manifest(dir / "shuffled.json");
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(key_of(a.records[i].meta), key_of(b.records[i].meta));
  }
}

TEST(Manifest, LoadChecksDeclaredLength) {
  TempDir dir;
  nlohmann::json j = small_manifest(dir.path());
  j["n_samples"] = 65;
  std::ofstream(dir / "m.json") << j.dump();
  const DatasetManifest m = load_manifest(dir / "m.json");
  EXPECT_THROW(m.records[0].load(), Error);
}

}  // namespace
}  // namespace spci::ingest
