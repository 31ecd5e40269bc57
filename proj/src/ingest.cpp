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

#include "spci/ingest.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spci/error.hpp"

namespace spci::ingest {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<unsigned char> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kMissingFile, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint64_t load_uint(const unsigned char* p, std::size_t width,
                        Endianness e) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    const std::size_t shift =
        8 * (e == Endianness::kLittle ? i : width - 1 - i);
    v |= static_cast<std::uint64_t>(p[i]) << shift;
  }
  return v;
}

void store_uint(std::uint64_t v, std::size_t width, Endianness e,
                std::vector<unsigned char>& out) {
  for (std::size_t i = 0; i < width; ++i) {
    const std::size_t shift =
        8 * (e == Endianness::kLittle ? i : width - 1 - i);
    out.push_back(static_cast<unsigned char>((v >> shift) & 0xffU));
  }
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ';' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool parse_double(const std::string& s, double& v) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  return res.ec == std::errc() && res.ptr == e && std::isfinite(v);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T get_field(const json& j, const char* name, const std::string& where) {
  if (!j.contains(name)) {
    fail(ErrorKind::kParseError, where + ": missing field '" + name + "'");
  }
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kParseError,
         where + ": field '" + name + "' has wrong type (" + e.what() + ")");
  }
}

template <typename T>
T get_or(const json& j, const char* name, T fallback,
         const std::string& where) {
  if (!j.contains(name)) return fallback;
  return get_field<T>(j, name, where);
}

FileFormat parse_format(const json& j, const std::string& where) {
  const auto kind = get_field<std::string>(j, "kind", where);
  if (kind == "csv") {
    CsvFormat f;
    if (j.contains("sample_rate_hint")) {
      f.sample_rate_hint = get_field<double>(j, "sample_rate_hint", where);
    }
    return f;
  }
  if (kind == "binary") {
    BinaryLayout l =
        BinaryLayout::parse(get_field<std::string>(j, "layout", where));
    l.header_bytes = get_or<std::size_t>(j, "header_bytes", 0, where);
    l.scale = get_or<double>(j, "scale", 1.0, where);
    if (j.contains("n_samples")) {
      l.n_samples = get_field<std::size_t>(j, "n_samples", where);
    }
    return l;
  }
  fail(ErrorKind::kUnknownLayout, where + ": unknown format kind '" + kind + "'");
}

json format_to_json(const FileFormat& f) {
  if (const auto* c = std::get_if<CsvFormat>(&f)) {
    json j = {{"kind", "csv"}};
    if (c->sample_rate_hint) j["sample_rate_hint"] = *c->sample_rate_hint;
    return j;
  }
  const auto& l = std::get<BinaryLayout>(f);
  json j = {{"kind", "binary"},
            {"layout", l.name()},
            {"header_bytes", l.header_bytes},
            {"scale", l.scale}};
  if (l.n_samples) j["n_samples"] = *l.n_samples;
  return j;
}

}  // namespace

// --- binary ---------------------------------------------------------------

BinaryLayout BinaryLayout::parse(std::string_view name) {
  BinaryLayout l;
  if (name.size() != 5) {
    fail(ErrorKind::kUnknownLayout, "unknown layout '" + std::string(name) + "'");
  }
  const std::string_view type = name.substr(0, 3);
  const std::string_view end = name.substr(3);
  if (type == "i16") {
    l.dtype = SampleType::kI16;
  } else if (type == "f32") {
    l.dtype = SampleType::kF32;
  } else if (type == "f64") {
    l.dtype = SampleType::kF64;
  } else {
    fail(ErrorKind::kUnknownLayout, "unknown sample type in '" + std::string(name) + "'");
  }
  if (end == "le") {
    l.endianness = Endianness::kLittle;
  } else if (end == "be") {
    l.endianness = Endianness::kBig;
  } else {
    fail(ErrorKind::kUnknownLayout, "unknown endianness in '" + std::string(name) + "'");
  }
  return l;
}

std::string BinaryLayout::name() const {
  std::string s = dtype == SampleType::kI16   ? "i16"
                  : dtype == SampleType::kF32 ? "f32"
                                              : "f64";
  return s + (endianness == Endianness::kLittle ? "le" : "be");
}

std::size_t BinaryLayout::sample_width() const {
  switch (dtype) {
    case SampleType::kI16: return 2;
    case SampleType::kF32: return 4;
    case SampleType::kF64: return 8;
  }
  return 0;
}

Waveform read_binary_waveform(const fs::path& path, const BinaryLayout& layout,
                              double sample_rate) {
  const std::vector<unsigned char> bytes = read_file(path);
  const std::size_t width = layout.sample_width();
  if (bytes.size() < layout.header_bytes) {
    fail(ErrorKind::kTruncatedFile, path.string() + " is shorter than its header");
  }
  const std::size_t payload = bytes.size() - layout.header_bytes;
  std::size_t n = payload / width;
  if (layout.n_samples) {
    if (n < *layout.n_samples) {
      fail(ErrorKind::kTruncatedFile,
           path.string() + " holds " + std::to_string(n) + " samples, " +
               std::to_string(*layout.n_samples) + " declared");
    }
    n = *layout.n_samples;
  } else if (payload % width != 0) {
    fail(ErrorKind::kTruncatedFile, path.string() + " ends inside a sample");
  }
  if (n == 0) fail(ErrorKind::kEmptyFile, path.string() + " has no samples");

  std::vector<double> v(n);
  const unsigned char* p = bytes.data() + layout.header_bytes;
  for (std::size_t i = 0; i < n; ++i, p += width) {
    const std::uint64_t raw = load_uint(p, width, layout.endianness);
    double x = 0.0;
    switch (layout.dtype) {
      case SampleType::kI16:
        x = static_cast<std::int16_t>(static_cast<std::uint16_t>(raw));
        break;
      case SampleType::kF32:
        x = std::bit_cast<float>(static_cast<std::uint32_t>(raw));
        break;
      case SampleType::kF64:
        x = std::bit_cast<double>(raw);
        break;
    }
    v[i] = x * layout.scale;
  }
  return Waveform(std::move(v), sample_rate);
}

void write_binary_waveform(const fs::path& path, const Waveform& w,
                           const BinaryLayout& layout) {
  require(layout.scale > 0.0, "layout scale must be positive");
  std::vector<unsigned char> out(layout.header_bytes, 0);
  out.reserve(layout.header_bytes + w.size() * layout.sample_width());
  for (double x : w.samples()) {
    const double stored = x / layout.scale;
    switch (layout.dtype) {
      case SampleType::kI16: {
        const double c = std::clamp(std::nearbyint(stored), -32768.0, 32767.0);
        const auto q = static_cast<std::int16_t>(c);
        store_uint(static_cast<std::uint16_t>(q), 2, layout.endianness, out);
        break;
      }
      case SampleType::kF32:
        store_uint(std::bit_cast<std::uint32_t>(static_cast<float>(stored)), 4,
                   layout.endianness, out);
        break;
      case SampleType::kF64:
        store_uint(std::bit_cast<std::uint64_t>(stored), 8, layout.endianness,
                   out);
        break;
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) fail(ErrorKind::kIoError, "cannot write " + path.string());
}

// --- csv ------------------------------------------------------------------

Waveform read_csv_waveform(const fs::path& path,
                           std::optional<double> sample_rate_hint) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kMissingFile, "cannot open " + path.string());

  std::vector<double> times;
  std::vector<double> volts;
  std::size_t columns = 0;
  bool seen_content = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::vector<std::string> fields = split_fields(t);
    std::vector<double> vals(fields.size());
    bool numeric = !fields.empty();
    for (std::size_t i = 0; i < fields.size() && numeric; ++i) {
      numeric = parse_double(fields[i], vals[i]);
    }
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (!numeric) {
      if (!seen_content) {
        seen_content = true;  // header line
        continue;
      }
      fail(ErrorKind::kParseError, where + ": non-numeric field");
    }
    seen_content = true;
    if (columns == 0) {
      if (vals.size() != 1 && vals.size() != 2) {
        fail(ErrorKind::kParseError, where + ": expected 1 or 2 columns");
      }
      columns = vals.size();
    } else if (vals.size() != columns) {
      fail(ErrorKind::kParseError, where + ": column count changed");
    }
    if (columns == 2) times.push_back(vals[0]);
    volts.push_back(vals.back());
  }
  if (volts.empty()) fail(ErrorKind::kEmptyFile, path.string() + " has no samples");

  if (columns == 1 || times.size() < 2) {
    if (!sample_rate_hint) {
      fail(ErrorKind::kParseError,
           path.string() + ": no time column, sample rate hint required");
    }
    return Waveform(std::move(volts), *sample_rate_hint,
                    times.empty() ? 0.0 : times.front());
  }

  const double span = times.back() - times.front();
  const double rate = static_cast<double>(times.size() - 1) / span;
  if (!(span > 0.0) || !std::isfinite(rate)) {
    fail(ErrorKind::kNonUniformSampling, path.string() + ": time column not increasing");
  }
  const double dt = 1.0 / rate;
  const double tol = 1e-3 * dt;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs((times[i] - times[i - 1]) - dt) >= tol) {
      fail(ErrorKind::kNonUniformSampling,
           path.string() + ": sample interval deviates at row " +
               std::to_string(i));
    }
  }
  return Waveform(std::move(volts), rate, times.front());
}

void write_csv_waveform(const fs::path& path, const Waveform& w,
                        bool with_time) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) fail(ErrorKind::kIoError, "cannot write " + path.string());
  f << (with_time ? "time_s,voltage_v\n" : "voltage_v\n");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (with_time) {
      f << fmt17(w.t0() + static_cast<double>(i) / w.sample_rate()) << ',';
    }
    f << fmt17(w[i]) << '\n';
  }
  if (!f) fail(ErrorKind::kIoError, "cannot write " + path.string());
}

// --- metadata -------------------------------------------------------------

std::optional<int> paired_gain_db(int excitation_pct) {
  static const std::map<int, int> kPairs = {
      {5, 35}, {10, 28}, {20, 22}, {40, 16}, {80, 10}, {100, 10}};
  const auto it = kPairs.find(excitation_pct);
  if (it == kPairs.end()) return std::nullopt;
  return it->second;
}

void MeasurementMeta::validate(bool enforce_pairing) const {
  const std::string who = "record " + key_of(*this).to_string();
  require(!plate_id.empty(), who + ": plate id must not be empty");
  require(tx_disc >= 1 && tx_disc <= 5, who + ": tx_disc must be 1..5");
  require(rx_disc >= 1 && rx_disc <= 5, who + ": rx_disc must be 1..5");
  require(tx_disc != rx_disc, who + ": tx_disc and rx_disc must differ");
  require(excitation_pct > 0 && excitation_pct <= 100,
          who + ": excitation_pct must be in (0, 100]");
  require(n_avg >= 1, who + ": n_avg must be >= 1");
  if (enforce_pairing) {
    const auto gain = paired_gain_db(excitation_pct);
    if (!gain || *gain != gain_db) {
      fail(ErrorKind::kInvalidPairing,
           who + ": " + std::to_string(excitation_pct) + " % with " +
               std::to_string(gain_db) + " dB is not an acquisition pairing");
    }
  }
}

std::string RecordKey::to_string() const {
  return plate_id + " " + std::to_string(tx_disc) + "->" +
         std::to_string(rx_disc) + " " + std::to_string(excitation_pct) +
         "% rep " + std::to_string(repetition);
}

std::strong_ordering RecordKey::operator<=>(const RecordKey& o) const {
  if (auto c = compare_labels(plate_id, o.plate_id); c != 0) return c;
  if (auto c = tx_disc <=> o.tx_disc; c != 0) return c;
  if (auto c = rx_disc <=> o.rx_disc; c != 0) return c;
  if (auto c = excitation_pct <=> o.excitation_pct; c != 0) return c;
  return repetition <=> o.repetition;
}

RecordKey key_of(const MeasurementMeta& m) {
  return {m.plate_id, m.tx_disc, m.rx_disc, m.excitation_pct, m.repetition};
}

std::strong_ordering compare_labels(std::string_view a, std::string_view b) {
  auto numeric_prefix = [](std::string_view s, double& v) -> std::size_t {
    std::size_t n = 0;
    while (n < s.size() && ((s[n] >= '0' && s[n] <= '9') || s[n] == '.')) ++n;
    if (n == 0) return 0;
    const auto r = std::from_chars(s.data(), s.data() + n, v);
    return r.ec == std::errc() ? static_cast<std::size_t>(r.ptr - s.data()) : 0;
  };
  double va = 0.0;
  double vb = 0.0;
  const std::size_t na = numeric_prefix(a, va);
  const std::size_t nb = numeric_prefix(b, vb);
  if (na > 0 && nb > 0) {
    if (va < vb) return std::strong_ordering::less;
    if (va > vb) return std::strong_ordering::greater;
    if (auto c = a.substr(na) <=> b.substr(nb); c != 0) return c;
  } else if (na > 0 || nb > 0) {
    return na > 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return a <=> b;
}

// --- records and manifests ------------------------------------------------

Waveform StudyRecord::load() const {
  Waveform w = [&] {
    if (const auto* resident = std::get_if<Waveform>(&source)) return *resident;
    const auto& ref = std::get<FileRef>(source);
    if (const auto* layout = std::get_if<BinaryLayout>(&ref.format)) {
      BinaryLayout l = *layout;
      if (!l.n_samples) l.n_samples = n_samples;
      return read_binary_waveform(ref.path, l, sample_rate);
    }
    const auto& csv = std::get<CsvFormat>(ref.format);
    return read_csv_waveform(ref.path, csv.sample_rate_hint
                                           ? csv.sample_rate_hint
                                           : std::optional<double>(sample_rate));
  }();
  const std::string who = key_of(meta).to_string();
  if (n_samples && w.size() != *n_samples) {
    fail(ErrorKind::kParseError, who + ": " + std::to_string(w.size()) +
                                     " samples, manifest declares " +
                                     std::to_string(*n_samples));
  }
  if (sample_rate > 0.0 &&
      std::abs(w.sample_rate() - sample_rate) > 1e-6 * sample_rate) {
    fail(ErrorKind::kParseError, who + ": sample rate differs from manifest");
  }
  return w;
}

void DatasetManifest::validate() {
  for (const StudyRecord& r : records) r.meta.validate(enforce_pairing);
  std::sort(records.begin(), records.end(),
            [](const StudyRecord& a, const StudyRecord& b) {
              return key_of(a.meta) < key_of(b.meta);
            });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (key_of(records[i].meta) == key_of(records[i - 1].meta)) {
      fail(ErrorKind::kDuplicateKey,
           "duplicate record " + key_of(records[i].meta).to_string());
    }
  }
}

std::vector<std::string> DatasetManifest::plate_ids() const {
  std::vector<std::string> ids;
  for (const StudyRecord& r : records) ids.push_back(r.meta.plate_id);
  std::sort(ids.begin(), ids.end(), [](const auto& a, const auto& b) {
    return compare_labels(a, b) < 0;
  });
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

DatasetManifest load_manifest(const fs::path& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kMissingFile, "cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParseError, path.string() + ": " + e.what());
  }
  const std::string where = path.string();
  const int schema = get_field<int>(doc, "schema", where);
  if (schema != 1) {
    fail(ErrorKind::kParseError, where + ": unsupported schema " + std::to_string(schema));
  }

  DatasetManifest m;
  m.sample_rate = get_field<double>(doc, "sample_rate", where);
  require(m.sample_rate > 0.0, where + ": sample_rate must be positive");
  if (doc.contains("n_samples")) {
    m.n_samples = get_field<std::size_t>(doc, "n_samples", where);
  }
  m.enforce_pairing = opts.enforce_pairing.value_or(
      get_or<bool>(doc, "enforce_pairing", false, where));
  const FileFormat default_format = doc.contains("format")
                                        ? parse_format(doc.at("format"), where)
                                        : FileFormat{BinaryLayout{}};
  const fs::path base = path.parent_path();

  if (!doc.contains("records") || !doc.at("records").is_array()) {
    fail(ErrorKind::kParseError, where + ": 'records' must be an array");
  }
  std::size_t idx = 0;
  for (const json& jr : doc.at("records")) {
    const std::string rw = where + ": records[" + std::to_string(idx++) + "]";
    MeasurementMeta meta;
    meta.plate_id = get_field<std::string>(jr, "plate", rw);
    meta.tx_disc = get_field<int>(jr, "tx_disc", rw);
    meta.rx_disc = get_field<int>(jr, "rx_disc", rw);
    meta.tx_channel = get_or<std::string>(jr, "tx_channel", "", rw);
    meta.rx_channel = get_or<std::string>(jr, "rx_channel", "", rw);
    meta.excitation_pct = get_field<int>(jr, "excitation_pct", rw);
    meta.gain_db = get_field<int>(jr, "gain_db", rw);
    meta.n_avg = get_or<int>(jr, "n_avg", 1, rw);
    meta.repetition = get_or<int>(jr, "repetition", 0, rw);
    meta.series = get_or<std::string>(jr, "series", "", rw);

    fs::path file = get_field<std::string>(jr, "file", rw);
    if (file.is_relative()) file = base / file;
    if (!fs::exists(file)) {
      fail(ErrorKind::kMissingFile, rw + ": " + file.string() + " not found");
    }
    FileFormat format =
        jr.contains("format") ? parse_format(jr.at("format"), rw) : default_format;

    StudyRecord rec;
    rec.meta = std::move(meta);
    rec.source = FileRef{std::move(file), std::move(format)};
    rec.sample_rate = m.sample_rate;
    rec.n_samples = m.n_samples;
    m.records.push_back(std::move(rec));
  }
  m.validate();
  return m;
}

void write_manifest(const fs::path& path, const DatasetManifest& m) {
  const fs::path base = path.parent_path();
  json doc;
  doc["schema"] = 1;
  doc["sample_rate"] = m.sample_rate;
  if (m.n_samples) doc["n_samples"] = *m.n_samples;
  doc["enforce_pairing"] = m.enforce_pairing;
  json records = json::array();
  for (const StudyRecord& r : m.records) {
    const auto* ref = std::get_if<FileRef>(&r.source);
    require(ref != nullptr, "write_manifest needs file-backed records");
    fs::path file = ref->path;
    if (!base.empty()) {
      const fs::path rel = file.lexically_relative(base);
      if (!rel.empty() && *rel.begin() != "..") file = rel;
    }
    json jr = {{"file", file.generic_string()},
               {"plate", r.meta.plate_id},
               {"tx_disc", r.meta.tx_disc},
               {"rx_disc", r.meta.rx_disc},
               {"tx_channel", r.meta.tx_channel},
               {"rx_channel", r.meta.rx_channel},
               {"excitation_pct", r.meta.excitation_pct},
               {"gain_db", r.meta.gain_db},
               {"n_avg", r.meta.n_avg},
               {"repetition", r.meta.repetition},
               {"format", format_to_json(ref->format)}};
    if (!r.meta.series.empty()) jr["series"] = r.meta.series;
    records.push_back(std::move(jr));
  }
  doc["records"] = std::move(records);
  std::ofstream f(path, std::ios::trunc);
  f << doc.dump(2) << '\n';
  if (!f) fail(ErrorKind::kIoError, "cannot write " + path.string());
}

}  // namespace spci::ingest
