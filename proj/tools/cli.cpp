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

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spci/error.hpp"
#include "spci/ingest.hpp"
#include "spci/report.hpp"
#include "spci/spc_index.hpp"
#include "spci/study.hpp"
#include "spci/synth.hpp"
#include "spci/synth_dataset.hpp"

namespace spci::cli {
namespace {

namespace fs = std::filesystem;
using Json = report::Json;

// Thrown for command-line problems detected after CLI11 parsing.
struct UsageError {
  std::string message;
};

[[noreturn]] void usage(std::string message) { throw UsageError{std::move(message)}; }

template <typename T>
T need(const std::optional<T>& v, const char* flag) {
  if (!v) usage(std::string(flag) + " required");
  return *v;
}

std::string full_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json read_json_file(const fs::path& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::kMissingFile, path.string() + " not found");
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParseError, path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const Json& j) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << j.dump(2) << '\n';
  f.flush();
  if (!f) fail(ErrorKind::kIoError, "cannot write " + path.string());
}

fs::path sidecar_of(const fs::path& data) { return fs::path(data.string() + ".json"); }

bool is_csv_path(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".csv";
}

// ---------------------------------------------------------------- compute

struct ComputeArgs {
  std::string input;
  std::optional<std::string> layout;
  std::optional<double> rate;
  std::size_t header_bytes = 0;
  double scale = 1.0;
  std::optional<double> f_min, f_max, thr_min, thr_step, thr_max;
  bool dc_correct = false;
  bool zero_pad = false;
  bool norm_full = false;
  std::optional<std::string> dump_spectrum;
  std::optional<std::string> output;
};

void add_compute(CLI::App& app, ComputeArgs& a) {
  app.add_option("--input", a.input, "Waveform file (binary or .csv)");
  app.add_option("--layout", a.layout, "Binary layout, e.g. i16le, f32be, f64le");
  app.add_option("--rate", a.rate, "Sample rate in Hz (binary input)");
  app.add_option("--header-bytes", a.header_bytes, "Bytes to skip before samples");
  app.add_option("--scale", a.scale, "Volts per stored unit");
  app.add_option("--f-min", a.f_min, "Band lower edge, Hz");
  app.add_option("--f-max", a.f_max, "Band upper edge, Hz");
  app.add_option("--thr-min", a.thr_min, "Lowest threshold");
  app.add_option("--thr-step", a.thr_step, "Threshold step");
  app.add_option("--thr-max", a.thr_max, "Highest threshold");
  app.add_flag("--dc-correct", a.dc_correct, "Subtract the first sample");
  app.add_flag("--zero-pad", a.zero_pad, "Zero-pad to the next power of two");
  app.add_flag("--norm-full-spectrum", a.norm_full,
               "Normalize by the full-spectrum maximum instead of the band maximum");
  app.add_option("--dump-spectrum", a.dump_spectrum,
                 "Write the normalized spectrum as CSV");
  app.add_option("--output", a.output, "Also write the JSON result here");
}

struct LoadedInput {
  Waveform wave;
  Json echo;
};

LoadedInput load_input(const ComputeArgs& a) {
  if (a.input.empty()) usage("input required");
  const fs::path path = a.input;
  if (!fs::exists(path)) fail(ErrorKind::kMissingFile, path.string() + " not found");

  Json echo;
  echo["path"] = path.generic_string();
  if (!a.layout && is_csv_path(path)) {
    Waveform w = ingest::read_csv_waveform(path, a.rate);
    echo["format"] = "csv";
    echo["sample_rate"] = w.sample_rate();
    echo["n_samples"] = w.size();
    return {std::move(w), std::move(echo)};
  }

  std::optional<std::string> layout_name = a.layout;
  std::optional<double> rate = a.rate;
  std::size_t header = a.header_bytes;
  double scale = a.scale;
  const fs::path side = sidecar_of(path);
  if (fs::exists(side) && (!layout_name || !rate)) {
    const Json s = read_json_file(side);
    if (!layout_name && s.contains("layout")) layout_name = s.at("layout").get<std::string>();
    if (!rate && s.contains("sample_rate")) rate = s.at("sample_rate").get<double>();
    if (s.contains("header_bytes") && a.header_bytes == 0) {
      header = s.at("header_bytes").get<std::size_t>();
    }
    if (s.contains("scale") && a.scale == 1.0) scale = s.at("scale").get<double>();
    echo["sidecar"] = side.generic_string();
  }
  if (!layout_name) usage("layout required");
  if (!rate) usage("rate required");
  ingest::BinaryLayout layout = ingest::BinaryLayout::parse(*layout_name);
  layout.header_bytes = header;
  layout.scale = scale;
  Waveform w = ingest::read_binary_waveform(path, layout, *rate);
  echo["format"] = layout.name();
  echo["header_bytes"] = header;
  echo["scale"] = scale;
  echo["sample_rate"] = *rate;
  echo["n_samples"] = w.size();
  return {std::move(w), std::move(echo)};
}

SpcParams compute_params(const ComputeArgs& a) {
  SpcParams p;
  p.band.f_min = need(a.f_min, "f-min");
  p.band.f_max = need(a.f_max, "f-max");
  p.grid.thr_min = need(a.thr_min, "thr-min");
  p.grid.thr_step = need(a.thr_step, "thr-step");
  p.grid.thr_max = need(a.thr_max, "thr-max");
  p.preprocess.dc_correct = a.dc_correct;
  p.preprocess.zero_pad = a.zero_pad;
  p.norm_scope = a.norm_full ? NormScope::kFull : NormScope::kBand;
  p.validate();
  return p;
}

int cmd_compute(const ComputeArgs& a, std::ostream& out) {
  // Science flags are checked before touching the file so a missing flag is
  // reported as such even when the input is also bad.
  const SpcParams params = compute_params(a);
  const LoadedInput in = load_input(a);
  const SpcIndex idx = spc_index(in.wave, params);

  if (a.dump_spectrum) {
    const NormalizedSpectrum s = normalized_spectrum(in.wave, params);
    std::ofstream f(*a.dump_spectrum, std::ios::binary | std::ios::trunc);
    f << "freq_hz,magnitude\n";
    for (std::size_t k = 0; k < s.magnitudes.size(); ++k) {
      f << full_number(s.frequency(k)) << ',' << full_number(s.magnitudes[k]) << '\n';
    }
    f.flush();
    if (!f) fail(ErrorKind::kIoError, "cannot write " + *a.dump_spectrum);
  }

  Json j;
  j["schema"] = 1;
  j["command"] = "compute";
  j["input"] = in.echo;
  j["params"] = report::params_to_json(params);
  Json r;
  r["spc_index"] = idx.value;
  r["n_input"] = idx.n_input;
  r["freq_step_hz"] = idx.freq_step;
  r["norm_factor"] = idx.norm_factor;
  Json thr = Json::array();
  for (double t : idx.curve.thresholds) thr.push_back(report::rounded(t));
  r["curve"] = {{"thresholds", thr}, {"counts", idx.curve.counts}};
  j["result"] = std::move(r);
  const std::string text = j.dump(2) + "\n";
  out << text;
  if (a.output) {
    std::ofstream f(*a.output, std::ios::binary | std::ios::trunc);
    f << text;
    f.flush();
    if (!f) fail(ErrorKind::kIoError, "cannot write " + *a.output);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthCommon {
  double rate = 12.5e6;
  std::optional<double> duration;
  std::optional<std::size_t> samples;
  std::optional<std::string> out;
  std::string layout = "f64le";
};

void add_common(CLI::App& app, SynthCommon& c) {
  app.add_option("--rate", c.rate, "Sample rate in Hz")->capture_default_str();
  app.add_option("--dur", c.duration, "Record length in seconds");
  app.add_option("--samples", c.samples, "Record length in samples (default 10048)");
  app.add_option("--out", c.out, "Output file (.csv for text, otherwise binary)");
  app.add_option("--layout", c.layout, "Binary layout of the output")->capture_default_str();
}

std::size_t record_length(const SynthCommon& c) {
  if (c.duration && c.samples) usage("give either dur or samples, not both");
  if (c.duration) return synth::sample_count(*c.duration, c.rate);
  return c.samples.value_or(10048);
}

double record_duration(const SynthCommon& c) {
  return static_cast<double>(record_length(c)) / c.rate;
}

int write_synth(const Waveform& w, const SynthCommon& c, const std::string& kind,
                Json generator, std::ostream& out) {
  const fs::path path = c.out ? fs::path(*c.out) : fs::path(kind + ".f64");
  Json echo;
  echo["schema"] = 1;
  echo["command"] = "synth";
  echo["kind"] = kind;
  echo["sample_rate"] = w.sample_rate();
  echo["n_samples"] = w.size();
  echo["generator"] = std::move(generator);
  if (is_csv_path(path)) {
    ingest::write_csv_waveform(path, w);
    echo["format"] = "csv";
  } else {
    const ingest::BinaryLayout layout = ingest::BinaryLayout::parse(c.layout);
    ingest::write_binary_waveform(path, w, layout);
    echo["layout"] = layout.name();
    write_json_file(sidecar_of(path), echo);
  }
  echo["path"] = path.generic_string();
  out << echo.dump(2) << '\n';
  return kExitOk;
}

struct ToneArgs {
  std::vector<std::string> tones;
  bool no_snap = false;
};

void add_tones(CLI::App& app, ToneArgs& t) {
  app.add_option("--tone", t.tones,
                 "Tone as AMPLITUDE@FREQ_HZ, repeatable (default 1@100e3 1@350e3)");
  app.add_flag("--no-snap", t.no_snap, "Keep tone frequencies off the DFT bin grid");
}

std::vector<synth::Tone> parse_tones(const ToneArgs& t, std::size_t n, double rate) {
  std::vector<std::string> specs = t.tones;
  if (specs.empty()) specs = {"1@100e3", "1@350e3"};
  std::vector<synth::Tone> tones;
  for (const std::string& s : specs) {
    const auto at = s.find('@');
    if (at == std::string::npos) usage("tone '" + s + "' must be AMPLITUDE@FREQ");
    synth::Tone tone;
    try {
      tone.amplitude = std::stod(s.substr(0, at));
      tone.freq = std::stod(s.substr(at + 1));
    } catch (const std::exception&) {
      usage("tone '" + s + "' must be AMPLITUDE@FREQ");
    }
    if (!t.no_snap) {
      const auto k = static_cast<std::size_t>(
          std::llround(tone.freq * static_cast<double>(n) / rate));
      tone.freq = synth::exact_bin_freq(k, n, rate);
    }
    tones.push_back(tone);
  }
  return tones;
}

Json tones_json(const std::vector<synth::Tone>& tones) {
  Json a = Json::array();
  for (const auto& t : tones) a.push_back({{"amplitude", t.amplitude}, {"freq_hz", t.freq}});
  return a;
}

struct Rc1Args {
  SynthCommon common;
  double u0 = 1.0;
  double fc = 500e3;
  double delay = 0.0;
};

struct QmixArgs {
  SynthCommon common;
  ToneArgs tones;
  double e0 = 1.0;
  double e1 = 0.0;
  double amplitude = 1.0;
};

struct HmixArgs {
  SynthCommon common;
  ToneArgs tones;
  double e0 = 1.0;
  double h1 = 0.0;
  double amplitude = 1.0;
  double exponent = 1.5;
};

struct ModalArgs {
  SynthCommon common;
  std::optional<std::string> modes_csv;
  std::optional<std::size_t> random_modes;
  double f_lo = 15e3, f_hi = 800e3, q_lo = 20.0, q_hi = 300.0;
  std::uint64_t seed = 0;
  double noise_rms = 0.0;
  std::uint64_t realization = 0;
  std::size_t n_avg = 1;
  std::optional<std::string> nonlinearity;
  double strength = 0.0;
  double exponent = 1.5;
  double u0 = 1.0;
  double fc = 500e3;
};

struct DatasetArgs {
  std::string out_dir;
  std::vector<std::string> plates;
  std::vector<int> pcts;
  int repetitions = 1;
  std::string series;
  double noise_rms = 0.0;
  double dc_offset = 0.0;
  std::optional<std::string> nonlinearity;
  double strength = 0.0;
  std::uint64_t seed = 1;
  bool non_reciprocal = false;
  std::vector<std::string> lost;
  std::size_t n_samples = 10048;
  double rate = 12.5e6;
};

std::vector<synth::Mode> read_modes_csv(const fs::path& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::kMissingFile, path.string() + " not found");
  std::vector<synth::Mode> modes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    synth::Mode m;
    if (!(ss >> m.freq >> m.q >> m.gain)) {
      if (modes.empty() && line_no == 1) continue;  // header
      fail(ErrorKind::kParseError,
           path.string() + ":" + std::to_string(line_no) + ": expected f,Q,gain");
    }
    modes.push_back(m);
  }
  if (modes.empty()) fail(ErrorKind::kEmptyFile, path.string() + ": no modes");
  return modes;
}

std::optional<synth::Nonlinearity> parse_nonlinearity(const std::optional<std::string>& kind,
                                                       double strength, double exponent) {
  if (!kind) return std::nullopt;
  synth::Nonlinearity n;
  if (*kind == "quadratic") {
    n.kind = synth::NonlinearityKind::kQuadratic;
  } else if (*kind == "hertzian") {
    n.kind = synth::NonlinearityKind::kHertzian;
  } else {
    usage("nonlinearity must be quadratic or hertzian");
  }
  n.strength = strength;
  n.exponent = exponent;
  return n;
}

int cmd_rc1(const Rc1Args& a, std::ostream& out) {
  synth::Rc1Pulse p{a.u0, a.fc, a.delay};
  const Waveform w = synth::rc1_waveform(p, a.common.rate, record_duration(a.common));
  return write_synth(w, a.common, "rc1", {{"u0", a.u0}, {"fc_hz", a.fc}, {"delay_s", a.delay}},
                     out);
}

int cmd_qmix(const QmixArgs& a, std::ostream& out) {
  const std::size_t n = record_length(a.common);
  synth::QuadraticMixSpec s;
  s.e0 = a.e0;
  s.e1 = a.e1;
  s.amplitude = a.amplitude;
  s.tones = parse_tones(a.tones, n, a.common.rate);
  s.sample_rate = a.common.rate;
  s.duration = static_cast<double>(n) / a.common.rate;
  const Waveform w = synth::quadratic_mix_waveform(s);
  return write_synth(w, a.common, "qmix",
                     {{"e0", s.e0}, {"e1", s.e1}, {"amplitude", s.amplitude},
                      {"tones", tones_json(s.tones)}},
                     out);
}

int cmd_hmix(const HmixArgs& a, std::ostream& out) {
  const std::size_t n = record_length(a.common);
  synth::HertzianMixSpec s;
  s.e0 = a.e0;
  s.h1 = a.h1;
  s.amplitude = a.amplitude;
  s.exponent = a.exponent;
  s.tones = parse_tones(a.tones, n, a.common.rate);
  s.sample_rate = a.common.rate;
  s.duration = static_cast<double>(n) / a.common.rate;
  const Waveform w = synth::hertzian_mix_waveform(s);
  return write_synth(w, a.common, "hmix",
                     {{"e0", s.e0}, {"h1", s.h1}, {"amplitude", s.amplitude},
                      {"exponent", s.exponent}, {"tones", tones_json(s.tones)}},
                     out);
}

int cmd_modal(const ModalArgs& a, std::ostream& out) {
  if (a.modes_csv && a.random_modes) usage("give either modes or random-modes, not both");
  if (!a.modes_csv && !a.random_modes) usage("modes required (or random-modes)");
  if (a.n_avg == 0) usage("n-avg must be >= 1");
  synth::ModalPlateSpec spec;
  if (a.modes_csv) {
    spec.modes = read_modes_csv(*a.modes_csv);
  } else {
    spec = synth::random_modal_plate(a.seed, *a.random_modes, a.f_lo, a.f_hi, a.q_lo, a.q_hi);
  }
  spec.seed = a.seed;
  spec.noise_rms = a.noise_rms;
  spec.validate(a.common.rate);
  const auto nl = parse_nonlinearity(a.nonlinearity, a.strength, a.exponent);

  const std::size_t n = record_length(a.common);
  const double dur = static_cast<double>(n) / a.common.rate;
  const Waveform exc = synth::rc1_waveform({a.u0, a.fc, 0.0}, a.common.rate, dur);
  const Waveform w = synth::average_realizations(
      [&](std::uint64_t r) {
        return synth::modal_plate_response(exc, spec, nl, a.realization + r);
      },
      a.n_avg);

  Json modes = Json::array();
  for (const auto& m : spec.modes) {
    modes.push_back({{"freq_hz", m.freq}, {"q", m.q}, {"gain", m.gain}});
  }
  Json g;
  g["excitation"] = {{"kind", "rc1"}, {"u0", a.u0}, {"fc_hz", a.fc}};
  g["modes"] = std::move(modes);
  g["seed"] = a.seed;
  g["noise_rms"] = a.noise_rms;
  g["realization"] = a.realization;
  g["n_avg"] = a.n_avg;
  if (nl) {
    g["nonlinearity"] = {{"kind", *a.nonlinearity},
                         {"strength", nl->strength},
                         {"exponent", nl->exponent}};
  } else {
    g["nonlinearity"] = nullptr;
  }
  return write_synth(w, a.common, "modal", std::move(g), out);
}

int cmd_dataset(const DatasetArgs& a, std::ostream& out) {
  if (a.out_dir.empty()) usage("out-dir required");
  synth::SyntheticDatasetSpec s;
  if (!a.plates.empty()) s.plates = a.plates;
  if (!a.pcts.empty()) s.excitation_pcts = a.pcts;
  s.repetitions = a.repetitions;
  s.series = a.series;
  s.noise_rms = a.noise_rms;
  s.dc_offset = a.dc_offset;
  if (a.nonlinearity) {
    s.nonlinearity = parse_nonlinearity(a.nonlinearity, a.strength, 1.5)->kind;
  }
  s.strength = a.strength;
  s.seed = a.seed;
  s.reciprocal = !a.non_reciprocal;
  s.n_samples = a.n_samples;
  s.sample_rate = a.rate;
  for (const std::string& l : a.lost) {
    const auto colon = l.find(':');
    if (colon == std::string::npos) usage("lost must be PLATE:DISC");
    try {
      s.lost_discs[l.substr(0, colon)].push_back(std::stoi(l.substr(colon + 1)));
    } catch (const std::exception&) {
      usage("lost must be PLATE:DISC");
    }
  }
  const fs::path manifest = synth::write_synthetic_dataset(s, a.out_dir);
  const auto m = ingest::load_manifest(manifest);
  Json j;
  j["schema"] = 1;
  j["command"] = "synth";
  j["kind"] = "dataset";
  j["manifest"] = manifest.generic_string();
  j["records"] = m.records.size();
  j["plates"] = s.plates;
  j["seed"] = s.seed;
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- study

struct StudyArgs {
  std::optional<std::string> manifest;
  std::string spec;
  std::string out;
  std::vector<std::string> formats;
  std::size_t threads = 0;
};

template <typename T>
T spec_get(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) {
    fail(ErrorKind::kParseError, "study spec: " + where + key + " required");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParseError, "study spec: " + where + key + ": " + e.what());
  }
}

ThresholdGrid spec_grid(const Json& j, const std::string& where) {
  return {spec_get<double>(j, "thr_min", where), spec_get<double>(j, "thr_step", where),
          spec_get<double>(j, "thr_max", where)};
}

NormScope spec_scope(const Json& j) {
  const auto s = spec_get<std::string>(j, "norm_scope", "params.");
  if (s == "band") return NormScope::kBand;
  if (s == "full") return NormScope::kFull;
  fail(ErrorKind::kParseError, "study spec: params.norm_scope must be band or full");
}

SpcParams spec_params(const Json& j) {
  SpcParams p;
  p.band = {spec_get<double>(j, "f_min", "params."), spec_get<double>(j, "f_max", "params.")};
  p.grid = spec_grid(j, "params.");
  p.preprocess = {spec_get<bool>(j, "dc_correct", "params."),
                  spec_get<bool>(j, "zero_pad", "params.")};
  p.norm_scope = spec_scope(j);
  p.validate();
  return p;
}

study::Selector spec_selector(const Json& spec, const study::Selector& fallback) {
  if (!spec.contains("selector")) return fallback;
  const Json& s = spec.at("selector");
  study::Selector sel;
  if (s.contains("plate")) sel.plate_id = s.at("plate").get<std::string>();
  if (s.contains("tx_disc")) sel.tx_disc = s.at("tx_disc").get<int>();
  if (s.contains("rx_disc")) sel.rx_disc = s.at("rx_disc").get<int>();
  if (s.contains("excitation_pct")) sel.excitation_pct = s.at("excitation_pct").get<int>();
  if (s.contains("gain_db")) sel.gain_db = s.at("gain_db").get<int>();
  if (s.contains("series")) sel.series = s.at("series").get<std::string>();
  return sel;
}

study::StudyResult run_averaging_from_spec(const Json& spec, const study::RunOptions& opts) {
  const Json g = spec_get<Json>(spec, "generator", "");
  const double rate = spec_get<double>(g, "sample_rate", "generator.");
  const auto n = spec_get<std::size_t>(g, "n_samples", "generator.");
  auto plate = synth::random_modal_plate(
      spec_get<std::uint64_t>(g, "seed", "generator."),
      spec_get<std::size_t>(g, "n_modes", "generator."), spec_get<double>(g, "f_lo", "generator."),
      spec_get<double>(g, "f_hi", "generator."), spec_get<double>(g, "q_lo", "generator."),
      spec_get<double>(g, "q_hi", "generator."));
  plate.noise_rms = spec_get<double>(g, "noise_rms", "generator.");
  plate.validate(rate);
  const Waveform exc = synth::rc1_waveform(
      {spec_get<double>(g, "u0", "generator."), spec_get<double>(g, "fc", "generator."), 0.0},
      rate, static_cast<double>(n) / rate);
  const auto n_avg = spec_get<std::vector<std::size_t>>(spec, "n_avg", "");
  return study::run_averaging_study(
      [&](std::uint64_t r) { return synth::modal_plate_response(exc, plate, std::nullopt, r); },
      n_avg, spec_params(spec_get<Json>(spec, "params", "")),
      spec_get<double>(spec, "tolerance", ""),
      spec.contains("stable_from") ? spec.at("stable_from").get<std::size_t>() : 32, opts);
}

void print_summary(const study::StudyResult& r, std::ostream& out) {
  out << "study: " << r.study << "\n";
  out << "selector: " << r.selector << "\n";
  out << "rows: " << r.rows.size() << "\n";
  if (!r.stats.empty()) {
    out << "group\tn\tmean\tsample_std\trel_error\n";
    for (const auto& g : r.stats) {
      out << g.group << '\t' << g.summary.n << '\t' << report::format_number(g.summary.mean)
          << '\t' << report::format_number(g.summary.sample_std) << '\t'
          << report::format_number(g.summary.relative_error()) << '\n';
    }
  }
  for (const auto& x : r.reversals) {
    out << "reversal: " << x.variant << " " << x.group_a << " vs " << x.group_b << " flips between "
        << x.grid_a << " and " << x.grid_b << '\n';
  }
  for (const auto& x : r.reciprocity) {
    out << "reciprocity: " << x.plate << " ratio " << report::format_number(x.ratio)
        << (x.flagged ? " FLAGGED" : "") << '\n';
  }
  for (const auto& t : r.trends) {
    out << "trend: " << t.series << " tau "
        << (t.tau ? report::format_number(*t.tau) : std::string("undefined")) << " increasing "
        << t.increasing << " decreasing " << t.decreasing << " constant " << t.constant
        << " non-monotone " << t.non_monotone << '\n';
  }
  if (r.study == "amplitude") {
    out << (study::amplitude_invariant(r) ? "invariant" : "amplitude-dependent") << '\n';
  }
  for (const auto& s : r.stability) {
    out << "n_avg " << s.n_avg << ": " << report::format_number(s.value)
        << (s.stable ? " stable" : "") << '\n';
  }
  for (const auto& m : r.missing) out << "absent: " << m << '\n';
}

int cmd_study(const StudyArgs& a, std::ostream& out) {
  if (a.spec.empty()) usage("spec required");
  if (a.out.empty()) usage("out required");
  std::vector<report::Format> formats;
  for (const auto& f : a.formats) formats.push_back(report::parse_format(f));
  if (formats.empty()) formats.push_back(report::Format::kCsv);

  const Json spec = read_json_file(a.spec);
  const auto kind = spec_get<std::string>(spec, "study", "");
  const study::RunOptions opts{a.threads};

  study::StudyResult r;
  if (kind == "averaging") {
    r = run_averaging_from_spec(spec, opts);
  } else {
    if (!a.manifest) usage("manifest required");
    ingest::LoadOptions lo;
    if (spec.contains("enforce_pairing")) lo.enforce_pairing = spec.at("enforce_pairing").get<bool>();
    const ingest::DatasetManifest ds = ingest::load_manifest(*a.manifest, lo);
    const Json pj = spec_get<Json>(spec, "params", "");

    if (kind == "preprocess") {
      SpcParams base;
      base.band = {spec_get<double>(pj, "f_min", "params."),
                   spec_get<double>(pj, "f_max", "params.")};
      base.norm_scope = spec_scope(pj);
      std::vector<study::NamedGrid> grids;
      for (const Json& g : spec_get<Json>(spec, "grids", "")) {
        grids.push_back({spec_get<std::string>(g, "label", "grids[]."), spec_grid(g, "grids[].")});
      }
      if (grids.empty()) fail(ErrorKind::kParseError, "study spec: grids is empty");
      base.grid = grids.front().grid;
      std::vector<study::Variant> variants = study::preprocess_matrix();
      if (spec.contains("variants")) {
        std::vector<study::Variant> chosen;
        for (const auto& label : spec.at("variants").get<std::vector<std::string>>()) {
          const auto it = std::find_if(variants.begin(), variants.end(),
                                       [&](const auto& v) { return v.label == label; });
          if (it == variants.end()) {
            fail(ErrorKind::kParseError, "study spec: unknown variant '" + label + "'");
          }
          chosen.push_back(*it);
        }
        variants = std::move(chosen);
      }
      r = study::run_preprocess_sensitivity(
          ds, base, grids, spec_selector(spec, study::reference_condition()), variants, opts);
    } else if (kind == "pairs") {
      std::vector<std::pair<int, int>> pairs;
      if (spec.contains("pairs")) pairs = spec.at("pairs").get<std::vector<std::pair<int, int>>>();
      r = study::run_pair_sweep(ds, spec_params(pj),
                                spec_selector(spec, study::reference_condition()), pairs, opts);
    } else if (kind == "reciprocity") {
      std::vector<int> discs = {2, 3};
      if (spec.contains("discs")) discs = spec.at("discs").get<std::vector<int>>();
      if (discs.size() != 2) fail(ErrorKind::kParseError, "study spec: discs needs two entries");
      study::RatioBounds bounds;
      if (spec.contains("ratio_bounds")) {
        const auto b = spec.at("ratio_bounds").get<std::vector<double>>();
        if (b.size() != 2) fail(ErrorKind::kParseError, "study spec: ratio_bounds needs two entries");
        bounds = {b[0], b[1]};
      }
      study::Selector cond = spec_selector(spec, study::reference_condition());
      r = study::run_reciprocity(ds, spec_params(pj), cond, discs[0], discs[1], bounds, opts);
    } else if (kind == "amplitude") {
      r = study::run_amplitude_study(ds, spec_params(pj),
                                     spec_get<std::vector<int>>(spec, "amplitudes", ""),
                                     spec_selector(spec, {}), opts);
    } else if (kind == "repeatability") {
      study::GroupKey key = study::GroupKey::kSeries;
      if (spec.contains("group_by")) {
        const auto g = spec.at("group_by").get<std::string>();
        if (g == "plate") {
          key = study::GroupKey::kPlate;
        } else if (g != "series") {
          fail(ErrorKind::kParseError, "study spec: group_by must be series or plate");
        }
      }
      r = study::run_repeatability(ds, spec_params(pj), spec_selector(spec, {}), key, opts);
    } else {
      fail(ErrorKind::kParseError, "study spec: unknown study '" + kind + "'");
    }
  }

  for (report::Format f : formats) {
    for (const auto& p : report::emit_report(r, f, a.out)) {
      out << "wrote " << p.generic_string() << '\n';
    }
  }
  print_summary(r, out);
  return kExitOk;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::kAllZeroInBand:
      return kExitAllZero;
    case ErrorKind::kMissingRecord:
    case ErrorKind::kUnpairedRecord:
    case ErrorKind::kInsufficientRepetitions:
      return kExitMissing;
    default:
      return kExitInvalid;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sideband peak count index toolkit", "spci"};
  app.require_subcommand(1);

  ComputeArgs compute;
  auto* c_compute = app.add_subcommand("compute", "SPC-I of one waveform file");
  add_compute(*c_compute, compute);

  auto* c_synth = app.add_subcommand("synth", "Write a synthetic waveform or dataset");
  c_synth->require_subcommand(1);

  Rc1Args rc1;
  auto* c_rc1 = c_synth->add_subcommand("rc1", "Single-cycle raised-cosine burst");
  add_common(*c_rc1, rc1.common);
  c_rc1->add_option("--u0", rc1.u0, "Peak amplitude")->capture_default_str();
  c_rc1->add_option("--fc", rc1.fc, "Centre frequency, Hz")->capture_default_str();
  c_rc1->add_option("--delay", rc1.delay, "Start delay, s")->capture_default_str();

  QmixArgs qmix;
  auto* c_qmix = c_synth->add_subcommand("qmix", "Multi-tone strain through a quadratic law");
  add_common(*c_qmix, qmix.common);
  add_tones(*c_qmix, qmix.tones);
  c_qmix->add_option("--e0", qmix.e0)->capture_default_str();
  c_qmix->add_option("--e1", qmix.e1)->capture_default_str();
  c_qmix->add_option("--amplitude", qmix.amplitude)->capture_default_str();

  HmixArgs hmix;
  auto* c_hmix = c_synth->add_subcommand("hmix", "Multi-tone field with A^p mixing lines");
  add_common(*c_hmix, hmix.common);
  add_tones(*c_hmix, hmix.tones);
  c_hmix->add_option("--e0", hmix.e0)->capture_default_str();
  c_hmix->add_option("--h1", hmix.h1)->capture_default_str();
  c_hmix->add_option("--amplitude", hmix.amplitude)->capture_default_str();
  c_hmix->add_option("--exponent", hmix.exponent)->capture_default_str();

  ModalArgs modal;
  auto* c_modal = c_synth->add_subcommand("modal", "Burst response of a modal plate model");
  add_common(*c_modal, modal.common);
  c_modal->add_option("--modes", modal.modes_csv, "CSV of f_hz,Q,gain rows");
  c_modal->add_option("--random-modes", modal.random_modes, "Draw this many modes from --seed");
  c_modal->add_option("--f-lo", modal.f_lo)->capture_default_str();
  c_modal->add_option("--f-hi", modal.f_hi)->capture_default_str();
  c_modal->add_option("--q-lo", modal.q_lo)->capture_default_str();
  c_modal->add_option("--q-hi", modal.q_hi)->capture_default_str();
  c_modal->add_option("--seed", modal.seed)->capture_default_str();
  c_modal->add_option("--noise-rms", modal.noise_rms)->capture_default_str();
  c_modal->add_option("--realization", modal.realization)->capture_default_str();
  c_modal->add_option("--n-avg", modal.n_avg)->capture_default_str();
  c_modal->add_option("--nonlinearity", modal.nonlinearity, "quadratic or hertzian");
  c_modal->add_option("--strength", modal.strength)->capture_default_str();
  c_modal->add_option("--exponent", modal.exponent)->capture_default_str();
  c_modal->add_option("--u0", modal.u0)->capture_default_str();
  c_modal->add_option("--fc", modal.fc)->capture_default_str();

  DatasetArgs dataset;
  auto* c_dataset = c_synth->add_subcommand("dataset", "Synthetic multi-plate dataset + manifest");
  c_dataset->add_option("--out-dir", dataset.out_dir);
  c_dataset->add_option("--plates", dataset.plates)->delimiter(',');
  c_dataset->add_option("--pcts", dataset.pcts)->delimiter(',');
  c_dataset->add_option("--repetitions", dataset.repetitions)->capture_default_str();
  c_dataset->add_option("--series", dataset.series);
  c_dataset->add_option("--noise-rms", dataset.noise_rms)->capture_default_str();
  c_dataset->add_option("--dc-offset", dataset.dc_offset)->capture_default_str();
  c_dataset->add_option("--nonlinearity", dataset.nonlinearity, "quadratic or hertzian");
  c_dataset->add_option("--strength", dataset.strength)->capture_default_str();
  c_dataset->add_option("--seed", dataset.seed)->capture_default_str();
  c_dataset->add_flag("--non-reciprocal", dataset.non_reciprocal);
  c_dataset->add_option("--lost", dataset.lost, "PLATE:DISC, repeatable");
  c_dataset->add_option("--samples", dataset.n_samples)->capture_default_str();
  c_dataset->add_option("--rate", dataset.rate)->capture_default_str();

  StudyArgs st;
  auto* c_study = app.add_subcommand("study", "Run a study over a dataset manifest");
  c_study->add_option("--manifest", st.manifest, "Dataset manifest (JSON)");
  c_study->add_option("--spec", st.spec, "Study spec (JSON)");
  c_study->add_option("--out", st.out, "Report path stem");
  c_study->add_option("--format", st.formats, "csv, json or plot; repeatable");
  c_study->add_option("--threads", st.threads, "Worker threads, 0 = all cores");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (c_compute->parsed()) return cmd_compute(compute, out);
    if (c_rc1->parsed()) return cmd_rc1(rc1, out);
    if (c_qmix->parsed()) return cmd_qmix(qmix, out);
    if (c_hmix->parsed()) return cmd_hmix(hmix, out);
    if (c_modal->parsed()) return cmd_modal(modal, out);
    if (c_dataset->parsed()) return cmd_dataset(dataset, out);
    if (c_study->parsed()) return cmd_study(st, out);
  } catch (const UsageError& e) {
    err << "error: " << e.message << '\n';
    return kExitInvalid;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  err << "error: no command\n";
  return kExitInvalid;
}

}  // namespace spci::cli
