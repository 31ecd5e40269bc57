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

#include "spci/study.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <tuple>

#include "spci/error.hpp"
#include "spci/parallel.hpp"
#include "spci/synth.hpp"

namespace spci::study {
namespace {

using ingest::compare_labels;
using ingest::MeasurementMeta;
using ingest::StudyRecord;

struct LabelLess {
  bool operator()(const std::string& a, const std::string& b) const {
    return compare_labels(a, b) < 0;
  }
};

std::string pair_label(int tx, int rx) {
  return std::to_string(tx) + "->" + std::to_string(rx);
}

double curve_mean(const SpcCurve& c) {
  std::size_t total = 0;
  for (std::size_t v : c.counts) total += v;
  return static_cast<double>(total) / static_cast<double>(c.counts.size());
}

// One spectrum, several grids.
std::vector<SpcCurve> curves_for(const Waveform& w, const SpcParams& params,
                                 std::span<const ThresholdGrid> grids) {
  const NormalizedSpectrum s = normalized_spectrum(w, params);
  std::vector<SpcCurve> out;
  out.reserve(grids.size());
  for (const ThresholdGrid& g : grids) out.push_back(spc_curve(s, params.band, g));
  return out;
}

StudyRow make_row(std::string group, std::string series,
                  std::optional<double> x, SpcCurve curve) {
  StudyRow r;
  r.group = std::move(group);
  r.series = std::move(series);
  r.x = x;
  r.value = curve_mean(curve);
  r.curve = std::move(curve);
  return r;
}

// Every record index matching `sel`, in manifest (key) order.
std::vector<std::size_t> select(const DatasetManifest& d, const Selector& sel) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    if (sel.matches(d.records[i].meta)) idx.push_back(i);
  }
  return idx;
}

// Single-grid evaluation of a list of records, in parallel.
std::vector<SpcCurve> evaluate_records(const DatasetManifest& d,
                                       const std::vector<std::size_t>& idx,
                                       const SpcParams& params,
                                       const RunOptions& opts) {
  std::vector<SpcCurve> curves(idx.size());
  parallel_for(idx.size(), opts.threads, [&](std::size_t i) {
    const Waveform w = d.records[idx[i]].load();
    curves[i] = curves_for(w, params, std::span(&params.grid, 1)).front();
  });
  return curves;
}

void add_trends(StudyResult& r) {
  std::map<std::string, std::vector<const StudyRow*>, LabelLess> by_group;
  for (const StudyRow& row : r.rows) by_group[row.group].push_back(&row);
  for (auto& [group, rows] : by_group) {
    std::stable_sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
      return a->x.value_or(0.0) < b->x.value_or(0.0);
    });
    std::vector<double> xs, ys;
    for (const StudyRow* row : rows) {
      xs.push_back(row->x.value_or(0.0));
      ys.push_back(row->value);
    }
    TrendRow t;
    t.series = group;
    t.n_points = rows.size();
    t.tau = stats::kendall_tau_b(xs, ys);
    const std::size_t n = rows.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
          TripleRow tr;
          tr.series = group;
          tr.x[0] = xs[i];
          tr.x[1] = xs[j];
          tr.x[2] = xs[k];
          tr.y[0] = ys[i];
          tr.y[1] = ys[j];
          tr.y[2] = ys[k];
          tr.shape = stats::classify_triple(ys[i], ys[j], ys[k]);
          switch (tr.shape) {
            case stats::TripleShape::kIncreasing: ++t.increasing; break;
            case stats::TripleShape::kDecreasing: ++t.decreasing; break;
            case stats::TripleShape::kConstant: ++t.constant; break;
            case stats::TripleShape::kNonMonotone: ++t.non_monotone; break;
          }
          r.triples.push_back(tr);
        }
      }
    }
    r.trends.push_back(t);
  }
}

}  // namespace

bool Selector::matches(const MeasurementMeta& m) const {
  return (!plate_id || *plate_id == m.plate_id) &&
         (!tx_disc || *tx_disc == m.tx_disc) &&
         (!rx_disc || *rx_disc == m.rx_disc) &&
         (!excitation_pct || *excitation_pct == m.excitation_pct) &&
         (!gain_db || *gain_db == m.gain_db) && (!series || *series == m.series);
}

std::string Selector::describe() const {
  std::string s;
  auto add = [&](const std::string& k, const std::string& v) {
    if (!s.empty()) s += ' ';
    s += k + '=' + v;
  };
  if (plate_id) add("plate", *plate_id);
  if (tx_disc) add("tx", std::to_string(*tx_disc));
  if (rx_disc) add("rx", std::to_string(*rx_disc));
  if (excitation_pct) add("excitation_pct", std::to_string(*excitation_pct));
  if (gain_db) add("gain_db", std::to_string(*gain_db));
  if (series) add("series", *series);
  return s.empty() ? "all" : s;
}

Selector reference_condition() {
  Selector s;
  s.tx_disc = 2;
  s.rx_disc = 3;
  s.excitation_pct = 20;
  s.gain_db = 22;
  return s;
}

std::vector<Variant> preprocess_matrix() {
  return {{"dft", {false, false}},
          {"dft+dc", {true, false}},
          {"fft-pad", {false, true}},
          {"fft-pad+dc", {true, true}}};
}

std::vector<GroupStats> group_stats(const std::vector<StudyRow>& rows) {
  std::map<std::string, std::vector<double>, LabelLess> values;
  for (const StudyRow& r : rows) values[r.group].push_back(r.value);
  std::vector<GroupStats> out;
  for (const auto& [group, v] : values) out.push_back({group, stats::summarize(v)});
  return out;
}

StudyResult run_preprocess_sensitivity(const DatasetManifest& dataset,
                                       const SpcParams& base,
                                       const std::vector<NamedGrid>& grids,
                                       const Selector& selector,
                                       const std::vector<Variant>& variants,
                                       const RunOptions& opts) {
  base.validate();
  require(!grids.empty(), "at least one threshold grid required");
  require(!variants.empty(), "at least one preprocessing variant required");
  for (const NamedGrid& g : grids) g.grid.validate();

  const std::vector<std::string> plates = dataset.plate_ids();
  std::vector<std::size_t> chosen;
  std::vector<std::string> missing;
  for (const std::string& plate : plates) {
    Selector s = selector;
    s.plate_id = plate;
    const std::vector<std::size_t> idx = select(dataset, s);
    if (idx.empty()) {
      missing.push_back(plate + " (" + selector.describe() + ")");
    } else {
      chosen.push_back(idx.front());
    }
  }
  if (!missing.empty() || plates.empty()) {
    std::string msg = "no record for:";
    for (const auto& m : missing) msg += "\n  " + m;
    if (plates.empty()) msg += " empty dataset";
    fail(ErrorKind::kMissingRecord, msg);
  }

  std::vector<ThresholdGrid> plain_grids;
  for (const NamedGrid& g : grids) plain_grids.push_back(g.grid);

  // cells[p][v][g]
  std::vector<std::vector<std::vector<SpcCurve>>> cells(chosen.size());
  parallel_for(chosen.size(), opts.threads, [&](std::size_t p) {
    const Waveform w = dataset.records[chosen[p]].load();
    for (const Variant& v : variants) {
      SpcParams params = base;
      params.preprocess = v.options;
      cells[p].push_back(curves_for(w, params, plain_grids));
    }
  });

  StudyResult r;
  r.study = "preprocess-sensitivity";
  r.selector = selector.describe();
  for (const Variant& v : variants) {
    for (const NamedGrid& g : grids) {
      SpcParams params = base;
      params.preprocess = v.options;
      params.grid = g.grid;
      r.params.push_back({v.label + "|" + g.label, params});
    }
  }
  for (std::size_t p = 0; p < chosen.size(); ++p) {
    for (std::size_t v = 0; v < variants.size(); ++v) {
      for (std::size_t g = 0; g < grids.size(); ++g) {
        r.rows.push_back(make_row(plates[p],
                                  variants[v].label + "|" + grids[g].label,
                                  std::nullopt, cells[p][v][g]));
      }
    }
  }

  auto value = [&](std::size_t p, std::size_t v, std::size_t g) {
    return curve_mean(cells[p][v][g]);
  };
  for (std::size_t v = 0; v < variants.size(); ++v) {
    for (std::size_t ga = 0; ga < grids.size(); ++ga) {
      for (std::size_t gb = ga + 1; gb < grids.size(); ++gb) {
        for (std::size_t a = 0; a < chosen.size(); ++a) {
          for (std::size_t b = a + 1; b < chosen.size(); ++b) {
            const double d_a = value(a, v, ga) - value(b, v, ga);
            const double d_b = value(a, v, gb) - value(b, v, gb);
            if (d_a * d_b < 0.0) {
              r.reversals.push_back({variants[v].label, grids[ga].label,
                                     grids[gb].label, plates[a], plates[b],
                                     value(a, v, ga), value(b, v, ga),
                                     value(a, v, gb), value(b, v, gb)});
            }
          }
        }
      }
    }
  }
  r.stats = group_stats(r.rows);
  return r;
}

StudyResult run_pair_sweep(const DatasetManifest& dataset,
                           const SpcParams& params, const Selector& condition,
                           std::vector<std::pair<int, int>> pairs,
                           const RunOptions& opts) {
  params.validate();
  Selector cond = condition;
  cond.tx_disc.reset();
  cond.rx_disc.reset();
  const std::vector<std::size_t> matching = select(dataset, cond);
  if (pairs.empty()) {
    std::set<std::pair<int, int>> seen;
    for (std::size_t i : matching) {
      const auto& m = dataset.records[i].meta;
      seen.insert({m.tx_disc, m.rx_disc});
    }
    pairs.assign(seen.begin(), seen.end());
  }

  StudyResult r;
  r.study = "pair-sweep";
  r.selector = cond.describe();
  r.params.push_back({"fixed", params});

  std::vector<std::size_t> idx;
  std::vector<std::pair<std::string, std::string>> labels;
  for (const std::string& plate : dataset.plate_ids()) {
    for (const auto& [tx, rx] : pairs) {
      const auto it = std::find_if(matching.begin(), matching.end(), [&](std::size_t i) {
        const auto& m = dataset.records[i].meta;
        return m.plate_id == plate && m.tx_disc == tx && m.rx_disc == rx;
      });
      if (it == matching.end()) {
        r.missing.push_back(plate + " " + pair_label(tx, rx));
        continue;
      }
      idx.push_back(*it);
      labels.emplace_back(plate, pair_label(tx, rx));
    }
  }
  const std::vector<SpcCurve> curves = evaluate_records(dataset, idx, params, opts);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    r.rows.push_back(make_row(labels[i].first, labels[i].second, std::nullopt, curves[i]));
  }
  r.stats = group_stats(r.rows);
  return r;
}

StudyResult run_reciprocity(const DatasetManifest& dataset,
                            const SpcParams& params, const Selector& condition,
                            int disc_a, int disc_b, RatioBounds bounds,
                            const RunOptions& opts) {
  params.validate();
  require(disc_a != disc_b, "reciprocity needs two distinct discs");
  require(bounds.lo > 0.0 && bounds.lo <= 1.0 && bounds.hi >= 1.0,
          "ratio bounds must bracket 1");

  // (plate, excitation, gain, repetition) -> {forward, backward}
  using Setting = std::tuple<std::string, int, int, int>;
  struct Slots {
    std::optional<std::size_t> fwd;
    std::optional<std::size_t> bwd;
  };
  auto setting_less = [](const Setting& a, const Setting& b) {
    if (auto c = compare_labels(std::get<0>(a), std::get<0>(b)); c != 0) return c < 0;
    return std::tie(std::get<1>(a), std::get<2>(a), std::get<3>(a)) <
           std::tie(std::get<1>(b), std::get<2>(b), std::get<3>(b));
  };
  Selector cond = condition;
  cond.tx_disc.reset();
  cond.rx_disc.reset();
  std::map<Setting, Slots, decltype(setting_less)> settings(setting_less);
  for (std::size_t i : select(dataset, cond)) {
    const auto& m = dataset.records[i].meta;
    const Setting key{m.plate_id, m.excitation_pct, m.gain_db, m.repetition};
    if (m.tx_disc == disc_a && m.rx_disc == disc_b) settings[key].fwd = i;
    if (m.tx_disc == disc_b && m.rx_disc == disc_a) settings[key].bwd = i;
  }

  std::vector<std::string> unpaired;
  std::vector<std::size_t> idx;
  std::vector<Setting> order;
  std::map<std::string, std::size_t> per_plate;
  for (const auto& [key, slots] : settings) {
    if (!slots.fwd || !slots.bwd) {
      const std::size_t have = slots.fwd ? *slots.fwd : *slots.bwd;
      unpaired.push_back(ingest::key_of(dataset.records[have].meta).to_string());
      continue;
    }
    idx.push_back(*slots.fwd);
    idx.push_back(*slots.bwd);
    order.push_back(key);
    ++per_plate[std::get<0>(key)];
  }
  if (!unpaired.empty()) {
    std::string msg = "records without a reverse-direction counterpart:";
    for (const auto& u : unpaired) msg += "\n  " + u;
    fail(ErrorKind::kUnpairedRecord, msg);
  }

  const std::vector<SpcCurve> curves = evaluate_records(dataset, idx, params, opts);
  StudyResult r;
  r.study = "reciprocity";
  r.selector = cond.describe();
  r.params.push_back({"fixed", params});
  const std::string fwd_label = pair_label(disc_a, disc_b);
  const std::string bwd_label = pair_label(disc_b, disc_a);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& [plate, pct, gain, rep] = order[i];
    std::string suffix;
    if (per_plate[plate] > 1) {
      suffix = " " + std::to_string(pct) + "% " + std::to_string(gain) + "dB r" +
               std::to_string(rep);
    }
    StudyRow f = make_row(plate, fwd_label + suffix, std::nullopt, curves[2 * i]);
    StudyRow b = make_row(plate, bwd_label + suffix, std::nullopt, curves[2 * i + 1]);
    ReciprocityRow rr;
    rr.plate = plate + suffix;
    rr.forward_label = f.series;
    rr.backward_label = b.series;
    rr.forward = f.value;
    rr.backward = b.value;
    if (f.value == 0.0) {
      rr.ratio = b.value == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    } else {
      rr.ratio = b.value / f.value;
    }
    rr.flagged = !(rr.ratio >= bounds.lo && rr.ratio <= bounds.hi);
    r.reciprocity.push_back(rr);
    r.rows.push_back(std::move(f));
    r.rows.push_back(std::move(b));
  }
  r.stats = group_stats(r.rows);
  return r;
}

StudyResult run_amplitude_study(const DatasetManifest& dataset,
                                const SpcParams& params,
                                const std::vector<int>& amplitudes_pct,
                                const Selector& selector,
                                const RunOptions& opts) {
  params.validate();
  require(!amplitudes_pct.empty(), "at least one amplitude required");
  const std::set<int> wanted(amplitudes_pct.begin(), amplitudes_pct.end());

  // First record (lowest repetition) per (series, amplitude).
  std::map<std::pair<std::string, int>, std::size_t> pick;
  for (std::size_t i : select(dataset, selector)) {
    const auto& m = dataset.records[i].meta;
    if (!wanted.count(m.excitation_pct)) continue;
    const std::string series = m.plate_id + " " + pair_label(m.tx_disc, m.rx_disc);
    pick.emplace(std::make_pair(series, m.excitation_pct), i);
  }
  std::vector<std::size_t> idx;
  std::vector<std::pair<std::string, int>> labels;
  for (const auto& [key, i] : pick) {
    idx.push_back(i);
    labels.push_back(key);
  }
  const std::vector<SpcCurve> curves = evaluate_records(dataset, idx, params, opts);

  StudyResult r;
  r.study = "amplitude";
  r.selector = selector.describe();
  r.params.push_back({"fixed", params});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    r.rows.push_back(make_row(labels[i].first, "", static_cast<double>(labels[i].second),
                              curves[i]));
  }
  std::stable_sort(r.rows.begin(), r.rows.end(), [](const StudyRow& a, const StudyRow& b) {
    if (auto c = compare_labels(a.group, b.group); c != 0) return c < 0;
    return *a.x < *b.x;
  });
  add_trends(r);
  r.stats = group_stats(r.rows);
  return r;
}

StudyResult run_amplitude_study(const std::vector<AmplitudeSeries>& series,
                                const std::vector<double>& amplitudes,
                                const SpcParams& params,
                                const RunOptions& opts) {
  params.validate();
  require(!series.empty(), "at least one series required");
  require(!amplitudes.empty(), "at least one amplitude required");
  for (double a : amplitudes) require(a > 0.0, "amplitudes must be positive");

  const std::size_t na = amplitudes.size();
  std::vector<SpcCurve> curves(series.size() * na);
  parallel_for(curves.size(), opts.threads, [&](std::size_t i) {
    const Waveform w = series[i / na].generate(amplitudes[i % na]);
    curves[i] = curves_for(w, params, std::span(&params.grid, 1)).front();
  });

  StudyResult r;
  r.study = "amplitude";
  r.selector = "generator";
  r.params.push_back({"fixed", params});
  for (std::size_t i = 0; i < curves.size(); ++i) {
    r.rows.push_back(make_row(series[i / na].label, "", amplitudes[i % na], curves[i]));
  }
  add_trends(r);
  r.stats = group_stats(r.rows);
  return r;
}

bool amplitude_invariant(const StudyResult& result) {
  std::map<std::string, double> first;
  for (const StudyRow& row : result.rows) {
    const auto [it, inserted] = first.emplace(row.group, row.value);
    if (!inserted && it->second != row.value) return false;
  }
  return !result.rows.empty();
}

StudyResult run_repeatability(const DatasetManifest& dataset,
                              const SpcParams& params, const Selector& selector,
                              GroupKey key, const RunOptions& opts) {
  params.validate();
  const std::vector<std::size_t> idx = select(dataset, selector);
  const std::vector<SpcCurve> curves = evaluate_records(dataset, idx, params, opts);

  StudyResult r;
  r.study = "repeatability";
  r.selector = selector.describe();
  r.params.push_back({"fixed", params});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto& m = dataset.records[idx[i]].meta;
    std::string group = m.plate_id;
    if (key == GroupKey::kSeries && !m.series.empty()) group = m.series;
    r.rows.push_back(make_row(group, "rep " + std::to_string(m.repetition),
                              std::nullopt, curves[i]));
  }
  r.stats = group_stats(r.rows);
  std::string short_groups;
  for (const GroupStats& g : r.stats) {
    if (g.summary.n < 2) short_groups += "\n  " + g.group;
  }
  if (r.stats.empty() || !short_groups.empty()) {
    fail(ErrorKind::kInsufficientRepetitions,
         "need at least two repetitions per group:" +
             (short_groups.empty() ? std::string(" no records selected") : short_groups));
  }
  return r;
}

StudyResult run_averaging_study(
    const std::function<Waveform(std::uint64_t)>& generator,
    const std::vector<std::size_t>& n_avg_values, const SpcParams& params,
    double tolerance, std::size_t stable_from, const RunOptions& opts) {
  params.validate();
  require(!n_avg_values.empty(), "at least one averaging count required");
  for (std::size_t n : n_avg_values) require(n >= 1, "averaging counts must be >= 1");
  require(tolerance >= 0.0, "tolerance must be >= 0");

  std::vector<SpcCurve> curves(n_avg_values.size());
  parallel_for(curves.size(), opts.threads, [&](std::size_t i) {
    const Waveform w = synth::average_realizations(generator, n_avg_values[i]);
    curves[i] = curves_for(w, params, std::span(&params.grid, 1)).front();
  });

  StudyResult r;
  r.study = "averaging";
  r.selector = "generator";
  r.params.push_back({"fixed", params});
  const std::size_t ref = static_cast<std::size_t>(
      std::max_element(n_avg_values.begin(), n_avg_values.end()) - n_avg_values.begin());
  const double ref_value = curve_mean(curves[ref]);
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const std::size_t n = n_avg_values[i];
    StudyRow row = make_row("averaging", "n_avg=" + std::to_string(n),
                            static_cast<double>(n), curves[i]);
    StabilityRow s;
    s.n_avg = n;
    s.value = row.value;
    s.delta = std::abs(row.value - ref_value);
    s.stable = n >= stable_from && s.delta <= tolerance;
    r.stability.push_back(s);
    r.rows.push_back(std::move(row));
  }
  r.stats = group_stats(r.rows);
  return r;
}

}  // namespace spci::study
