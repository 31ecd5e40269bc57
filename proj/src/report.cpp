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

#include "spci/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "spci/error.hpp"

namespace spci::report {
namespace fs = std::filesystem;

namespace {

using ingest::compare_labels;

struct LabelLess {
  bool operator()(const std::string& a, const std::string& b) const {
    return compare_labels(a, b) < 0;
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  f.flush();
  if (!f) fail(ErrorKind::kIoError, "cannot write " + path.string());
}

fs::path with_suffix(const fs::path& stem, const std::string& suffix) {
  return fs::path(stem.string() + suffix);
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) s += ',';
    s += csv_field(fields[i]);
  }
  return s + "\r\n";
}

std::string plot_label(const std::string& s) {
  if (s.find_first_of(" \t\"") == std::string::npos && !s.empty()) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? '\'' : c;
  return q + "\"";
}

std::string norm_scope_name(NormScope s) {
  return s == NormScope::kBand ? "band" : "full";
}

std::string params_line(const SpcParams& p) {
  return "f_min=" + format_number(p.band.f_min) +
         " f_max=" + format_number(p.band.f_max) +
         " thr_min=" + format_number(p.grid.thr_min) +
         " thr_step=" + format_number(p.grid.thr_step) +
         " thr_max=" + format_number(p.grid.thr_max) +
         " n_thr=" + std::to_string(p.grid.count()) +
         " dc_correct=" + (p.preprocess.dc_correct ? "true" : "false") +
         " zero_pad=" + (p.preprocess.zero_pad ? "true" : "false") +
         " norm_scope=" + norm_scope_name(p.norm_scope);
}

std::string rows_csv(const study::StudyResult& r) {
  std::string s = csv_line({"group", "series", "x", "spc_index"});
  for (const auto& row : r.rows) {
    s += csv_line({row.group, row.series, row.x ? format_number(*row.x) : "",
                   format_number(row.value)});
  }
  return s;
}

std::string stats_csv(const study::StudyResult& r) {
  std::string s = csv_line({"group", "n", "mean", "sample_std", "population_std",
                            "relative_error", "min", "max", "spread"});
  for (const auto& g : r.stats) {
    const auto& m = g.summary;
    s += csv_line({g.group, std::to_string(m.n), format_number(m.mean),
                   format_number(m.sample_std), format_number(m.population_std),
                   format_number(m.relative_error()), format_number(m.min),
                   format_number(m.max), format_number(m.spread())});
  }
  return s;
}

std::string params_csv(const study::StudyResult& r) {
  std::string s = csv_line({"label", "key", "value"});
  s += csv_line({"", "study", r.study});
  s += csv_line({"", "selector", r.selector});
  for (const auto& ps : r.params) {
    const Json j = params_to_json(ps.params);
    for (const auto& [k, v] : j.items()) {
      s += csv_line({ps.label, k, v.is_string() ? v.get<std::string>() : v.dump()});
    }
  }
  return s;
}

std::string tau_text(const std::optional<double>& tau) {
  return tau ? format_number(*tau) : "NaN";
}

std::string plot_table(const study::StudyResult& r) {
  std::ostringstream o;
  o << "# study: " << r.study << "\n# selector: " << r.selector << '\n';
  for (const auto& ps : r.params) {
    o << "# params " << ps.label << ": " << params_line(ps.params) << '\n';
  }
  const bool by_x =
      !r.rows.empty() &&
      std::all_of(r.rows.begin(), r.rows.end(), [](const auto& row) { return row.x.has_value(); });

  std::set<std::string, LabelLess> columns;
  for (const auto& row : r.rows) columns.insert(by_x ? row.group : row.series);

  std::map<std::string, std::map<std::string, double>, LabelLess> by_group;
  std::map<double, std::map<std::string, double>> by_xval;
  for (const auto& row : r.rows) {
    if (by_x) {
      by_xval[*row.x][row.group] = row.value;
    } else {
      by_group[row.group][row.series] = row.value;
    }
  }

  o << "# columns: " << (by_x ? "x" : "group");
  for (const auto& c : columns) o << ' ' << plot_label(c);
  o << '\n';
  auto emit = [&](const std::string& first, const std::map<std::string, double>& cells) {
    o << first;
    for (const auto& c : columns) {
      const auto it = cells.find(c);
      o << ' ' << (it == cells.end() ? std::string("NaN") : format_number(it->second));
    }
    o << '\n';
  };
  if (by_x) {
    for (const auto& [x, cells] : by_xval) emit(format_number(x), cells);
  } else {
    for (const auto& [g, cells] : by_group) emit(plot_label(g), cells);
  }
  return o.str();
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  if (name == "plot") return Format::kPlot;
  fail(ErrorKind::kInvalidArgument, "unknown report format '" + std::string(name) + "'");
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return "NaN";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Json rounded(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::strtod(format_number(v).c_str(), nullptr);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

Json params_to_json(const SpcParams& p) {
  Json j;
  j["f_min"] = rounded(p.band.f_min);
  j["f_max"] = rounded(p.band.f_max);
  j["thr_min"] = rounded(p.grid.thr_min);
  j["thr_step"] = rounded(p.grid.thr_step);
  j["thr_max"] = rounded(p.grid.thr_max);
  j["n_thr"] = p.grid.count();
  j["dc_correct"] = p.preprocess.dc_correct;
  j["zero_pad"] = p.preprocess.zero_pad;
  j["norm_scope"] = norm_scope_name(p.norm_scope);
  j["window"] = "none";
  j["peak_rule"] = "strict-local-max-leftmost-plateau";
  j["threshold_compare"] = "greater-than";
  return j;
}

Json result_to_json(const study::StudyResult& r) {
  Json j;
  j["schema"] = 1;
  j["study"] = r.study;
  j["selector"] = r.selector;
  Json params = Json::array();
  for (const auto& ps : r.params) {
    params.push_back({{"label", ps.label}, {"params", params_to_json(ps.params)}});
  }
  j["params"] = std::move(params);

  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json jr;
    jr["group"] = row.group;
    jr["series"] = row.series;
    jr["x"] = row.x ? rounded(*row.x) : Json(nullptr);
    jr["spc_index"] = rounded(row.value);
    jr["counts"] = row.curve.counts;
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);

  Json stats = Json::array();
  for (const auto& g : r.stats) {
    const auto& m = g.summary;
    stats.push_back({{"group", g.group},
                     {"n", m.n},
                     {"mean", rounded(m.mean)},
                     {"sample_std", rounded(m.sample_std)},
                     {"population_std", rounded(m.population_std)},
                     {"relative_error", rounded(m.relative_error())},
                     {"min", rounded(m.min)},
                     {"max", rounded(m.max)},
                     {"spread", rounded(m.spread())}});
  }
  j["stats"] = std::move(stats);

  Json rev = Json::array();
  for (const auto& x : r.reversals) {
    rev.push_back({{"variant", x.variant},
                   {"grid_a", x.grid_a},
                   {"grid_b", x.grid_b},
                   {"group_a", x.group_a},
                   {"group_b", x.group_b},
                   {"a_under_grid_a", rounded(x.a_under_grid_a)},
                   {"b_under_grid_a", rounded(x.b_under_grid_a)},
                   {"a_under_grid_b", rounded(x.a_under_grid_b)},
                   {"b_under_grid_b", rounded(x.b_under_grid_b)},
                   {"flag", "ordering-reversal"}});
  }
  j["reversals"] = std::move(rev);

  Json rec = Json::array();
  for (const auto& x : r.reciprocity) {
    rec.push_back({{"plate", x.plate},
                   {"forward_label", x.forward_label},
                   {"backward_label", x.backward_label},
                   {"forward", rounded(x.forward)},
                   {"backward", rounded(x.backward)},
                   {"ratio", rounded(x.ratio)},
                   {"flagged", x.flagged}});
  }
  j["reciprocity"] = std::move(rec);

  Json trends = Json::array();
  for (const auto& t : r.trends) {
    trends.push_back({{"series", t.series},
                      {"n_points", t.n_points},
                      {"kendall_tau", t.tau ? rounded(*t.tau) : Json(nullptr)},
                      {"increasing", t.increasing},
                      {"decreasing", t.decreasing},
                      {"constant", t.constant},
                      {"non_monotone", t.non_monotone}});
  }
  j["trends"] = std::move(trends);

  Json triples = Json::array();
  for (const auto& t : r.triples) {
    triples.push_back({{"series", t.series},
                       {"x", {rounded(t.x[0]), rounded(t.x[1]), rounded(t.x[2])}},
                       {"y", {rounded(t.y[0]), rounded(t.y[1]), rounded(t.y[2])}},
                       {"shape", std::string(stats::to_string(t.shape))}});
  }
  j["triples"] = std::move(triples);

  Json stab = Json::array();
  for (const auto& s : r.stability) {
    stab.push_back({{"n_avg", s.n_avg},
                    {"spc_index", rounded(s.value)},
                    {"delta", rounded(s.delta)},
                    {"stable", s.stable}});
  }
  j["stability"] = std::move(stab);
  j["missing"] = r.missing;
  return j;
}

std::vector<fs::path> emit_report(const study::StudyResult& r, Format format,
                                  const fs::path& stem) {
  std::vector<fs::path> written;
  auto put = [&](const std::string& suffix, const std::string& text) {
    const fs::path p = with_suffix(stem, suffix);
    write_text(p, text);
    written.push_back(p);
  };

  switch (format) {
    case Format::kJson:
      put(".json", result_to_json(r).dump(2) + "\n");
      break;
    case Format::kPlot:
      put(".dat", plot_table(r));
      break;
    case Format::kCsv: {
      put(".csv", rows_csv(r));
      put(".stats.csv", stats_csv(r));
      put(".params.csv", params_csv(r));
      if (!r.reversals.empty()) {
        std::string s = csv_line({"variant", "grid_a", "grid_b", "group_a", "group_b",
                                  "a_under_grid_a", "b_under_grid_a", "a_under_grid_b",
                                  "b_under_grid_b", "flag"});
        for (const auto& x : r.reversals) {
          s += csv_line({x.variant, x.grid_a, x.grid_b, x.group_a, x.group_b,
                         format_number(x.a_under_grid_a), format_number(x.b_under_grid_a),
                         format_number(x.a_under_grid_b), format_number(x.b_under_grid_b),
                         "ordering-reversal"});
        }
        put(".reversals.csv", s);
      }
      if (!r.reciprocity.empty()) {
        std::string s = csv_line({"plate", "forward_label", "backward_label", "forward",
                                  "backward", "ratio", "flagged"});
        for (const auto& x : r.reciprocity) {
          s += csv_line({x.plate, x.forward_label, x.backward_label, format_number(x.forward),
                         format_number(x.backward), format_number(x.ratio),
                         x.flagged ? "true" : "false"});
        }
        put(".reciprocity.csv", s);
      }
      if (!r.trends.empty()) {
        std::string s = csv_line({"series", "n_points", "kendall_tau", "increasing",
                                  "decreasing", "constant", "non_monotone"});
        for (const auto& t : r.trends) {
          s += csv_line({t.series, std::to_string(t.n_points), tau_text(t.tau),
                         std::to_string(t.increasing), std::to_string(t.decreasing),
                         std::to_string(t.constant), std::to_string(t.non_monotone)});
        }
        put(".trends.csv", s);
      }
      if (!r.triples.empty()) {
        std::string s = csv_line({"series", "x1", "x2", "x3", "y1", "y2", "y3", "shape"});
        for (const auto& t : r.triples) {
          s += csv_line({t.series, format_number(t.x[0]), format_number(t.x[1]),
                         format_number(t.x[2]), format_number(t.y[0]), format_number(t.y[1]),
                         format_number(t.y[2]), std::string(stats::to_string(t.shape))});
        }
        put(".triples.csv", s);
      }
      if (!r.stability.empty()) {
        std::string s = csv_line({"n_avg", "spc_index", "delta", "stable"});
        for (const auto& x : r.stability) {
          s += csv_line({std::to_string(x.n_avg), format_number(x.value),
                         format_number(x.delta), x.stable ? "true" : "false"});
        }
        put(".stability.csv", s);
      }
      if (!r.missing.empty()) {
        std::string s = csv_line({"missing"});
        for (const auto& m : r.missing) s += csv_line({m});
        put(".missing.csv", s);
      }
      break;
    }
  }
  return written;
}

}  // namespace spci::report
