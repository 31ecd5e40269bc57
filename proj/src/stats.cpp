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

#include "spci/stats.hpp"

#include <algorithm>
#include <cmath>

#include "spci/error.hpp"

namespace spci::stats {

double Summary::relative_error() const {
  return mean == 0.0 ? 0.0 : sample_std / std::abs(mean);
}

Summary summarize(std::span<const double> values) {
  require(!values.empty(), "cannot summarize an empty sample");
  Summary s;
  s.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.population_std = std::sqrt(ss / static_cast<double>(s.n));
  s.sample_std = s.n > 1 ? std::sqrt(ss / static_cast<double>(s.n - 1)) : 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

std::optional<double> kendall_tau_b(std::span<const double> x,
                                    std::span<const double> y) {
  require(x.size() == y.size(), "kendall tau needs equal-length inputs");
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  long long concordant = 0;
  long long discordant = 0;
  long long ties_x = 0;  // pairs tied in x only
  long long ties_y = 0;  // pairs tied in y only
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[j] - x[i];
      const double dy = y[j] - y[i];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ++ties_x;
      } else if (dy == 0.0) {
        ++ties_y;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n1 = static_cast<double>(concordant + discordant + ties_x);
  const double n2 = static_cast<double>(concordant + discordant + ties_y);
  if (n1 == 0.0 || n2 == 0.0) return std::nullopt;
  return static_cast<double>(concordant - discordant) / std::sqrt(n1 * n2);
}

TripleShape classify_triple(double y1, double y2, double y3) {
  if (y1 == y2 && y2 == y3) return TripleShape::kConstant;
  if (y1 <= y2 && y2 <= y3) return TripleShape::kIncreasing;
  if (y1 >= y2 && y2 >= y3) return TripleShape::kDecreasing;
  return TripleShape::kNonMonotone;
}

std::string_view to_string(TripleShape s) {
  switch (s) {
    case TripleShape::kIncreasing: return "increasing";
    case TripleShape::kDecreasing: return "decreasing";
    case TripleShape::kConstant: return "constant";
    case TripleShape::kNonMonotone: return "non-monotone";
  }
  return "?";
}

}  // namespace spci::stats
