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
#include <optional>
#include <span>
#include <string_view>

namespace spci::stats {

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double sample_std = 0.0;      // n - 1 denominator; 0 when n == 1
  double population_std = 0.0;  // n denominator
  double min = 0.0;
  double max = 0.0;

  double spread() const { return max - min; }
  /// sample_std / |mean|, 0 when the mean is 0.
  double relative_error() const;
};

/// Two-pass mean and deviations. Requires at least one value.
Summary summarize(std::span<const double> values);

/// Kendall tau-b between x and y. Empty when either sequence is constant
/// (the statistic is undefined) or fewer than two points are given.
std::optional<double> kendall_tau_b(std::span<const double> x,
                                    std::span<const double> y);

enum class TripleShape { kIncreasing, kDecreasing, kConstant, kNonMonotone };

/// Shape of y1, y2, y3 taken in order: weakly monotone with a net change is
/// increasing/decreasing, all equal is constant, anything else non-monotone.
TripleShape classify_triple(double y1, double y2, double y3);

std::string_view to_string(TripleShape s);

}  // namespace spci::stats
