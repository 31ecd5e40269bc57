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

#include "spci/fft.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace spci {
namespace {

constexpr std::size_t kMaxDirectRadix = 256;

// Plain complex product; avoids the NaN/Inf recovery path of operator*.
inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(),
          a.real() * b.imag() + a.imag() * b.real()};
}

std::vector<std::size_t> factorize(std::size_t n) {
  std::vector<std::size_t> f;
  for (std::size_t p : {4u, 2u, 3u, 5u}) {
    while (n % p == 0) {
      f.push_back(p);
      n /= p;
    }
  }
  for (std::size_t p = 7; p * p <= n; p += 2) {
    while (n % p == 0) {
      f.push_back(p);
      n /= p;
    }
  }
  if (n > 1) f.push_back(n);
  return f;
}

std::vector<cplx> twiddle_table(std::size_t n) {
  std::vector<cplx> tw(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) /
                         static_cast<double>(n);
    tw[j] = {std::cos(angle), std::sin(angle)};
  }
  return tw;
}

struct Plan {
  std::size_t n;
  std::vector<std::size_t> factors;
  std::vector<cplx> tw;
};

// Decimation in time; out receives the n-point transform of x[0], x[stride],
// ... . The twiddle table is shared by all recursion levels.
void mixed_radix(const cplx* x, std::size_t stride, cplx* out, std::size_t n,
                 const std::size_t* factor, const Plan& plan,
                 std::vector<cplx>& scratch) {
  if (n == 1) {
    out[0] = x[0];
    return;
  }
  const std::size_t p = *factor;
  const std::size_t m = n / p;
  for (std::size_t r = 0; r < p; ++r) {
    mixed_radix(x + r * stride, stride * p, out + r * m, m, factor + 1, plan,
                scratch);
  }

  const std::size_t step = plan.n / n;
  cplx* s = scratch.data();
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t r = 0; r < p; ++r) s[r] = out[r * m + k];
    if (p == 2) {
      const cplx t = mul(s[1], plan.tw[k * step]);
      out[k] = s[0] + t;
      out[k + m] = s[0] - t;
      continue;
    }
    for (std::size_t q = 0; q < p; ++q) {
      const std::size_t idx = k + q * m;
      cplx acc = s[0];
      for (std::size_t r = 1; r < p; ++r) {
        acc += mul(s[r], plan.tw[((r * idx) % n) * step]);
      }
      out[idx] = acc;
    }
  }
}

std::vector<cplx> run_mixed_radix(std::span<const cplx> input,
                                  const Plan& plan) {
  std::vector<cplx> out(plan.n);
  std::size_t max_radix = 1;
  for (std::size_t f : plan.factors) max_radix = std::max(max_radix, f);
  std::vector<cplx> scratch(max_radix);
  mixed_radix(input.data(), 1, out.data(), plan.n, plan.factors.data(), plan,
              scratch);
  return out;
}

Plan make_plan(std::size_t n) { return {n, factorize(n), twiddle_table(n)}; }

std::vector<cplx> bluestein(std::span<const cplx> input) {
  const std::size_t n = input.size();
  const std::size_t m = std::bit_ceil(2 * n - 1);
  const Plan plan = make_plan(m);

  // w[j] = exp(-i pi j^2 / n); j^2 reduced mod 2n keeps the angle small.
  std::vector<cplx> chirp(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jj = (j * j) % (2 * n);
    const double angle =
        -std::numbers::pi * static_cast<double>(jj) / static_cast<double>(n);
    chirp[j] = {std::cos(angle), std::sin(angle)};
  }

  std::vector<cplx> a(m), b(m);
  for (std::size_t j = 0; j < n; ++j) a[j] = mul(input[j], chirp[j]);
  b[0] = std::conj(chirp[0]);
  for (std::size_t j = 1; j < n; ++j) b[j] = b[m - j] = std::conj(chirp[j]);

  std::vector<cplx> fa = run_mixed_radix(a, plan);
  const std::vector<cplx> fb = run_mixed_radix(b, plan);
  for (std::size_t j = 0; j < m; ++j) fa[j] = std::conj(mul(fa[j], fb[j]));
  std::vector<cplx> conv = run_mixed_radix(fa, plan);

  const double inv_m = 1.0 / static_cast<double>(m);
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = mul(std::conj(conv[k]) * inv_m, chirp[k]);
  }
  return out;
}

}  // namespace

std::vector<cplx> dft(std::span<const cplx> input) {
  const std::size_t n = input.size();
  if (n <= 1) return {input.begin(), input.end()};
  const std::vector<std::size_t> factors = factorize(n);
  if (factors.back() > kMaxDirectRadix) return bluestein(input);
  return run_mixed_radix(input, {n, factors, twiddle_table(n)});
}

std::vector<cplx> idft(std::span<const cplx> input) {
  std::vector<cplx> tmp(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) tmp[i] = std::conj(input[i]);
  std::vector<cplx> out = dft(tmp);
  const double inv_n = 1.0 / static_cast<double>(input.size());
  for (cplx& v : out) v = std::conj(v) * inv_n;
  return out;
}

std::vector<cplx> dft_real(std::span<const double> input) {
  std::vector<cplx> tmp(input.begin(), input.end());
  return dft(tmp);
}

}  // namespace spci
