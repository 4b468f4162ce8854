// Copyright 2026 The LTP Authors.
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

#include <arm_neon.h>

#include "ltp/kernels.hpp"

namespace ltp::kernels::simd {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    acc = vfmaq_f64(acc, vld1q_f64(a + k), vld1q_f64(b + k));
  }
  double out = vaddvq_f64(acc);
  for (; k < n; ++k) out += a[k] * b[k];
  return out;
}

double squared_norm(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    float64x2_t v = vld1q_f64(a + k);
    acc = vfmaq_f64(acc, v, v);
  }
  double out = vaddvq_f64(acc);
  for (; k < n; ++k) out += a[k] * a[k];
  return out;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  float64x2_t va = vdupq_n_f64(alpha);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    float64x2_t vy = vld1q_f64(y + k);
    vy = vfmaq_f64(vy, va, vld1q_f64(x + k));
    vst1q_f64(y + k, vy);
  }
  for (; k < n; ++k) y[k] += alpha * x[k];
}

}  // namespace ltp::kernels::simd
