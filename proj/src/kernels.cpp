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

#include "ltp/kernels.hpp"

namespace ltp::kernels {

#if defined(LTP_KERNELS_AVX2) || defined(LTP_KERNELS_NEON)
namespace simd {
double dot(const double* a, const double* b, std::size_t n);
double squared_norm(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace simd
#endif

namespace {

using DotFn = double (*)(const double*, const double*, std::size_t);
using NormFn = double (*)(const double*, std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);

struct Dispatch {
  DotFn dot;
  NormFn squared_norm;
  AxpyFn axpy;
  std::string_view name;
};

constexpr Dispatch kScalarTable{scalar::dot, scalar::squared_norm,
                                scalar::axpy, "scalar"};

bool simd_available() {
#if defined(LTP_KERNELS_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#elif defined(LTP_KERNELS_NEON)
  return true;
#else
  return false;
#endif
}

Dispatch simd_table() {
#if defined(LTP_KERNELS_AVX2)
  return {simd::dot, simd::squared_norm, simd::axpy, "avx2"};
#elif defined(LTP_KERNELS_NEON)
  return {simd::dot, simd::squared_norm, simd::axpy, "neon"};
#else
  return kScalarTable;
#endif
}

Dispatch g_active = simd_available() ? simd_table() : kScalarTable;

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  return g_active.dot(a, b, n);
}

double squared_norm(const double* a, std::size_t n) {
  return g_active.squared_norm(a, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  g_active.axpy(alpha, x, y, n);
}

std::string_view active_backend() { return g_active.name; }

bool set_backend(Backend backend) {
  if (backend == Backend::kScalar) {
    g_active = kScalarTable;
    return true;
  }
  if (!simd_available()) return false;
  g_active = simd_table();
  return true;
}

}  // namespace ltp::kernels
