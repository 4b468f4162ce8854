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

#pragma once

#include <cstddef>
#include <string_view>

namespace ltp::kernels {

// Vector kernels for the topic-dimension inner loops. Scalar reference
// implementations always exist; a SIMD variant (AVX2 on x86-64, NEON on
// aarch64) is selected once at startup when the CPU supports it.

// sum_k a[k] * b[k]
double dot(const double* a, const double* b, std::size_t n);

// sum_k a[k]^2
double squared_norm(const double* a, std::size_t n);

// y[k] += alpha * x[k]
void axpy(double alpha, const double* x, double* y, std::size_t n);

enum class Backend { kScalar, kSimd };

// Name of the backend currently in use ("scalar", "avx2", "neon").
std::string_view active_backend();

// Force a specific backend. Returns false if the requested backend is not
// available on this machine. Intended for equivalence tests and the
// --no-simd escape hatch.
bool set_backend(Backend backend);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_norm(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

}  // namespace ltp::kernels
