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

#include <doctest.h>

#include <random>
#include <vector>

#include "ltp/kernels.hpp"

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("simd kernels agree with the scalar reference") {
  const bool has_simd = ltp::kernels::set_backend(ltp::kernels::Backend::kSimd);
  if (!has_simd) {
    MESSAGE("no SIMD backend on this machine; scalar only");
    return;
  }
  std::mt19937_64 rng(7);
  // Lengths straddling the vector width, including remainders.
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 13u, 50u, 257u}) {
    const auto a = random_vec(n, rng);
    const auto b = random_vec(n, rng);

    const double dot_ref = ltp::kernels::scalar::dot(a.data(), b.data(), n);
    const double dot_simd = ltp::kernels::dot(a.data(), b.data(), n);
    CHECK(dot_simd == doctest::Approx(dot_ref).epsilon(1e-12));

    const double nrm_ref = ltp::kernels::scalar::squared_norm(a.data(), n);
    const double nrm_simd = ltp::kernels::squared_norm(a.data(), n);
    CHECK(nrm_simd == doctest::Approx(nrm_ref).epsilon(1e-12));

    std::vector<double> y_ref = b, y_simd = b;
    ltp::kernels::scalar::axpy(1.7, a.data(), y_ref.data(), n);
    ltp::kernels::axpy(1.7, a.data(), y_simd.data(), n);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(y_simd[k] == doctest::Approx(y_ref[k]).epsilon(1e-12));
    }
  }
  ltp::kernels::set_backend(ltp::kernels::Backend::kSimd);
}

TEST_CASE("backend switching") {
  REQUIRE(ltp::kernels::set_backend(ltp::kernels::Backend::kScalar));
  CHECK(ltp::kernels::active_backend() == "scalar");
  const double a[] = {1.0, 2.0, 3.0};
  const double b[] = {4.0, 5.0, 6.0};
  CHECK(ltp::kernels::dot(a, b, 3) == doctest::Approx(32.0));
  // Restore the default for the rest of the suite.
  ltp::kernels::set_backend(ltp::kernels::Backend::kSimd);
}
