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

#include <functional>
#include <span>
#include <vector>

namespace ltp {

// Digamma Psi(x) = d/dx ln Gamma(x), for x > 0. Recurrence to x >= 6, then
// the asymptotic series.
double digamma(double x);

// log(sum_i exp(v[i])) with max subtraction; -inf for an empty span.
double log_sum_exp(std::span<const double> v);

// Entropy of Beta(k1, k2).
double beta_entropy(double kappa1, double kappa2);

// Entropy of Bernoulli(p), natural log. p outside (0,1) yields 0.
double bernoulli_entropy(double p);

// 1 / (1 + exp(x)), overflow-safe.
double logistic_neg(double x);

// Maximize a concave unimodal function on [lo, hi] by golden-section search.
// Returns the abscissa of the maximum to absolute tolerance xtol.
double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double xtol = 1e-6);

}  // namespace ltp
