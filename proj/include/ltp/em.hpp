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

#include <cstdint>
#include <vector>

#include "ltp/inference.hpp"
#include "ltp/perm_models.hpp"

namespace ltp {

struct MStepBounds {
  double mu_min = 1e-3;
  double mu_max = ModelParams::kMuMax;
};

// Maximizes sum_i [phi_i * bound_i(lambda) + (1 - phi_i) * ln f_i(mu)].
// The objective separates: mu by 1-D concave search on the f terms, lambda
// likewise on the g terms with zeta re-tightened at each trial point. When
// all phi vanish the lambda direction is flat and the previous value is
// kept; symmetrically for mu.
std::pair<double, double> m_step(const PreparedDataset& data,
                                 const VariationalState& state,
                                 const ModelParams& current,
                                 const MStepBounds& bounds = {},
                                 int threads = 1);

struct EmIteration {
  int iter = 0;
  double lambda = 0.0;
  double mu = 0.0;
  double elbo = 0.0;
};

struct EmOptions {
  double tol = 1e-3;  // absolute, component-wise on (lambda, mu)
  int max_iters = 50;
  InferenceOptions inf;
};

struct EmResult {
  ModelParams params;
  VariationalState state;
  std::vector<EmIteration> trace;
  bool converged = false;
};

// Alternates the E-step (LTP-INF warm-started from the previous state) with
// the (lambda, mu) M-step until both parameters stop moving.
EmResult run_ltp_em(const PreparedDataset& data, const ModelParams& init,
                    const EmOptions& options);

EmResult run_ltp_em(const std::vector<QueryObservation>& data,
                    const ThetaMap& theta_by_item, const EmOptions& options);

}  // namespace ltp
