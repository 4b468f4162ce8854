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
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ltp/perm_models.hpp"
#include "ltp/rankings.hpp"

namespace ltp {

// Observations compiled to index form: per query, the sigma-rank of each pi
// position plus an index into the deduplicated theta matrix.
struct PreparedDataset {
  int T = 0;
  std::vector<std::vector<double>> thetas;
  std::vector<double> theta_sq_norms;
  struct Obs {
    std::string query_id;
    std::vector<int> sigma_rank_of_pi;  // 1-based
    std::vector<int> item;              // index into thetas, per pi position
  };
  std::vector<Obs> obs;

  std::size_t size() const { return obs.size(); }

  static PreparedDataset build(const std::vector<QueryObservation>& data,
                               const ThetaMap& theta_by_item);
};

struct VariationalState {
  std::vector<double> phi;                // q(z_i = 1), per query
  double kappa1 = 0.0;                    // Beta mass paired with z = 1
  double kappa2 = 0.0;
  std::vector<double> eta_tilde;
  std::vector<std::vector<double>> zeta;  // per query, per stage
  std::vector<double> elbo_trace;
  double elbo = 0.0;
  bool converged = false;
  int iters = 0;
};

struct InferenceOptions {
  double tol = 1e-6;
  int max_iters = 500;
  std::uint64_t seed = 0;
  int threads = 1;
};

// Random start: phi uniform in (0,1), kappa1 = kappa2 = delta + m/2,
// eta_tilde small Gaussian noise.
VariationalState init_state(int m, int T, double delta, std::mt19937_64& rng);

// kappa1 = delta + sum(phi), kappa2 = delta + sum(1 - phi).
std::pair<double, double> update_kappas(std::span<const double> phi,
                                        double delta);

// phi_i = 1 / (1 + exp(m_i)) with
// m_i = Psi(kappa2) - Psi(kappa1) + ln f_i - E[ln g]_i.
double update_phi(double log_f, double expected_log_g, double kappa1,
                  double kappa2);

// Concave maximization of
//   L(eta) = -||eta||^2 / (2 gamma^2) + sum_i phi_i * bound_i(eta)
// by nonlinear conjugate gradient with backtracking line search; zeta held
// fixed. Returns the achieved L. Throws std::runtime_error on non-finite
// values.
double maximize_eta(const PreparedDataset& data, std::span<const double> phi,
                    const std::vector<std::vector<double>>& zeta,
                    const ModelParams& params, std::vector<double>& eta_tilde,
                    int threads = 1);

// The variational objective with additive constants dropped (Gaussian
// entropy of eta and the fixed-covariance trace term of its prior).
double compute_elbo(const PreparedDataset& data, const VariationalState& state,
                    const ModelParams& params, int threads = 1);

// Coordinate ascent: kappas, then per-query zeta refresh + phi, then
// eta_tilde, until the relative ELBO change drops below tol.
VariationalState run_ltp_inf(const PreparedDataset& data,
                             const ModelParams& params,
                             const InferenceOptions& options,
                             const VariationalState* warm_start = nullptr);

VariationalState run_ltp_inf(const std::vector<QueryObservation>& data,
                             const ModelParams& params,
                             const ThetaMap& theta_by_item,
                             const InferenceOptions& options);

}  // namespace ltp
