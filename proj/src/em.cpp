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

#include "ltp/em.hpp"

#include <cmath>
#include <random>

#include "ltp/kernels.hpp"
#include "ltp/math_util.hpp"
#include "ltp/parallel.hpp"

namespace ltp {

namespace {

constexpr double kFlatMass = 1e-12;

}  // namespace

std::pair<double, double> m_step(const PreparedDataset& data,
                                 const VariationalState& state,
                                 const ModelParams& current,
                                 const MStepBounds& bounds, int threads) {
  const std::size_t m = data.size();
  double phi_mass = 0.0;
  for (double p : state.phi) phi_mass += p;
  const double f_mass = static_cast<double>(m) - phi_mass;

  double mu = current.mu;
  if (f_mass > kFlatMass) {
    auto f_objective = [&](double trial_mu) {
      std::vector<double> per_query(m);
      parallel_for(m, threads, [&](std::size_t i) {
        per_query[i] = (1.0 - state.phi[i]) *
                       f_log_prob_ranks(data.obs[i].sigma_rank_of_pi,
                                        trial_mu);
      });
      double total = 0.0;
      for (double v : per_query) total += v;
      return total;
    };
    mu = golden_section_max(f_objective, bounds.mu_min, bounds.mu_max, 1e-5);
  }

  double lambda = current.lambda;
  if (phi_mass > kFlatMass) {
    // Scores do not depend on lambda; hoist them per observation.
    std::vector<std::vector<double>> scores(m);
    std::vector<std::vector<double>> sq_norms(m);
    parallel_for(m, threads, [&](std::size_t i) {
      const auto& obs = data.obs[i];
      const int n = static_cast<int>(obs.item.size());
      scores[i].resize(n);
      sq_norms[i].resize(n);
      for (int j = 0; j < n; ++j) {
        scores[i][j] = kernels::dot(state.eta_tilde.data(),
                                    data.thetas[obs.item[j]].data(), data.T);
        sq_norms[i][j] = data.theta_sq_norms[obs.item[j]];
      }
    });
    auto g_objective = [&](double trial_lambda) {
      std::vector<double> per_query(m);
      parallel_for(m, threads, [&](std::size_t i) {
        if (state.phi[i] == 0.0) {
          per_query[i] = 0.0;
          return;
        }
        per_query[i] =
            state.phi[i] *
            expected_log_g_bound_tight_ranks({data.obs[i].sigma_rank_of_pi,
                                              scores[i], sq_norms[i],
                                              trial_lambda, current.gamma});
      });
      double total = 0.0;
      for (double v : per_query) total += v;
      return total;
    };
    lambda = golden_section_max(g_objective, 0.0, 1.0, 1e-5);
  }
  return {lambda, mu};
}

EmResult run_ltp_em(const PreparedDataset& data, const ModelParams& init,
                    const EmOptions& options) {
  EmResult result;
  result.params = init;
  result.params.validate();

  const VariationalState* warm = nullptr;
  for (int iter = 1; iter <= options.max_iters; ++iter) {
    InferenceOptions inf = options.inf;
    inf.seed = options.inf.seed;  // the E-step rng is only used cold
    result.state = run_ltp_inf(data, result.params, inf, warm);
    warm = &result.state;

    const auto [lambda, mu] =
        m_step(data, result.state, result.params, {}, options.inf.threads);
    const double d_lambda = std::abs(lambda - result.params.lambda);
    const double d_mu = std::abs(mu - result.params.mu);
    result.params.lambda = lambda;
    result.params.mu = mu;
    result.trace.push_back({iter, lambda, mu, result.state.elbo});
    if (d_lambda < options.tol && d_mu < options.tol) {
      result.converged = true;
      break;
    }
  }
  // Final E-step at the converged parameters so state matches params.
  result.state = run_ltp_inf(data, result.params, options.inf, warm);
  return result;
}

EmResult run_ltp_em(const std::vector<QueryObservation>& data,
                    const ThetaMap& theta_by_item, const EmOptions& options) {
  const PreparedDataset prepared = PreparedDataset::build(data, theta_by_item);
  std::mt19937_64 rng(options.inf.seed);
  std::uniform_real_distribution<double> lambda_init(0.05, 0.95);
  std::uniform_real_distribution<double> mu_init(0.5, 5.0);
  ModelParams params;
  params.lambda = lambda_init(rng);
  params.mu = mu_init(rng);
  return run_ltp_em(prepared, params, options);
}

}  // namespace ltp
