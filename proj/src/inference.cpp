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

#include "ltp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "ltp/kernels.hpp"
#include "ltp/math_util.hpp"
#include "ltp/parallel.hpp"

namespace ltp {

namespace {

constexpr double kPhiFloor = 1e-10;

// Per-pi-position scores and squared norms for one observation at the
// current eta_tilde.
struct ObsScores {
  std::vector<double> scores;
  std::vector<double> sq_norms;
};

ObsScores obs_scores(const PreparedDataset& data,
                     const PreparedDataset::Obs& obs,
                     std::span<const double> eta_tilde) {
  ObsScores out;
  const int n = static_cast<int>(obs.item.size());
  out.scores.resize(n);
  out.sq_norms.resize(n);
  for (int j = 0; j < n; ++j) {
    const auto& theta = data.thetas[obs.item[j]];
    out.scores[j] = kernels::dot(eta_tilde.data(), theta.data(), data.T);
    out.sq_norms[j] = data.theta_sq_norms[obs.item[j]];
  }
  return out;
}

GBoundTerms terms_of(const PreparedDataset::Obs& obs, const ObsScores& s,
                     const ModelParams& params) {
  return {obs.sigma_rank_of_pi, s.scores, s.sq_norms, params.lambda,
          params.gamma};
}

}  // namespace

PreparedDataset PreparedDataset::build(
    const std::vector<QueryObservation>& data, const ThetaMap& theta_by_item) {
  PreparedDataset out;
  std::unordered_map<std::string, int> index_of;
  for (const auto& q : data) {
    Obs obs;
    obs.query_id = q.query_id;
    const int n = q.pi.size();
    if (q.sigma.size() != n) {
      throw std::invalid_argument("unaligned observation: " + q.query_id);
    }
    obs.sigma_rank_of_pi.resize(n);
    obs.item.resize(n);
    for (int i = 1; i <= n; ++i) {
      const std::string& id = q.pi.item_at(i);
      obs.sigma_rank_of_pi[i - 1] = q.sigma.rank_of(id);
      auto [it, inserted] = index_of.emplace(id, out.thetas.size());
      if (inserted) {
        auto theta_it = theta_by_item.find(id);
        if (theta_it == theta_by_item.end()) {
          throw std::invalid_argument("missing topic-map for item: " + id);
        }
        if (out.T == 0) {
          out.T = static_cast<int>(theta_it->second.size());
        } else if (static_cast<int>(theta_it->second.size()) != out.T) {
          throw std::invalid_argument("topic-map dimension mismatch: " + id);
        }
        out.thetas.push_back(theta_it->second);
        out.theta_sq_norms.push_back(kernels::squared_norm(
            theta_it->second.data(), theta_it->second.size()));
      }
      obs.item[i - 1] = it->second;
    }
    out.obs.push_back(std::move(obs));
  }
  return out;
}

VariationalState init_state(int m, int T, double delta, std::mt19937_64& rng) {
  if (m < 0 || T < 1) throw std::invalid_argument("init_state: bad m or T");
  VariationalState st;
  std::uniform_real_distribution<double> unif(kPhiFloor, 1.0 - kPhiFloor);
  std::normal_distribution<double> noise(0.0, 0.01);
  st.phi.resize(m);
  for (double& p : st.phi) p = unif(rng);
  st.kappa1 = st.kappa2 = delta + m / 2.0;
  st.eta_tilde.resize(T);
  for (double& e : st.eta_tilde) e = noise(rng);
  st.zeta.assign(m, {});
  return st;
}

std::pair<double, double> update_kappas(std::span<const double> phi,
                                        double delta) {
  double mass1 = 0.0;
  for (double p : phi) mass1 += p;
  return {delta + mass1, delta + (static_cast<double>(phi.size()) - mass1)};
}

double update_phi(double log_f, double expected_log_g, double kappa1,
                  double kappa2) {
  const double m = digamma(kappa2) - digamma(kappa1) + log_f - expected_log_g;
  return std::clamp(logistic_neg(m), kPhiFloor, 1.0 - kPhiFloor);
}

namespace {

struct EtaObjective {
  const PreparedDataset& data;
  std::span<const double> phi;
  const std::vector<std::vector<double>>& zeta;
  const ModelParams& params;
  int threads;

  double value(std::span<const double> eta) const {
    std::vector<double> per_query(data.size());
    parallel_for(data.size(), threads, [&](std::size_t i) {
      if (phi[i] == 0.0) {
        per_query[i] = 0.0;
        return;
      }
      const ObsScores s = obs_scores(data, data.obs[i], eta);
      per_query[i] = phi[i] * expected_log_g_bound_ranks(
                                  terms_of(data.obs[i], s, params), zeta[i]);
    });
    double out = -kernels::squared_norm(eta.data(), eta.size()) /
                 (2.0 * params.gamma * params.gamma);
    for (double v : per_query) out += v;
    return out;
  }

  std::vector<double> gradient(std::span<const double> eta) const {
    const int T = data.T;
    std::vector<std::vector<double>> per_query(data.size());
    parallel_for(data.size(), threads, [&](std::size_t i) {
      if (phi[i] == 0.0) return;
      per_query[i].assign(T, 0.0);
      const ObsScores s = obs_scores(data, data.obs[i], eta);
      std::vector<const double*> rows(data.obs[i].item.size());
      for (std::size_t j = 0; j < rows.size(); ++j) {
        rows[j] = data.thetas[data.obs[i].item[j]].data();
      }
      add_grad_eta_bound_ranks(terms_of(data.obs[i], s, params), zeta[i],
                               rows, T, phi[i], per_query[i].data());
    });
    std::vector<double> grad(T);
    for (int k = 0; k < T; ++k) {
      grad[k] = -eta[k] / (params.gamma * params.gamma);
    }
    for (const auto& g : per_query) {
      if (!g.empty()) kernels::axpy(1.0, g.data(), grad.data(), T);
    }
    return grad;
  }
};

}  // namespace

double maximize_eta(const PreparedDataset& data, std::span<const double> phi,
                    const std::vector<std::vector<double>>& zeta,
                    const ModelParams& params, std::vector<double>& eta_tilde,
                    int threads) {
  const int T = static_cast<int>(eta_tilde.size());
  EtaObjective objective{data, phi, zeta, params, threads};

  double value = objective.value(eta_tilde);
  std::vector<double> grad = objective.gradient(eta_tilde);
  std::vector<double> direction = grad;
  std::vector<double> trial(T);
  double step = 1.0;

  for (int iter = 0; iter < 200; ++iter) {
    const double grad_dot_dir = kernels::dot(grad.data(), direction.data(), T);
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax < 1e-8) break;
    if (grad_dot_dir <= 0.0) {
      direction = grad;  // restart on a non-ascent direction
      continue;
    }

    bool accepted = false;
    double s = step;
    for (int bt = 0; bt < 60; ++bt) {
      for (int k = 0; k < T; ++k) trial[k] = eta_tilde[k] + s * direction[k];
      const double trial_value = objective.value(trial);
      if (!std::isfinite(trial_value)) {
        throw std::runtime_error("maximize_eta: non-finite objective");
      }
      if (trial_value >= value + 1e-4 * s * grad_dot_dir) {
        eta_tilde = trial;
        value = trial_value;
        step = s * 2.0;
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) {
      if (direction != grad) {
        direction = grad;
        step = 1.0;
        continue;
      }
      break;
    }

    std::vector<double> new_grad = objective.gradient(eta_tilde);
    // Polak-Ribiere with automatic restart.
    double num = 0.0;
    for (int k = 0; k < T; ++k) num += new_grad[k] * (new_grad[k] - grad[k]);
    const double den = kernels::squared_norm(grad.data(), T);
    const double beta = den > 0.0 ? std::max(0.0, num / den) : 0.0;
    for (int k = 0; k < T; ++k) {
      direction[k] = new_grad[k] + beta * direction[k];
    }
    grad = std::move(new_grad);
  }
  return value;
}

double compute_elbo(const PreparedDataset& data, const VariationalState& state,
                    const ModelParams& params, int threads) {
  const std::size_t m = data.size();
  if (state.phi.size() != m || state.zeta.size() != m) {
    throw std::invalid_argument("compute_elbo: state size mismatch");
  }
  std::vector<double> per_query(m);
  parallel_for(m, threads, [&](std::size_t i) {
    const double log_f =
        f_log_prob_ranks(data.obs[i].sigma_rank_of_pi, params.mu);
    const ObsScores s = obs_scores(data, data.obs[i], state.eta_tilde);
    const double bound = expected_log_g_bound_ranks(
        terms_of(data.obs[i], s, params), state.zeta[i]);
    const double phi = state.phi[i];
    per_query[i] = phi * bound + (1.0 - phi) * log_f +
                   bernoulli_entropy(phi);
  });

  const double psi1 = digamma(state.kappa1);
  const double psi2 = digamma(state.kappa2);
  const double psi12 = digamma(state.kappa1 + state.kappa2);

  double elbo = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    elbo += per_query[i];
    elbo += state.phi[i] * (psi1 - psi12) +
            (1.0 - state.phi[i]) * (psi2 - psi12);
  }
  elbo += (params.delta - 1.0) * (psi1 + psi2 - 2.0 * psi12);
  elbo += -kernels::squared_norm(state.eta_tilde.data(),
                                 state.eta_tilde.size()) /
          (2.0 * params.gamma * params.gamma);
  elbo += beta_entropy(state.kappa1, state.kappa2);
  if (!std::isfinite(elbo)) {
    throw std::runtime_error("compute_elbo: non-finite value");
  }
  return elbo;
}

VariationalState run_ltp_inf(const PreparedDataset& data,
                             const ModelParams& params,
                             const InferenceOptions& options,
                             const VariationalState* warm_start) {
  params.validate();
  const std::size_t m = data.size();
  std::mt19937_64 rng(options.seed);

  VariationalState st;
  if (warm_start != nullptr) {
    st = *warm_start;
    st.elbo_trace.clear();
    st.converged = false;
    st.iters = 0;
  } else {
    st = init_state(static_cast<int>(m), std::max(data.T, 1), params.delta,
                    rng);
  }
  if (m == 0) {
    // Prior state: nothing observed.
    std::fill(st.eta_tilde.begin(), st.eta_tilde.end(), 0.0);
    st.kappa1 = st.kappa2 = params.delta;
    st.converged = true;
    return st;
  }

  std::vector<double> log_f(m);
  parallel_for(m, options.threads, [&](std::size_t i) {
    log_f[i] = f_log_prob_ranks(data.obs[i].sigma_rank_of_pi, params.mu);
  });

  auto refresh_zeta = [&](std::size_t i) {
    const ObsScores s = obs_scores(data, data.obs[i], st.eta_tilde);
    st.zeta[i] = optimal_zeta_ranks(terms_of(data.obs[i], s, params));
  };

  for (std::size_t i = 0; i < m; ++i) {
    if (st.zeta[i].empty()) refresh_zeta(i);
  }
  st.elbo = compute_elbo(data, st, params, options.threads);
  st.elbo_trace.push_back(st.elbo);

  for (int iter = 1; iter <= options.max_iters; ++iter) {
    std::tie(st.kappa1, st.kappa2) = update_kappas(st.phi, params.delta);

    parallel_for(m, options.threads, [&](std::size_t i) {
      refresh_zeta(i);
      const ObsScores s = obs_scores(data, data.obs[i], st.eta_tilde);
      const double bound = expected_log_g_bound_ranks(
          terms_of(data.obs[i], s, params), st.zeta[i]);
      st.phi[i] = update_phi(log_f[i], bound, st.kappa1, st.kappa2);
    });

    maximize_eta(data, st.phi, st.zeta, params, st.eta_tilde,
                 options.threads);

    const double elbo = compute_elbo(data, st, params, options.threads);
    st.elbo_trace.push_back(elbo);
    st.iters = iter;
    const double rel_change =
        std::abs(elbo - st.elbo) / (std::abs(st.elbo) + 1e-12);
    st.elbo = elbo;
    if (rel_change < options.tol) {
      st.converged = true;
      break;
    }
  }
  return st;
}

VariationalState run_ltp_inf(const std::vector<QueryObservation>& data,
                             const ModelParams& params,
                             const ThetaMap& theta_by_item,
                             const InferenceOptions& options) {
  return run_ltp_inf(PreparedDataset::build(data, theta_by_item), params,
                     options);
}

}  // namespace ltp
