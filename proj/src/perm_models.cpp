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

#include "ltp/perm_models.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ltp/kernels.hpp"
#include "ltp/math_util.hpp"

namespace ltp {

namespace {

// sigma ranks of pi items plus the per-position theta lookups, shared by the
// permutation-level wrappers.
struct PairView {
  std::vector<int> r;
  std::vector<const double*> theta_rows;
  std::vector<double> scores;
  std::vector<double> sq_norms;
};

std::vector<int> sigma_ranks_of(const Permutation& pi,
                                const Permutation& sigma) {
  if (pi.size() != sigma.size()) {
    throw std::invalid_argument("pi and sigma differ in size");
  }
  std::vector<int> r(pi.size());
  for (int i = 1; i <= pi.size(); ++i) {
    r[i - 1] = sigma.rank_of(pi.item_at(i));  // throws on mismatched sets
  }
  return r;
}

PairView make_pair_view(const Permutation& pi, const Permutation& sigma,
                        std::span<const double> eta,
                        const ThetaMap& theta_by_item) {
  PairView view;
  view.r = sigma_ranks_of(pi, sigma);
  const int n = pi.size();
  const int T = static_cast<int>(eta.size());
  view.theta_rows.resize(n);
  view.scores.resize(n);
  view.sq_norms.resize(n);
  for (int j = 0; j < n; ++j) {
    auto it = theta_by_item.find(pi.item_at(j + 1));
    if (it == theta_by_item.end()) {
      throw std::invalid_argument("missing topic-map for item: " +
                                  pi.item_at(j + 1));
    }
    if (static_cast<int>(it->second.size()) != T) {
      throw std::invalid_argument("topic-map dimension mismatch for item: " +
                                  pi.item_at(j + 1));
    }
    view.theta_rows[j] = it->second.data();
    view.scores[j] = kernels::dot(eta.data(), it->second.data(), T);
    view.sq_norms[j] = kernels::squared_norm(it->second.data(), T);
  }
  return view;
}

// Suffix log-sum-exp of e[j..n-1] for every j.
std::vector<double> suffix_lse(std::span<const double> e) {
  const int n = static_cast<int>(e.size());
  std::vector<double> out(n);
  double lse = -std::numeric_limits<double>::infinity();
  for (int j = n - 1; j >= 0; --j) {
    const double hi = std::max(lse, e[j]);
    lse = hi + std::log(std::exp(lse - hi) + std::exp(e[j] - hi));
    out[j] = lse;
  }
  return out;
}

}  // namespace

void ModelParams::validate() const {
  if (!(mu > 0.0) || mu > kMuMax) {
    throw std::invalid_argument("mu must lie in (0, 50]");
  }
  if (!(lambda >= 0.0) || !(lambda <= 1.0)) {
    throw std::invalid_argument("lambda must lie in [0, 1]");
  }
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
}

double f_log_prob_ranks(std::span<const int> sigma_rank_of_pi, double mu) {
  // Stage i exponent mu*(i - r_j); the mu*i part cancels between numerator
  // and normalizer, leaving sum_i [-mu*r_i - lse_{j>=i}(-mu*r_j)].
  const int n = static_cast<int>(sigma_rank_of_pi.size());
  std::vector<double> e(n);
  for (int j = 0; j < n; ++j) e[j] = -mu * sigma_rank_of_pi[j];
  const std::vector<double> lse = suffix_lse(e);
  double out = 0.0;
  for (int i = 0; i < n; ++i) out += e[i] - lse[i];
  return out;
}

double g_log_prob_ranks(std::span<const int> sigma_rank_of_pi,
                        std::span<const double> scores, double lambda) {
  const int n = static_cast<int>(sigma_rank_of_pi.size());
  if (static_cast<int>(scores.size()) != n) {
    throw std::invalid_argument("scores length mismatch");
  }
  std::vector<double> e(n);
  for (int j = 0; j < n; ++j) {
    e[j] = lambda * scores[j] - (1.0 - lambda) * sigma_rank_of_pi[j];
  }
  const std::vector<double> lse = suffix_lse(e);
  double out = 0.0;
  for (int i = 0; i < n; ++i) out += e[i] - lse[i];
  return out;
}

namespace {

// Stage-invariant exponents of the Gaussian-MGF terms:
//   e[j] = lambda*s_j + (lambda^2 gamma^2 / 2) q_j - (1-lambda) r_j
// so that M_j(i) = exp(e[j] + (1-lambda) * i).
std::vector<double> bound_exponents(const GBoundTerms& t) {
  const int n = static_cast<int>(t.sigma_rank_of_pi.size());
  if (static_cast<int>(t.scores.size()) != n ||
      static_cast<int>(t.sq_norms.size()) != n) {
    throw std::invalid_argument("GBoundTerms spans disagree in length");
  }
  const double half_l2g2 = 0.5 * t.lambda * t.lambda * t.gamma * t.gamma;
  std::vector<double> e(n);
  for (int j = 0; j < n; ++j) {
    e[j] = t.lambda * t.scores[j] + half_l2g2 * t.sq_norms[j] -
           (1.0 - t.lambda) * t.sigma_rank_of_pi[j];
  }
  return e;
}

}  // namespace

std::vector<double> optimal_zeta_ranks(const GBoundTerms& t) {
  const std::vector<double> e = bound_exponents(t);
  const std::vector<double> lse = suffix_lse(e);
  const int n = static_cast<int>(e.size());
  std::vector<double> zeta(n);
  for (int i = 0; i < n; ++i) {
    zeta[i] = std::exp((1.0 - t.lambda) * (i + 1) + lse[i]);
  }
  return zeta;
}

double expected_log_g_bound_ranks(const GBoundTerms& t,
                                  std::span<const double> zeta) {
  const std::vector<double> e = bound_exponents(t);
  const std::vector<double> lse = suffix_lse(e);
  const int n = static_cast<int>(e.size());
  if (static_cast<int>(zeta.size()) != n) {
    throw std::invalid_argument("zeta length mismatch");
  }
  double out = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!(zeta[i] > 0.0)) {
      throw std::invalid_argument("zeta must be positive at every stage");
    }
    const double log_zeta = std::log(zeta[i]);
    const double stage_lse = (1.0 - t.lambda) * (i + 1) + lse[i];
    out += t.lambda * t.scores[i] +
           (1.0 - t.lambda) * ((i + 1) - t.sigma_rank_of_pi[i]) -
           std::exp(stage_lse - log_zeta) - log_zeta + 1.0;
  }
  return out;
}

double expected_log_g_bound_tight_ranks(const GBoundTerms& t) {
  // At zeta_i = sum_{j>=i} M_j(i) each stage contributes
  // lambda*s_i - (1-lambda)*r_i - lse_{j>=i}(e_j).
  const std::vector<double> e = bound_exponents(t);
  const std::vector<double> lse = suffix_lse(e);
  const int n = static_cast<int>(e.size());
  double out = 0.0;
  const double half_l2g2 = 0.5 * t.lambda * t.lambda * t.gamma * t.gamma;
  for (int i = 0; i < n; ++i) {
    out += e[i] - half_l2g2 * t.sq_norms[i] - lse[i];
  }
  return out;
}

void add_grad_eta_bound_ranks(const GBoundTerms& t,
                              std::span<const double> zeta,
                              std::span<const double* const> theta_rows, int T,
                              double weight, double* grad) {
  const std::vector<double> e = bound_exponents(t);
  const int n = static_cast<int>(e.size());
  if (static_cast<int>(zeta.size()) != n ||
      static_cast<int>(theta_rows.size()) != n) {
    throw std::invalid_argument("grad input length mismatch");
  }
  if (n == 0) return;
  const double shift = *std::max_element(e.begin(), e.end());

  // Reverse sweep: suffix[k] = sum_{j>=i} exp(e_j - shift) * theta_j, then
  // grad += weight * lambda * (theta_i - exp((1-l)i + shift - ln zeta_i) * suffix).
  std::vector<double> suffix(T, 0.0);
  std::vector<std::vector<double>> suffixes(n);
  for (int j = n - 1; j >= 0; --j) {
    kernels::axpy(std::exp(e[j] - shift), theta_rows[j], suffix.data(), T);
    suffixes[j] = suffix;
  }
  for (int i = 0; i < n; ++i) {
    if (!(zeta[i] > 0.0)) {
      throw std::invalid_argument("zeta must be positive at every stage");
    }
    kernels::axpy(weight * t.lambda, theta_rows[i], grad, T);
    const double coeff = std::exp((1.0 - t.lambda) * (i + 1) + shift -
                                  std::log(zeta[i]));
    kernels::axpy(-weight * t.lambda * coeff, suffixes[i].data(), grad, T);
  }
}

std::vector<int> sample_stagewise(std::span<const double> log_weights,
                                  std::mt19937_64& rng) {
  const int n = static_cast<int>(log_weights.size());
  std::vector<int> remaining(n);
  for (int j = 0; j < n; ++j) remaining[j] = j;
  std::vector<int> order;
  order.reserve(n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> w;
  while (!remaining.empty()) {
    double hi = -std::numeric_limits<double>::infinity();
    for (int j : remaining) hi = std::max(hi, log_weights[j]);
    w.clear();
    double total = 0.0;
    for (int j : remaining) {
      total += std::exp(log_weights[j] - hi);
      w.push_back(total);
    }
    const double u = unif(rng) * total;
    std::size_t pick = std::lower_bound(w.begin(), w.end(), u) - w.begin();
    if (pick >= remaining.size()) pick = remaining.size() - 1;
    order.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return order;
}

double f_log_prob(const Permutation& pi, const Permutation& sigma, double mu) {
  return f_log_prob_ranks(sigma_ranks_of(pi, sigma), mu);
}

double g_log_prob(const Permutation& pi, const Permutation& sigma,
                  std::span<const double> eta, const ThetaMap& theta_by_item,
                  double lambda) {
  const PairView view = make_pair_view(pi, sigma, eta, theta_by_item);
  return g_log_prob_ranks(view.r, view.scores, lambda);
}

Permutation sample_f(const Permutation& sigma, double mu,
                     std::mt19937_64& rng) {
  const int n = sigma.size();
  std::vector<double> log_w(n);
  for (int j = 0; j < n; ++j) log_w[j] = -mu * (j + 1);
  const std::vector<int> order = sample_stagewise(log_w, rng);
  std::vector<std::string> items(n);
  for (int i = 0; i < n; ++i) items[i] = sigma.item_at(order[i] + 1);
  return Permutation(std::move(items));
}

Permutation sample_g(const Permutation& sigma, std::span<const double> eta,
                     const ThetaMap& theta_by_item, double lambda,
                     std::mt19937_64& rng) {
  const int n = sigma.size();
  const int T = static_cast<int>(eta.size());
  std::vector<double> log_w(n);
  for (int j = 0; j < n; ++j) {
    auto it = theta_by_item.find(sigma.item_at(j + 1));
    if (it == theta_by_item.end()) {
      throw std::invalid_argument("missing topic-map for item: " +
                                  sigma.item_at(j + 1));
    }
    log_w[j] = lambda * kernels::dot(eta.data(), it->second.data(), T) -
               (1.0 - lambda) * (j + 1);
  }
  const std::vector<int> order = sample_stagewise(log_w, rng);
  std::vector<std::string> items(n);
  for (int i = 0; i < n; ++i) items[i] = sigma.item_at(order[i] + 1);
  return Permutation(std::move(items));
}

std::vector<double> optimal_zeta(const Permutation& pi,
                                 const Permutation& sigma,
                                 std::span<const double> eta_tilde,
                                 const ThetaMap& theta_by_item, double lambda,
                                 double gamma) {
  const PairView view = make_pair_view(pi, sigma, eta_tilde, theta_by_item);
  return optimal_zeta_ranks(
      {view.r, view.scores, view.sq_norms, lambda, gamma});
}

double expected_log_g_bound(const Permutation& pi, const Permutation& sigma,
                            std::span<const double> eta_tilde,
                            const ThetaMap& theta_by_item, double lambda,
                            double gamma, std::span<const double> zeta) {
  const PairView view = make_pair_view(pi, sigma, eta_tilde, theta_by_item);
  return expected_log_g_bound_ranks(
      {view.r, view.scores, view.sq_norms, lambda, gamma}, zeta);
}

std::vector<double> grad_eta_bound(const Permutation& pi,
                                   const Permutation& sigma,
                                   std::span<const double> eta_tilde,
                                   const ThetaMap& theta_by_item,
                                   double lambda, double gamma,
                                   std::span<const double> zeta) {
  const PairView view = make_pair_view(pi, sigma, eta_tilde, theta_by_item);
  const int T = static_cast<int>(eta_tilde.size());
  std::vector<double> grad(T, 0.0);
  add_grad_eta_bound_ranks(
      {view.r, view.scores, view.sq_norms, lambda, gamma}, zeta,
      view.theta_rows, T, 1.0, grad.data());
  return grad;
}

}  // namespace ltp
