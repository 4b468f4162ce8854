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

#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ltp/rankings.hpp"

namespace ltp {

using ThetaMap = std::unordered_map<std::string, std::vector<double>>;

// Parameters of the two stage-wise permutation distributions and the priors
// around them.
struct ModelParams {
  double mu = 10.0;      // spread of the distance-only distribution f
  double lambda = 0.9;   // score vs. center trade-off in g
  double gamma = 1.0;    // Gaussian prior / variational scale of eta
  double delta = 2.0;    // symmetric Beta prior on tau

  static constexpr double kMuMax = 50.0;

  // Throws std::invalid_argument when outside
  // mu in (0, 50], lambda in [0,1], gamma > 0, delta > 0.
  void validate() const;
};

// Per-user personalization vector over topics.
struct PersonalizationVector {
  std::vector<double> eta;
};

// ---------------------------------------------------------------------------
// Index-level core. An observation is reduced to, per pi position j
// (1-based stage j places item pi(j)):
//   r[j-1]      = rank of pi(j) in sigma (1-based)
//   scores[j-1] = eta' theta_{pi(j)}
// Stage i selects pi(i) among {pi(i..n)} with weight
//   exp(lambda * score + (1 - lambda) * (i - r)).
// f is the score-free case with spread mu.
// ---------------------------------------------------------------------------

double f_log_prob_ranks(std::span<const int> sigma_rank_of_pi, double mu);

double g_log_prob_ranks(std::span<const int> sigma_rank_of_pi,
                        std::span<const double> scores, double lambda);

// Inputs for the variational lower bound on E[ln g] when eta is Gaussian
// with mean eta_tilde and covariance gamma^2 I. scores and sq_norms are
// taken at pi positions; sq_norms[j-1] = ||theta_{pi(j)}||^2.
struct GBoundTerms {
  std::span<const int> sigma_rank_of_pi;
  std::span<const double> scores;
  std::span<const double> sq_norms;
  double lambda = 0.0;
  double gamma = 0.0;
};

// Closed-form tightest zeta, one per stage.
std::vector<double> optimal_zeta_ranks(const GBoundTerms& terms);

// Lower bound on E[ln g]; valid for every positive zeta, maximal at
// optimal_zeta_ranks. Throws on nonpositive zeta.
double expected_log_g_bound_ranks(const GBoundTerms& terms,
                                  std::span<const double> zeta);

// The bound at the tightest zeta, without materializing it.
double expected_log_g_bound_tight_ranks(const GBoundTerms& terms);

// Accumulates weight * d(bound)/d(eta_tilde) into grad (length T).
// theta_rows[j-1] points at theta_{pi(j)}.
void add_grad_eta_bound_ranks(const GBoundTerms& terms,
                              std::span<const double> zeta,
                              std::span<const double* const> theta_rows, int T,
                              double weight, double* grad);

// Stage-wise sampler over item indices 0..n-1 given per-item log weights
// (weights are stage-invariant up to normalization). Returns the drawn order.
std::vector<int> sample_stagewise(std::span<const double> log_weights,
                                  std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Permutation-level wrappers.
// ---------------------------------------------------------------------------

double f_log_prob(const Permutation& pi, const Permutation& sigma, double mu);

double g_log_prob(const Permutation& pi, const Permutation& sigma,
                  std::span<const double> eta, const ThetaMap& theta_by_item,
                  double lambda);

Permutation sample_f(const Permutation& sigma, double mu,
                     std::mt19937_64& rng);

Permutation sample_g(const Permutation& sigma, std::span<const double> eta,
                     const ThetaMap& theta_by_item, double lambda,
                     std::mt19937_64& rng);

std::vector<double> optimal_zeta(const Permutation& pi,
                                 const Permutation& sigma,
                                 std::span<const double> eta_tilde,
                                 const ThetaMap& theta_by_item, double lambda,
                                 double gamma);

double expected_log_g_bound(const Permutation& pi, const Permutation& sigma,
                            std::span<const double> eta_tilde,
                            const ThetaMap& theta_by_item, double lambda,
                            double gamma, std::span<const double> zeta);

std::vector<double> grad_eta_bound(const Permutation& pi,
                                   const Permutation& sigma,
                                   std::span<const double> eta_tilde,
                                   const ThetaMap& theta_by_item,
                                   double lambda, double gamma,
                                   std::span<const double> zeta);

}  // namespace ltp
