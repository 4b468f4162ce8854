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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <numeric>
#include <random>
#include <vector>

#include "ltp/inference.hpp"
#include "ltp/math_util.hpp"
#include "ltp/perm_models.hpp"

using ltp::compute_elbo;
using ltp::digamma;
using ltp::InferenceOptions;
using ltp::init_state;
using ltp::maximize_eta;
using ltp::ModelParams;
using ltp::Permutation;
using ltp::PreparedDataset;
using ltp::QueryObservation;
using ltp::run_ltp_inf;
using ltp::sample_f;
using ltp::sample_g;
using ltp::ThetaMap;
using ltp::update_kappas;
using ltp::update_phi;
using ltp::VariationalState;

namespace {

ThetaMap random_thetas(const std::vector<std::string>& items, int T,
                       std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(0.8, 1.0);
  ThetaMap out;
  for (const auto& id : items) {
    std::vector<double> theta(T);
    double total = 0.0;
    for (double& x : theta) {
      x = gamma(rng) + 1e-6;
      total += x;
    }
    for (double& x : theta) x /= total;
    out.emplace(id, theta);
  }
  return out;
}

// Naive quadratic evaluation of the E[ln g] lower bound, written from the
// defining inequality ln x <= x / zeta + ln zeta - 1 rather than the library's
// suffix recurrences.
double naive_bound(const std::vector<int>& r, const std::vector<double>& s,
                   const std::vector<double>& q, double lambda, double gamma,
                   const std::vector<double>& zeta) {
  const int n = static_cast<int>(r.size());
  double out = 0.0;
  for (int i = 1; i <= n; ++i) {
    double inner = 0.0;
    for (int j = i; j <= n; ++j) {
      inner += std::exp(lambda * s[j - 1] +
                        lambda * lambda * gamma * gamma / 2.0 * q[j - 1] +
                        (1.0 - lambda) * (i - r[j - 1]));
    }
    out += lambda * s[i - 1] + (1.0 - lambda) * (i - r[i - 1]) -
           std::log(zeta[i - 1]) - inner / zeta[i - 1] + 1.0;
  }
  return out;
}

}  // namespace

TEST_CASE("init_state is reproducible, in range, and seed-sensitive") {
  std::mt19937_64 rng_a(9), rng_b(9), rng_c(10);
  const auto a = init_state(4, 3, 2.0, rng_a);
  const auto b = init_state(4, 3, 2.0, rng_b);
  const auto c = init_state(4, 3, 2.0, rng_c);
  CHECK(a.phi == b.phi);
  CHECK(a.eta_tilde == b.eta_tilde);
  CHECK(a.phi != c.phi);
  CHECK(a.kappa1 == doctest::Approx(4.0));
  CHECK(a.kappa2 == doctest::Approx(4.0));
  for (double p : a.phi) {
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
}

TEST_CASE("update_kappas follows the phi masses") {
  const std::vector<double> half(10, 0.5);
  auto [k1, k2] = update_kappas(half, 2.0);
  CHECK(k1 == doctest::Approx(7.0));
  CHECK(k2 == doctest::Approx(7.0));

  const std::vector<double> ones(10, 1.0);
  std::tie(k1, k2) = update_kappas(ones, 2.0);
  CHECK(k1 == doctest::Approx(12.0));
  CHECK(k2 == doctest::Approx(2.0));

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> phi(17);
  for (double& p : phi) p = unif(rng);
  std::tie(k1, k2) = update_kappas(phi, 2.0);
  CHECK(k1 + k2 == doctest::Approx(2.0 * 2.0 + 17.0));
}

TEST_CASE("update_phi is 0.5 under exact symmetry") {
  CHECK(update_phi(-1.3, -1.3, 5.0, 5.0) == doctest::Approx(0.5));
}

TEST_CASE("an unranked pair with a sharp f pushes phi below 0.5") {
  // pi = sigma on three items; f with mu = 10 explains this almost perfectly
  // while g at eta_tilde = 0 does not.
  std::mt19937_64 rng(21);
  const std::vector<std::string> items{"a", "b", "c"};
  const Permutation sigma(items);
  const auto thetas = random_thetas(items, 4, rng);
  const std::vector<double> eta(4, 0.0);
  ModelParams params;
  const double log_f = ltp::f_log_prob(sigma, sigma, params.mu);
  const auto zeta = ltp::optimal_zeta(sigma, sigma, eta, thetas, params.lambda,
                                      params.gamma);
  const double bound = ltp::expected_log_g_bound(sigma, sigma, eta, thetas,
                                                 params.lambda, params.gamma,
                                                 zeta);
  CHECK(update_phi(log_f, bound, 5.0, 5.0) < 0.5);
}

TEST_CASE("a score-explained re-rank pushes phi above 0.9") {
  // Five items, each with all mass on its own topic. eta_tilde strongly
  // prefers the reversed order, and pi is exactly that order.
  ThetaMap thetas;
  std::vector<std::string> items;
  for (int i = 0; i < 5; ++i) {
    items.push_back("d" + std::to_string(i));
    std::vector<double> theta(5, 0.0);
    theta[i] = 1.0;
    thetas.emplace(items.back(), theta);
  }
  const std::vector<double> eta{0.0, 2.0, 4.0, 6.0, 8.0};
  const Permutation sigma(items);
  const Permutation pi({"d4", "d3", "d2", "d1", "d0"});
  ModelParams params;
  const double log_f = ltp::f_log_prob(pi, sigma, params.mu);
  const auto zeta =
      ltp::optimal_zeta(pi, sigma, eta, thetas, params.lambda, params.gamma);
  const double bound = ltp::expected_log_g_bound(pi, sigma, eta, thetas,
                                                 params.lambda, params.gamma,
                                                 zeta);
  CHECK(update_phi(log_f, bound, 5.0, 5.0) > 0.9);
}

TEST_CASE("maximize_eta returns the prior mode when every phi is zero") {
  std::mt19937_64 rng(25);
  const std::vector<std::string> items{"a", "b", "c"};
  const auto thetas = random_thetas(items, 3, rng);
  const Permutation sigma(items);
  const Permutation pi({"b", "a", "c"});
  const auto data = PreparedDataset::build({{"q1", sigma, pi}}, thetas);
  ModelParams params;
  std::vector<double> eta{0.7, -0.3, 1.1};
  const std::vector<double> phi{0.0};
  const std::vector<std::vector<double>> zeta{
      ltp::optimal_zeta(pi, sigma, eta, thetas, params.lambda, params.gamma)};
  maximize_eta(data, phi, zeta, params, eta);
  for (double e : eta) CHECK(std::abs(e) < 1e-6);
}

TEST_CASE("the eta objective is concave along random chords") {
  std::mt19937_64 rng(27);
  const std::vector<std::string> items{"a", "b", "c", "d"};
  const auto thetas = random_thetas(items, 6, rng);
  const Permutation sigma(items);
  std::vector<QueryObservation> obs;
  for (int q = 0; q < 5; ++q) {
    auto shuffled = items;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    obs.push_back({"q" + std::to_string(q), sigma, Permutation(shuffled)});
  }
  const auto data = PreparedDataset::build(obs, thetas);
  ModelParams params;
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  std::vector<double> phi(obs.size());
  for (double& p : phi) p = unif(rng);

  std::normal_distribution<double> noise(0.0, 1.0);
  auto objective = [&](const std::vector<double>& eta) {
    double value = 0.0;
    for (double e : eta) value -= e * e / (2.0 * params.gamma * params.gamma);
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const auto zeta = ltp::optimal_zeta(obs[i].pi, obs[i].sigma, eta, thetas,
                                          params.lambda, params.gamma);
      value += phi[i] * ltp::expected_log_g_bound(obs[i].pi, obs[i].sigma, eta,
                                                  thetas, params.lambda,
                                                  params.gamma, zeta);
    }
    return value;
  };
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a(6), b(6), mid(6);
    for (int k = 0; k < 6; ++k) {
      a[k] = noise(rng);
      b[k] = noise(rng);
      mid[k] = 0.5 * (a[k] + b[k]);
    }
    CHECK(objective(mid) >= 0.5 * (objective(a) + objective(b)) - 1e-9);
  }
}

TEST_CASE("the ELBO matches a naive term-by-term evaluation") {
  // Single observation, two items, pi = sigma.
  ThetaMap thetas{{"a", {0.6, 0.4}}, {"b", {0.1, 0.9}}};
  const Permutation sigma({"a", "b"});
  const auto data = PreparedDataset::build({{"q1", sigma, sigma}}, thetas);
  ModelParams params;
  VariationalState st;
  st.phi = {0.3};
  st.kappa1 = 2.7;
  st.kappa2 = 3.4;
  st.eta_tilde = {0.5, -0.2};
  st.zeta = {ltp::optimal_zeta(sigma, sigma, st.eta_tilde, thetas,
                               params.lambda, params.gamma)};

  const std::vector<int> r{1, 2};
  std::vector<double> s(2), q(2);
  for (int j = 0; j < 2; ++j) {
    const auto& theta = thetas.at(sigma.item_at(j + 1));
    s[j] = st.eta_tilde[0] * theta[0] + st.eta_tilde[1] * theta[1];
    q[j] = theta[0] * theta[0] + theta[1] * theta[1];
  }
  const double bound = naive_bound(r, s, q, params.lambda, params.gamma,
                                   st.zeta[0]);
  const double log_f =
      std::log(1.0 / (1.0 + std::exp(-params.mu))) + 0.0;  // two stages
  const double phi = st.phi[0];
  const double psi1 = digamma(st.kappa1);
  const double psi2 = digamma(st.kappa2);
  const double psi12 = digamma(st.kappa1 + st.kappa2);
  const double log_beta = std::lgamma(st.kappa1) + std::lgamma(st.kappa2) -
                          std::lgamma(st.kappa1 + st.kappa2);
  double expected = phi * bound + (1.0 - phi) * log_f;
  expected += -(phi * std::log(phi) + (1.0 - phi) * std::log(1.0 - phi));
  expected += phi * (psi1 - psi12) + (1.0 - phi) * (psi2 - psi12);
  expected += (params.delta - 1.0) * (psi1 + psi2 - 2.0 * psi12);
  expected += -(0.5 * 0.5 + 0.2 * 0.2) / (2.0 * params.gamma * params.gamma);
  expected += log_beta - (st.kappa1 - 1.0) * psi1 - (st.kappa2 - 1.0) * psi2 +
              (st.kappa1 + st.kappa2 - 2.0) * psi12;

  CHECK(compute_elbo(data, st, params) ==
        doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("each block update raises the ELBO on a random instance") {
  std::mt19937_64 rng(33);
  std::vector<std::string> items;
  for (int i = 0; i < 6; ++i) items.push_back("d" + std::to_string(i));
  const auto thetas = random_thetas(items, 5, rng);
  const Permutation sigma(items);
  std::vector<QueryObservation> obs;
  for (int qn = 0; qn < 8; ++qn) {
    auto shuffled = items;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    obs.push_back({"q" + std::to_string(qn), sigma, Permutation(shuffled)});
  }
  const auto data = PreparedDataset::build(obs, thetas);
  ModelParams params;
  auto st = init_state(static_cast<int>(obs.size()), 5, params.delta, rng);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    st.zeta[i] = ltp::optimal_zeta(obs[i].pi, obs[i].sigma, st.eta_tilde,
                                   thetas, params.lambda, params.gamma);
  }
  double elbo = compute_elbo(data, st, params);
  const double slack = 1e-8 * std::abs(elbo);

  std::tie(st.kappa1, st.kappa2) = update_kappas(st.phi, params.delta);
  double next = compute_elbo(data, st, params);
  CHECK(next >= elbo - slack);
  elbo = next;

  for (std::size_t i = 0; i < obs.size(); ++i) {
    st.zeta[i] = ltp::optimal_zeta(obs[i].pi, obs[i].sigma, st.eta_tilde,
                                   thetas, params.lambda, params.gamma);
    const double log_f = ltp::f_log_prob(obs[i].pi, obs[i].sigma, params.mu);
    const double bound = ltp::expected_log_g_bound(
        obs[i].pi, obs[i].sigma, st.eta_tilde, thetas, params.lambda,
        params.gamma, st.zeta[i]);
    st.phi[i] = update_phi(log_f, bound, st.kappa1, st.kappa2);
  }
  next = compute_elbo(data, st, params);
  CHECK(next >= elbo - slack);
  elbo = next;

  maximize_eta(data, st.phi, st.zeta, params, st.eta_tilde);
  next = compute_elbo(data, st, params);
  CHECK(next >= elbo - slack);
}

TEST_CASE("doubling gamma moves only the prior and bound terms") {
  std::mt19937_64 rng(35);
  const std::vector<std::string> items{"a", "b", "c"};
  const auto thetas = random_thetas(items, 3, rng);
  const Permutation sigma(items);
  const Permutation pi({"c", "a", "b"});
  const auto data = PreparedDataset::build({{"q1", sigma, pi}}, thetas);
  ModelParams params;
  VariationalState st;
  st.phi = {1e-10};  // the g side carries almost no weight
  st.kappa1 = st.kappa2 = 2.5;
  st.eta_tilde = {0.0, 0.0, 0.0};
  st.zeta = {ltp::optimal_zeta(pi, sigma, st.eta_tilde, thetas, params.lambda,
                               params.gamma)};
  const double before = compute_elbo(data, st, params);
  ModelParams wide = params;
  wide.gamma = 2.0;
  st.zeta = {ltp::optimal_zeta(pi, sigma, st.eta_tilde, thetas, wide.lambda,
                               wide.gamma)};
  const double after = compute_elbo(data, st, wide);
  // At eta_tilde = 0 and phi ~ 0 the gamma-bearing terms are negligible.
  CHECK(before == doctest::Approx(after).epsilon(1e-8));
}

TEST_CASE("run_ltp_inf produces a monotone ELBO trace and is reproducible") {
  std::mt19937_64 rng(39);
  std::vector<std::string> items;
  for (int i = 0; i < 8; ++i) items.push_back("d" + std::to_string(i));
  const auto thetas = random_thetas(items, 6, rng);
  const Permutation sigma(items);
  std::vector<QueryObservation> obs;
  for (int qn = 0; qn < 20; ++qn) {
    auto shuffled = items;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    obs.push_back({"q" + std::to_string(qn), sigma, Permutation(shuffled)});
  }
  ModelParams params;
  InferenceOptions opts;
  opts.seed = 4;
  const auto a = run_ltp_inf(obs, params, thetas, opts);
  const auto b = run_ltp_inf(obs, params, thetas, opts);
  CHECK(a.eta_tilde == b.eta_tilde);
  CHECK(a.phi == b.phi);
  CHECK(a.elbo == b.elbo);
  REQUIRE(a.elbo_trace.size() >= 2);
  for (std::size_t i = 1; i < a.elbo_trace.size(); ++i) {
    CHECK(a.elbo_trace[i] >=
          a.elbo_trace[i - 1] - 1e-8 * std::abs(a.elbo_trace[i - 1]));
  }
  CHECK(a.kappa1 + a.kappa2 ==
        doctest::Approx(2.0 * params.delta + obs.size()));
}

TEST_CASE("an empty dataset returns the prior state") {
  ModelParams params;
  InferenceOptions opts;
  const auto st = run_ltp_inf(std::vector<QueryObservation>{}, params, {},
                              opts);
  CHECK(st.kappa1 == doctest::Approx(params.delta));
  CHECK(st.kappa2 == doctest::Approx(params.delta));
  CHECK(st.converged);
  for (double e : st.eta_tilde) CHECK(e == 0.0);
}

TEST_CASE("identity observations leave eta_tilde near zero") {
  std::mt19937_64 rng(43);
  std::vector<std::string> items;
  for (int i = 0; i < 8; ++i) items.push_back("d" + std::to_string(i));
  const auto thetas = random_thetas(items, 6, rng);
  const Permutation sigma(items);
  std::vector<QueryObservation> obs;
  for (int qn = 0; qn < 30; ++qn) {
    obs.push_back({"q" + std::to_string(qn), sigma, sigma});
  }
  ModelParams params;
  InferenceOptions opts;
  opts.seed = 6;
  const auto st = run_ltp_inf(obs, params, thetas, opts);
  for (double e : st.eta_tilde) CHECK(std::abs(e) < 0.1);
}

TEST_CASE("inference recovers the dominant topic of a planted eta") {
  std::mt19937_64 rng(47);
  const int T = 5;
  std::vector<std::string> items;
  for (int i = 0; i < 6; ++i) items.push_back("d" + std::to_string(i));
  const auto thetas = random_thetas(items, T, rng);
  std::vector<double> eta_true(T, 0.0);
  eta_true[1] = 6.0;
  const Permutation sigma(items);
  ModelParams params;
  std::vector<QueryObservation> obs;
  for (int qn = 0; qn < 200; ++qn) {
    obs.push_back({"q" + std::to_string(qn), sigma,
                   sample_g(sigma, eta_true, thetas, params.lambda, rng)});
  }
  InferenceOptions opts;
  opts.seed = 8;
  const auto st = run_ltp_inf(obs, params, thetas, opts);
  const auto argmax = std::distance(
      st.eta_tilde.begin(),
      std::max_element(st.eta_tilde.begin(), st.eta_tilde.end()));
  CHECK(argmax == 1);
}

TEST_CASE("phi tracks the true switch on mixed data") {
  std::mt19937_64 rng(51);
  const int T = 4;
  std::vector<std::string> items;
  for (int i = 0; i < 5; ++i) items.push_back("d" + std::to_string(i));
  const auto thetas = random_thetas(items, T, rng);
  std::vector<double> eta_true{5.0, -3.0, 4.0, -2.0};
  const Permutation sigma(items);
  ModelParams params;
  std::vector<QueryObservation> obs;
  std::vector<int> z_true;
  std::bernoulli_distribution coin(0.6);
  for (int qn = 0; qn < 1000; ++qn) {
    const bool z = coin(rng);
    z_true.push_back(z ? 1 : 0);
    obs.push_back({"q" + std::to_string(qn), sigma,
                   z ? sample_g(sigma, eta_true, thetas, params.lambda, rng)
                     : sample_f(sigma, params.mu, rng)});
  }
  InferenceOptions opts;
  opts.seed = 10;
  const auto st = run_ltp_inf(obs, params, thetas, opts);

  // Bin queries by phi and compare bin index against the empirical z rate.
  std::vector<std::size_t> order(obs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return st.phi[a] < st.phi[b]; });
  const int bins = 10;
  std::vector<double> rate(bins, 0.0);
  const std::size_t per = obs.size() / bins;
  for (int b = 0; b < bins; ++b) {
    for (std::size_t i = 0; i < per; ++i) {
      rate[b] += z_true[order[b * per + i]];
    }
    rate[b] /= static_cast<double>(per);
  }
  // Spearman correlation between bin index and z rate.
  std::vector<double> rank(bins);
  std::iota(rank.begin(), rank.end(), 0.0);
  std::vector<double> rate_rank(bins);
  std::vector<int> idx(bins);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return rate[a] < rate[b]; });
  for (int p = 0; p < bins; ++p) rate_rank[idx[p]] = p;
  double num = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double d = rank[b] - rate_rank[b];
    num += d * d;
  }
  const double spearman =
      1.0 - 6.0 * num / (bins * (static_cast<double>(bins) * bins - 1));
  CHECK(spearman > 0.8);
}
