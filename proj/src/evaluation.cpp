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

#include "ltp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ltp/kernels.hpp"
#include "ltp/math_util.hpp"

namespace ltp {

std::vector<int> rank_topics(std::span<const double> eta_tilde) {
  std::vector<int> order(eta_tilde.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return eta_tilde[a] > eta_tilde[b];
  });
  return order;
}

EvalReport retrieval_metrics(std::span<const int> ranked_topics,
                             const std::set<int>& t_act) {
  if (t_act.empty()) {
    throw std::invalid_argument("retrieval_metrics: empty T_act");
  }
  const int T = static_cast<int>(ranked_topics.size());
  auto precision_at = [&](int cutoff) {
    cutoff = std::min(cutoff, T);
    if (cutoff <= 0) return 0.0;
    int hits = 0;
    for (int i = 0; i < cutoff; ++i) {
      if (t_act.count(ranked_topics[i])) ++hits;
    }
    return static_cast<double>(hits) / cutoff;
  };

  EvalReport report;
  for (int k : {1, 3, 5}) report.p_at[k] = precision_at(k);
  const int n_act = static_cast<int>(t_act.size());
  for (int k : {1, 3}) report.p_plus[k] = precision_at(n_act + k);
  report.r_precision = precision_at(n_act);

  int hits = 0;
  double ap = 0.0;
  for (int i = 0; i < T; ++i) {
    const bool relevant = t_act.count(ranked_topics[i]) != 0;
    if (relevant) {
      ++hits;
      ap += static_cast<double>(hits) / (i + 1);
    }
    report.pr_curve.emplace_back(static_cast<double>(hits) / (i + 1),
                                 static_cast<double>(hits) / n_act);
  }
  report.map_score = ap / n_act;
  return report;
}

namespace {

double pair_likelihood(const Permutation& personalized,
                       const Permutation& vanilla,
                       std::span<const double> eta,
                       const ThetaMap& theta_by_item,
                       const DisambiguateOptions& options) {
  const double log_g =
      g_log_prob(personalized, vanilla, eta, theta_by_item, options.lambda);
  if (options.tau_mean < 0.0) return log_g;
  const double log_f = f_log_prob(personalized, vanilla, options.mu);
  const double parts[] = {std::log(options.tau_mean) + log_g,
                          std::log(1.0 - options.tau_mean) + log_f};
  return log_sum_exp(parts);
}

}  // namespace

PairLabel disambiguate(const Permutation& l1, const Permutation& l2,
                       std::span<const double> eta,
                       const ThetaMap& theta_by_item,
                       const DisambiguateOptions& options) {
  const double l1_personalized =
      pair_likelihood(l1, l2, eta, theta_by_item, options);
  const double l2_personalized =
      pair_likelihood(l2, l1, eta, theta_by_item, options);
  // Ties go to "l1 is vanilla".
  return l1_personalized > l2_personalized ? PairLabel::kFirstPersonalized
                                           : PairLabel::kSecondPersonalized;
}

std::string classify_user(
    const QueryObservation& obs,
    const std::map<std::string, std::vector<double>>& profiles,
    const ThetaMap& theta_by_item, double lambda) {
  if (profiles.size() < 2) {
    throw std::invalid_argument("classify_user: need at least 2 profiles");
  }
  std::string best_user;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [user, eta] : profiles) {  // std::map: user-id order
    const double ll = g_log_prob(obs.pi, obs.sigma, eta, theta_by_item,
                                 lambda);
    if (ll > best) {
      best = ll;
      best_user = user;
    }
  }
  return best_user;
}

std::vector<Evidence> extract_evidence(
    const std::vector<QueryObservation>& observations,
    std::span<const double> eta_tilde, const ThetaMap& theta_by_item,
    int top_j) {
  std::vector<Evidence> all;
  for (const auto& obs : observations) {
    for (int r = 1; r <= obs.pi.size(); ++r) {
      const std::string& item = obs.pi.item_at(r);
      const int before = obs.sigma.rank_of(item);
      if (r >= before) continue;  // only promotions
      auto it = theta_by_item.find(item);
      if (it == theta_by_item.end()) {
        throw std::invalid_argument("missing topic-map for item: " + item);
      }
      Evidence ev;
      ev.query_id = obs.query_id;
      ev.item_id = item;
      ev.rank_before = before;
      ev.rank_after = r;
      ev.score = (before - r) * kernels::dot(eta_tilde.data(),
                                             it->second.data(),
                                             eta_tilde.size());
      ev.dominant_topic = static_cast<int>(
          std::max_element(it->second.begin(), it->second.end()) -
          it->second.begin());
      all.push_back(std::move(ev));
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const Evidence& a,
                                              const Evidence& b) {
    return a.score > b.score;
  });
  if (top_j >= 0 && static_cast<int>(all.size()) > top_j) all.resize(top_j);
  return all;
}

}  // namespace ltp
