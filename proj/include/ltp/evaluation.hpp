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

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ltp/perm_models.hpp"
#include "ltp/rankings.hpp"

namespace ltp {

// Topic indices in decreasing eta order; ties broken by topic index.
std::vector<int> rank_topics(std::span<const double> eta_tilde);

struct EvalReport {
  std::map<int, double> p_at;       // k -> precision at k
  std::map<int, double> p_plus;     // k -> precision at |T_act| + k
  double r_precision = 0.0;
  double map_score = 0.0;
  std::vector<std::pair<double, double>> pr_curve;  // (precision, recall)
};

// Precision/recall battery over the inferred topic ranking vs the true
// personalized set. P@k cutoffs {1,3,5}; P@+k cutoffs {1,3}.
EvalReport retrieval_metrics(std::span<const int> ranked_topics,
                             const std::set<int>& t_act);

enum class PairLabel { kFirstPersonalized, kSecondPersonalized };

// Optional mixture weighting for the disambiguation likelihood.
struct DisambiguateOptions {
  double lambda = 0.9;
  // When >= 0, compare ln(tau_mean*g + (1-tau_mean)*f) instead of pure g;
  // mu is the f spread used by the mixture.
  double tau_mean = -1.0;
  double mu = 10.0;
};

// Declares the list with the higher conditional likelihood personalized.
// Ties go to "second personalized" (first vanilla), deterministically.
PairLabel disambiguate(const Permutation& l1, const Permutation& l2,
                       std::span<const double> eta,
                       const ThetaMap& theta_by_item,
                       const DisambiguateOptions& options);

// argmax over users of g(pi | sigma, eta_u); ties by user-id order.
std::string classify_user(const QueryObservation& obs,
                          const std::map<std::string, std::vector<double>>&
                              profiles,
                          const ThetaMap& theta_by_item, double lambda);

struct Evidence {
  std::string query_id;
  std::string item_id;
  int rank_before = 0;  // rank in sigma
  int rank_after = 0;   // rank in pi
  int dominant_topic = 0;
  double score = 0.0;  // (rank shift) * eta' theta
};

// Promoted items ranked by how strongly the learned eta explains the move.
std::vector<Evidence> extract_evidence(
    const std::vector<QueryObservation>& observations,
    std::span<const double> eta_tilde, const ThetaMap& theta_by_item,
    int top_j);

}  // namespace ltp
