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
#include <set>
#include <string>
#include <vector>

#include "ltp/perm_models.hpp"
#include "ltp/rankings.hpp"
#include "ltp/topic_model.hpp"

namespace ltp {

// Ground-truth surrogate for a personalization engine: known topics, items,
// profiles, and two ways of producing the personalized list.

struct SimItem {
  std::string id;
  std::vector<double> theta;
  std::vector<std::string> tokens;
};

struct World {
  TopicModel model;
  std::vector<SimItem> items;

  ThetaMap theta_map() const;
};

struct WorldOptions {
  int T = 50;
  int vocab_size = 2000;
  int items_per_topic = 20;
  int min_tokens = 50;
  int max_tokens = 200;
  int max_active_topics = 8;  // items mix 1..max_active_topics topics
  std::uint64_t seed = 0;
};

// Topics drawn from a sparse Dirichlet; item topic-maps are sparse mixtures;
// item text follows the topic-then-word generative process.
World gen_world(const WorldOptions& options);

struct SimQuery {
  std::string id;
  int topic = 0;
  std::vector<std::string> words;
};

// Queries of 2-4 words drawn from the topic's top-10 word list.
std::vector<SimQuery> gen_queries(const World& world, int topic, int count,
                                  std::mt19937_64& rng);

// Log-likelihood of the query words under the item's topic mixture.
double relevance(const World& world, const SimQuery& query,
                 const SimItem& item);

// Top-n items by relevance, ties broken by item-id.
Permutation gen_vanilla(const World& world, const SimQuery& query, int n);

struct SyntheticProfile {
  std::string profile_id;
  std::set<int> personalized_topics;  // T_act
  std::vector<double> eta_true;       // nonzero exactly on T_act
  double tau_true = 0.7;
};

SyntheticProfile gen_profile(int T, int k_personalized, double eta_magnitude,
                             double tau, std::mt19937_64& rng);

// Exact draw from the generative model: z ~ Bernoulli(tau), pi ~ g or f.
// Returns the personalized list and the drawn z.
std::pair<Permutation, bool> personalize_generative(
    const Permutation& sigma, const SyntheticProfile& profile,
    const ThetaMap& theta_by_item, double lambda, double mu,
    std::mt19937_64& rng);

// Deliberately model-mismatched surrogate: items whose theta weight on any
// personalized topic exceeds 0.2 move to the front, stably.
Permutation personalize_deterministic(const Permutation& sigma,
                                      const SyntheticProfile& profile,
                                      const ThetaMap& theta_by_item);

enum class PersonalizeMode { kGenerative, kDeterministic };

struct DatasetOptions {
  int num_queries = 500;       // m
  int results_per_query = 10;  // n
  double lambda = 0.9;
  double mu = 10.0;
  // Fraction of queries drawn from the user's personalized topics; the rest
  // cycle round-robin over all topics.  Models a user querying their own
  // interests more often than average.  Zero keeps the stream uniform.
  double profile_affinity = 0.0;
  PersonalizeMode mode = PersonalizeMode::kGenerative;
  std::uint64_t seed = 0;
};

struct SimDataset {
  std::vector<QueryObservation> observations;
  std::vector<bool> z_true;  // meaningful for the generative mode
  SyntheticProfile profile;
};

// Full pipeline: query topics mix profile-affine and round-robin draws,
// vanilla lists by relevance, personalized by the chosen mode.
SimDataset make_dataset(const World& world, const SyntheticProfile& profile,
                        const DatasetOptions& options);

}  // namespace ltp
