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

#include "ltp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ltp {

namespace {

std::vector<double> sample_dirichlet(double concentration, int dim,
                                     std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> out(dim);
  double total = 0.0;
  for (double& x : out) {
    x = gamma(rng);
    total += x;
  }
  if (total <= 0.0) {
    // All draws underflowed; fall back to a single spike.
    std::uniform_int_distribution<int> pick(0, dim - 1);
    std::fill(out.begin(), out.end(), 0.0);
    out[pick(rng)] = 1.0;
    return out;
  }
  for (double& x : out) x /= total;
  return out;
}

int sample_categorical(std::span<const double> probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  for (std::size_t k = 0; k < probs.size(); ++k) {
    u -= probs[k];
    if (u <= 0.0) return static_cast<int>(k);
  }
  return static_cast<int>(probs.size()) - 1;
}

std::string padded(const char* prefix, int value, int width = 5) {
  std::string digits = std::to_string(value);
  std::string out(prefix);
  out.append(width - std::min<std::size_t>(width, digits.size()), '0');
  out += digits;
  return out;
}

}  // namespace

ThetaMap World::theta_map() const {
  ThetaMap out;
  out.reserve(items.size());
  for (const auto& item : items) out.emplace(item.id, item.theta);
  return out;
}

World gen_world(const WorldOptions& options) {
  if (options.T < 2) throw std::invalid_argument("gen_world: T must be >= 2");
  std::mt19937_64 rng(options.seed);

  World world;
  world.model.T = options.T;
  world.model.vocab.reserve(options.vocab_size);
  for (int w = 0; w < options.vocab_size; ++w) {
    world.model.vocab.push_back(padded("w", w));
  }
  world.model.beta.reserve(options.T);
  for (int k = 0; k < options.T; ++k) {
    world.model.beta.push_back(
        sample_dirichlet(world.model.nu, options.vocab_size, rng));
  }

  std::uniform_int_distribution<int> active_count(1, options.max_active_topics);
  std::uniform_int_distribution<int> any_topic(0, options.T - 1);
  std::uniform_int_distribution<int> token_count(options.min_tokens,
                                                 options.max_tokens);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  int item_counter = 0;
  for (int k = 0; k < options.T; ++k) {
    for (int rep = 0; rep < options.items_per_topic; ++rep) {
      SimItem item;
      item.id = padded("i", item_counter++);
      // Anchor topic k plus up to max_active - 1 random extras.
      std::set<int> active{k};
      const int extras =
          std::min(active_count(rng), options.T) - 1;
      while (static_cast<int>(active.size()) < 1 + extras) {
        active.insert(any_topic(rng));
      }
      item.theta.assign(options.T, 0.0);
      const std::vector<double> mix =
          sample_dirichlet(2.0, static_cast<int>(active.size()), rng);
      // The anchor keeps the largest share so top-n retrieval stays topical.
      std::vector<double> sorted_mix = mix;
      std::sort(sorted_mix.begin(), sorted_mix.end(), std::greater<>());
      std::size_t mi = 1;
      for (int topic : active) {
        item.theta[topic] = topic == k ? sorted_mix[0] : sorted_mix[mi++];
      }
      const int n_tokens = token_count(rng);
      item.tokens.reserve(n_tokens);
      for (int t = 0; t < n_tokens; ++t) {
        const int topic = sample_categorical(item.theta, rng);
        const int word = sample_categorical(world.model.beta[topic], rng);
        item.tokens.push_back(world.model.vocab[word]);
      }
      world.items.push_back(std::move(item));
    }
  }
  return world;
}

namespace {

std::vector<int> top_words(const TopicModel& model, int topic, int count) {
  std::vector<int> order(model.vocab.size());
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(),
                    order.begin() + std::min<std::size_t>(count, order.size()),
                    order.end(), [&](int a, int b) {
                      if (model.beta[topic][a] != model.beta[topic][b]) {
                        return model.beta[topic][a] > model.beta[topic][b];
                      }
                      return a < b;
                    });
  order.resize(std::min<std::size_t>(count, order.size()));
  return order;
}

}  // namespace

std::vector<SimQuery> gen_queries(const World& world, int topic, int count,
                                  std::mt19937_64& rng) {
  if (topic < 0 || topic >= world.model.T) {
    throw std::invalid_argument("gen_queries: topic out of range");
  }
  const std::vector<int> candidates = top_words(world.model, topic, 10);
  std::uniform_int_distribution<int> word_count(2, 4);
  std::uniform_int_distribution<int> pick(0,
                                          static_cast<int>(candidates.size()) -
                                              1);
  std::vector<SimQuery> queries;
  queries.reserve(count);
  for (int q = 0; q < count; ++q) {
    SimQuery query;
    query.topic = topic;
    query.id = "t" + std::to_string(topic) + "_q" + std::to_string(q);
    const int words = word_count(rng);
    for (int w = 0; w < words; ++w) {
      query.words.push_back(world.model.vocab[candidates[pick(rng)]]);
    }
    queries.push_back(std::move(query));
  }
  return queries;
}

double relevance(const World& world, const SimQuery& query,
                 const SimItem& item) {
  double total = 0.0;
  for (const auto& word : query.words) {
    // vocab ids are zero-padded, so lexicographic order matches numeric.
    const auto it = std::lower_bound(world.model.vocab.begin(),
                                     world.model.vocab.end(), word);
    if (it == world.model.vocab.end() || *it != word) {
      total += std::log(1e-12);
      continue;
    }
    const int w = static_cast<int>(it - world.model.vocab.begin());
    double p = 0.0;
    for (int k = 0; k < world.model.T; ++k) {
      p += item.theta[k] * world.model.beta[k][w];
    }
    total += std::log(p + 1e-12);
  }
  return total;
}

Permutation gen_vanilla(const World& world, const SimQuery& query, int n) {
  if (n > static_cast<int>(world.items.size())) {
    throw std::invalid_argument("gen_vanilla: n exceeds item count");
  }
  std::vector<int> order(world.items.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> rel(world.items.size());
  for (std::size_t i = 0; i < world.items.size(); ++i) {
    rel[i] = relevance(world, query, world.items[i]);
  }
  std::partial_sort(order.begin(), order.begin() + n, order.end(),
                    [&](int a, int b) {
                      if (rel[a] != rel[b]) return rel[a] > rel[b];
                      return world.items[a].id < world.items[b].id;
                    });
  std::vector<std::string> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = world.items[order[i]].id;
  return Permutation(std::move(ids));
}

SyntheticProfile gen_profile(int T, int k_personalized, double eta_magnitude,
                             double tau, std::mt19937_64& rng) {
  if (k_personalized < 1 || k_personalized > T) {
    throw std::invalid_argument("gen_profile: k out of range");
  }
  SyntheticProfile profile;
  profile.tau_true = tau;
  std::uniform_int_distribution<int> any_topic(0, T - 1);
  while (static_cast<int>(profile.personalized_topics.size()) <
         k_personalized) {
    profile.personalized_topics.insert(any_topic(rng));
  }
  profile.eta_true.assign(T, 0.0);
  for (int topic : profile.personalized_topics) {
    profile.eta_true[topic] = eta_magnitude;
  }
  return profile;
}

std::pair<Permutation, bool> personalize_generative(
    const Permutation& sigma, const SyntheticProfile& profile,
    const ThetaMap& theta_by_item, double lambda, double mu,
    std::mt19937_64& rng) {
  std::bernoulli_distribution coin(profile.tau_true);
  const bool z = coin(rng);
  if (z) {
    return {sample_g(sigma, profile.eta_true, theta_by_item, lambda, rng),
            true};
  }
  return {sample_f(sigma, mu, rng), false};
}

Permutation personalize_deterministic(const Permutation& sigma,
                                      const SyntheticProfile& profile,
                                      const ThetaMap& theta_by_item) {
  std::vector<std::string> front, back;
  for (int r = 1; r <= sigma.size(); ++r) {
    const std::string& id = sigma.item_at(r);
    auto it = theta_by_item.find(id);
    if (it == theta_by_item.end()) {
      throw std::invalid_argument("missing topic-map for item: " + id);
    }
    bool qualifies = false;
    for (int topic : profile.personalized_topics) {
      if (it->second[topic] > 0.2) {
        qualifies = true;
        break;
      }
    }
    (qualifies ? front : back).push_back(id);
  }
  front.insert(front.end(), back.begin(), back.end());
  return Permutation(std::move(front));
}

SimDataset make_dataset(const World& world, const SyntheticProfile& profile,
                        const DatasetOptions& options) {
  SimDataset out;
  out.profile = profile;
  const ThetaMap thetas = world.theta_map();
  std::mt19937_64 rng(options.seed);

  const std::vector<int> own_topics(profile.personalized_topics.begin(),
                                    profile.personalized_topics.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int round_robin = 0;
  for (int q = 0; q < options.num_queries; ++q) {
    int topic;
    if (!own_topics.empty() && unit(rng) < options.profile_affinity) {
      std::uniform_int_distribution<std::size_t> pick(0, own_topics.size() - 1);
      topic = own_topics[pick(rng)];
    } else {
      topic = round_robin;
      round_robin = (round_robin + 1) % world.model.T;
    }
    const std::vector<SimQuery> queries =
        gen_queries(world, topic, 1, rng);
    const Permutation sigma =
        gen_vanilla(world, queries[0], options.results_per_query);

    QueryObservation obs;
    obs.query_id = queries[0].id + "_" + std::to_string(q);
    obs.sigma = sigma;
    if (options.mode == PersonalizeMode::kGenerative) {
      auto [pi, z] = personalize_generative(sigma, profile, thetas,
                                            options.lambda, options.mu, rng);
      obs.pi = std::move(pi);
      out.z_true.push_back(z);
    } else {
      obs.pi = personalize_deterministic(sigma, profile, thetas);
      out.z_true.push_back(displacement_stats(obs).is_reranked);
    }
    out.observations.push_back(std::move(obs));
  }
  return out;
}

}  // namespace ltp
