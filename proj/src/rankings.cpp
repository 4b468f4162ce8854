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

#include "ltp/rankings.hpp"

#include <cstdlib>
#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace ltp {

Permutation::Permutation(std::vector<std::string> items)
    : items_(std::move(items)) {
  rank_.reserve(items_.size());
  for (int i = 0; i < static_cast<int>(items_.size()); ++i) {
    auto [it, inserted] = rank_.emplace(items_[i], i + 1);
    if (!inserted) {
      throw std::invalid_argument("duplicate item-id in ranked list: " +
                                  items_[i]);
    }
  }
}

int Permutation::rank_of(const std::string& item) const {
  auto it = rank_.find(item);
  if (it == rank_.end()) {
    throw std::out_of_range("item not present in permutation: " + item);
  }
  return it->second;
}

QueryObservation align_lists(const std::vector<std::string>& vanilla,
                             const std::vector<std::string>& personalized,
                             std::string query_id) {
  auto check_unique = [](const std::vector<std::string>& list,
                         const char* name) {
    std::unordered_set<std::string> seen;
    for (const auto& id : list) {
      if (!seen.insert(id).second) {
        throw std::invalid_argument(std::string("duplicate item-id in ") +
                                    name + " list: " + id);
      }
    }
  };
  check_unique(vanilla, "vanilla");
  check_unique(personalized, "personalized");

  std::unordered_set<std::string> in_vanilla(vanilla.begin(), vanilla.end());
  std::unordered_set<std::string> in_pers(personalized.begin(),
                                          personalized.end());

  std::vector<std::string> sigma = vanilla;
  for (const auto& id : personalized) {
    if (!in_vanilla.count(id)) sigma.push_back(id);
  }
  std::vector<std::string> pi = personalized;
  for (const auto& id : vanilla) {
    if (!in_pers.count(id)) pi.push_back(id);
  }

  QueryObservation obs;
  obs.query_id = std::move(query_id);
  obs.sigma = Permutation(std::move(sigma));
  obs.pi = Permutation(std::move(pi));
  return obs;
}

DisplacementStats displacement_stats(const QueryObservation& obs) {
  if (obs.sigma.size() != obs.pi.size()) {
    throw std::invalid_argument("displacement_stats: unaligned observation");
  }
  DisplacementStats stats;
  const int n = obs.sigma.size();
  for (int r = 1; r <= n; ++r) {
    const std::string& item = obs.sigma.item_at(r);
    const std::int64_t shift = std::abs(static_cast<std::int64_t>(r) -
                                        obs.pi.rank_of(item));
    stats.total_displacement += shift;
    stats.max_item_shift = std::max(stats.max_item_shift, shift);
  }
  stats.is_reranked = stats.total_displacement != 0;
  // Discordant pairs, O(n^2); result lists are short.
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      const int pa = obs.pi.rank_of(obs.sigma.item_at(a));
      const int pb = obs.pi.rank_of(obs.sigma.item_at(b));
      if (pa > pb) ++stats.kendall_tau_distance;
    }
  }
  return stats;
}

}  // namespace ltp
