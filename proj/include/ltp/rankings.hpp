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
#include <string>
#include <unordered_map>
#include <vector>

namespace ltp {

// A ranked list as a bijection rank -> item. Ranks are 1-based.
class Permutation {
 public:
  Permutation() = default;

  // Throws std::invalid_argument naming the offending id on duplicates.
  explicit Permutation(std::vector<std::string> items);

  int size() const { return static_cast<int>(items_.size()); }

  // Item at 1-based rank r.
  const std::string& item_at(int rank) const { return items_.at(rank - 1); }

  // 1-based rank of an item; throws std::out_of_range if absent.
  int rank_of(const std::string& item) const;

  bool contains(const std::string& item) const {
    return rank_.count(item) != 0;
  }

  const std::vector<std::string>& items() const { return items_; }

  bool operator==(const Permutation& other) const {
    return items_ == other.items_;
  }

 private:
  std::vector<std::string> items_;
  std::unordered_map<std::string, int> rank_;
};

// One aligned (vanilla, personalized) pair for a query. sigma and pi cover
// the identical item set.
struct QueryObservation {
  std::string query_id;
  Permutation sigma;  // vanilla
  Permutation pi;     // personalized
};

// Append items present in only one list to the end of the other, in their
// original relative order, so both become permutations of the union.
QueryObservation align_lists(const std::vector<std::string>& vanilla,
                             const std::vector<std::string>& personalized,
                             std::string query_id = {});

struct DisplacementStats {
  std::int64_t total_displacement = 0;  // sum over items of |rank shift|
  std::int64_t max_item_shift = 0;      // largest single-item |rank shift|
  bool is_reranked = false;
  std::int64_t kendall_tau_distance = 0;  // discordant pair count
};

DisplacementStats displacement_stats(const QueryObservation& obs);

}  // namespace ltp
