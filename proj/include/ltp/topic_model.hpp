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
#include <optional>
#include <string>
#include <vector>

#include "ltp/perm_models.hpp"

namespace ltp {

struct TopicModel {
  int T = 0;
  std::vector<std::string> vocab;
  std::vector<std::vector<double>> beta;  // T rows, each a simplex over vocab
  double nu = 0.01;
  double alpha = 1.0;
};

struct TopicMap {
  std::string item_id;
  std::vector<double> theta;  // length-T simplex
};

struct Document {
  std::string item_id;
  std::string text;
};

// Lowercase, split on non-alphanumerics, drop tokens shorter than 2.
std::vector<std::string> tokenize(const std::string& text);

// Words with corpus count >= min_count, lexicographic order. Throws when the
// filter leaves nothing.
std::vector<std::string> build_vocab(const std::vector<Document>& documents,
                                     int min_count);

struct FitOptions {
  int T = 10;
  int max_iters = 100;
  std::uint64_t seed = 0;
  double nu = 0.01;
  double alpha = 1.0;
  double tol = 1e-6;  // relative change of the fitting bound
  std::optional<std::vector<std::string>> vocab;  // built from corpus if unset
  // Test hooks; random when unset.
  std::optional<std::vector<std::vector<double>>> init_beta_tilde;
  std::optional<std::vector<std::vector<double>>> init_theta_tilde;
};

struct FitResult {
  TopicModel model;
  std::vector<TopicMap> topic_maps;
  std::vector<double> bound_trace;  // variational bound after each sweep
  bool converged = false;
};

// Variational fit of the topic block: Dirichlet q over each beta row,
// per-token responsibilities, Gaussian mean per item topic-vector with the
// log-sum-exp bound on the softmax normalizer. Returned theta is the softmax
// of the Gaussian mean.
FitResult fit_topics(const std::vector<Document>& corpus,
                     const FitOptions& options);

// Rows of (item_id, weights); each row normalized to a simplex. Throws on
// negative weights, all-zero rows, or a dimension mismatch with expected_T
// (when expected_T > 0).
std::vector<TopicMap> import_topic_maps(
    const std::vector<std::pair<std::string, std::vector<double>>>& rows,
    int expected_T = 0);

ThetaMap to_theta_map(const std::vector<TopicMap>& maps);

}  // namespace ltp
