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

#include <array>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltp/evaluation.hpp"
#include "ltp/inference.hpp"
#include "ltp/rankings.hpp"
#include "ltp/topic_model.hpp"

namespace ltp {

struct FileNotFoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// observations.jsonl: {"query_id", "vanilla": [...], "personalized": [...]}
// per line; lists are aligned on read.
std::vector<QueryObservation> read_observations(const std::string& path);
void write_observations(const std::string& path,
                        const std::vector<QueryObservation>& observations);

// items.jsonl: {"item_id", "text"} per line.
std::vector<Document> read_items(const std::string& path);
void write_items(const std::string& path,
                 const std::vector<Document>& items);

// topic_maps.jsonl: {"item_id", "theta": [...]} per line. Rows are returned
// raw; run import_topic_maps to normalize/validate.
std::vector<std::pair<std::string, std::vector<double>>> read_topic_map_rows(
    const std::string& path);
void write_topic_maps(const std::string& path,
                      const std::vector<TopicMap>& maps);

// topics.json: {"T", "vocab": [...], "beta": [[...]]}.
TopicModel read_topics(const std::string& path);
void write_topics(const std::string& path, const TopicModel& model);

struct GroundTruth {
  std::string profile_id;
  std::set<int> personalized_topics;
  std::vector<double> eta_true;
  std::map<std::string, bool> z_true;  // per query
};

GroundTruth read_ground_truth(const std::string& path);
void write_ground_truth(const std::string& path, const GroundTruth& truth);

struct ProfileOutput {
  std::vector<double> eta_tilde;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double tau_mean = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  std::vector<double> elbo_trace;
  std::map<std::string, double> phi;
  // Present only for EM runs: (iter, lambda, mu, elbo) rows.
  std::vector<std::array<double, 4>> em_trace;
};

ProfileOutput read_profile(const std::string& path);
void write_profile(const std::string& path, const ProfileOutput& profile);

struct Report {
  EvalReport metrics;
  std::map<std::string, double> extra;  // named accuracy figures
  std::vector<Evidence> evidence;
};

void write_report_json(const std::string& path, const Report& report);
void write_report_markdown(const std::string& path, const Report& report);

}  // namespace ltp
