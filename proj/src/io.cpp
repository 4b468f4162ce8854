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

#include "ltp/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ltp {

namespace {

using nlohmann::json;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError("cannot open file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

json parse_line(const std::string& line, const std::string& path, int lineno) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) {
    throw SchemaError(path + ":" + std::to_string(lineno) + ": invalid JSON");
  }
  return j;
}

json parse_file(std::ifstream& in, const std::string& path) {
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw SchemaError(path + ": invalid JSON");
  return j;
}

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) {
    throw SchemaError(where + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace

std::vector<QueryObservation> read_observations(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<QueryObservation> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const json j = parse_line(line, path, lineno);
    const std::string where = path + ":" + std::to_string(lineno);
    out.push_back(align_lists(
        require<std::vector<std::string>>(j, "vanilla", where),
        require<std::vector<std::string>>(j, "personalized", where),
        require<std::string>(j, "query_id", where)));
  }
  return out;
}

void write_observations(const std::string& path,
                        const std::vector<QueryObservation>& observations) {
  std::ofstream out = open_output(path);
  for (const auto& obs : observations) {
    out << json{{"query_id", obs.query_id},
                {"vanilla", obs.sigma.items()},
                {"personalized", obs.pi.items()}}
               .dump()
        << '\n';
  }
}

std::vector<Document> read_items(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<Document> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const json j = parse_line(line, path, lineno);
    const std::string where = path + ":" + std::to_string(lineno);
    out.push_back({require<std::string>(j, "item_id", where),
                   require<std::string>(j, "text", where)});
  }
  return out;
}

void write_items(const std::string& path, const std::vector<Document>& items) {
  std::ofstream out = open_output(path);
  for (const auto& item : items) {
    out << json{{"item_id", item.item_id}, {"text", item.text}}.dump()
        << '\n';
  }
}

std::vector<std::pair<std::string, std::vector<double>>> read_topic_map_rows(
    const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::pair<std::string, std::vector<double>>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const json j = parse_line(line, path, lineno);
    const std::string where = path + ":" + std::to_string(lineno);
    out.emplace_back(require<std::string>(j, "item_id", where),
                     require<std::vector<double>>(j, "theta", where));
  }
  return out;
}

void write_topic_maps(const std::string& path,
                      const std::vector<TopicMap>& maps) {
  std::ofstream out = open_output(path);
  for (const auto& map : maps) {
    out << json{{"item_id", map.item_id}, {"theta", map.theta}}.dump()
        << '\n';
  }
}

TopicModel read_topics(const std::string& path) {
  std::ifstream in = open_input(path);
  const json j = parse_file(in, path);
  TopicModel model;
  model.T = require<int>(j, "T", path);
  model.vocab = require<std::vector<std::string>>(j, "vocab", path);
  model.beta = require<std::vector<std::vector<double>>>(j, "beta", path);
  if (static_cast<int>(model.beta.size()) != model.T) {
    throw SchemaError(path + ": beta row count does not match T");
  }
  return model;
}

void write_topics(const std::string& path, const TopicModel& model) {
  std::ofstream out = open_output(path);
  out << json{{"T", model.T}, {"vocab", model.vocab}, {"beta", model.beta}}
             .dump(2)
      << '\n';
}

GroundTruth read_ground_truth(const std::string& path) {
  std::ifstream in = open_input(path);
  const json j = parse_file(in, path);
  GroundTruth truth;
  truth.profile_id = require<std::string>(j, "profile_id", path);
  for (int t : require<std::vector<int>>(j, "personalized_topics", path)) {
    truth.personalized_topics.insert(t);
  }
  truth.eta_true = require<std::vector<double>>(j, "eta_true", path);
  truth.z_true =
      require<std::map<std::string, bool>>(j, "z_true", path);
  return truth;
}

void write_ground_truth(const std::string& path, const GroundTruth& truth) {
  std::ofstream out = open_output(path);
  out << json{{"profile_id", truth.profile_id},
              {"personalized_topics", truth.personalized_topics},
              {"eta_true", truth.eta_true},
              {"z_true", truth.z_true}}
             .dump(2)
      << '\n';
}

ProfileOutput read_profile(const std::string& path) {
  std::ifstream in = open_input(path);
  const json j = parse_file(in, path);
  ProfileOutput p;
  p.eta_tilde = require<std::vector<double>>(j, "eta_tilde", path);
  p.kappa1 = require<double>(j, "kappa1", path);
  p.kappa2 = require<double>(j, "kappa2", path);
  p.tau_mean = require<double>(j, "tau_mean", path);
  p.lambda = require<double>(j, "lambda", path);
  p.mu = require<double>(j, "mu", path);
  p.elbo_trace = require<std::vector<double>>(j, "elbo_trace", path);
  p.phi = require<std::map<std::string, double>>(j, "phi", path);
  if (j.contains("em_trace")) {
    for (const auto& row : j.at("em_trace")) {
      p.em_trace.push_back({row.at("iter").get<double>(),
                            row.at("lambda").get<double>(),
                            row.at("mu").get<double>(),
                            row.at("elbo").get<double>()});
    }
  }
  return p;
}

void write_profile(const std::string& path, const ProfileOutput& profile) {
  json j{{"eta_tilde", profile.eta_tilde},
         {"kappa1", profile.kappa1},
         {"kappa2", profile.kappa2},
         {"tau_mean", profile.tau_mean},
         {"lambda", profile.lambda},
         {"mu", profile.mu},
         {"elbo_trace", profile.elbo_trace},
         {"phi", profile.phi}};
  if (!profile.em_trace.empty()) {
    json trace = json::array();
    for (const auto& row : profile.em_trace) {
      trace.push_back({{"iter", static_cast<int>(row[0])},
                       {"lambda", row[1]},
                       {"mu", row[2]},
                       {"elbo", row[3]}});
    }
    j["em_trace"] = trace;
  }
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
}

namespace {

json metrics_to_json(const EvalReport& metrics) {
  json pr = json::array();
  for (const auto& [p, r] : metrics.pr_curve) pr.push_back({p, r});
  return json{{"p_at", metrics.p_at},
              {"p_plus", metrics.p_plus},
              {"r_precision", metrics.r_precision},
              {"map", metrics.map_score},
              {"pr_curve", pr}};
}

json evidence_to_json(const Evidence& ev) {
  return json{{"query_id", ev.query_id},   {"item_id", ev.item_id},
              {"rank_before", ev.rank_before}, {"rank_after", ev.rank_after},
              {"dominant_topic", ev.dominant_topic}, {"score", ev.score}};
}

}  // namespace

void write_report_json(const std::string& path, const Report& report) {
  json evidence = json::array();
  for (const auto& ev : report.evidence) evidence.push_back(evidence_to_json(ev));
  json j{{"metrics", metrics_to_json(report.metrics)},
         {"extra", report.extra},
         {"evidence", evidence}};
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
}

void write_report_markdown(const std::string& path, const Report& report) {
  std::ofstream out = open_output(path);
  out << "# Evaluation report\n\n";
  auto pct = [](double v) {
    std::ostringstream os;
    os.precision(2);
    os << std::fixed << 100.0 * v;
    return os.str();
  };
  const auto& m = report.metrics;
  // Reports carrying only accuracy figures (disambiguate, classify) have no
  // retrieval metrics; skip the table rather than fabricate zeros.
  if (!m.p_at.empty()) {
    out << "| P@1 | P@3 | P@5 | R-pre | P@+1 | P@+3 | MAP |\n";
    out << "|-----|-----|-----|-------|------|------|-----|\n";
    out << "| " << pct(m.p_at.at(1)) << " | " << pct(m.p_at.at(3)) << " | "
        << pct(m.p_at.at(5)) << " | " << pct(m.r_precision) << " | "
        << pct(m.p_plus.at(1)) << " | " << pct(m.p_plus.at(3)) << " | "
        << pct(m.map_score) << " |\n\n";
  }
  if (!report.extra.empty()) {
    out << "## Additional figures\n\n";
    for (const auto& [name, value] : report.extra) {
      out << "- " << name << ": " << value << "\n";
    }
    out << "\n";
  }
  if (!report.evidence.empty()) {
    out << "## Evidence\n\n";
    out << "| query | item | rank before | rank after | topic | score |\n";
    out << "|-------|------|-------------|------------|-------|-------|\n";
    for (const auto& ev : report.evidence) {
      out << "| " << ev.query_id << " | " << ev.item_id << " | "
          << ev.rank_before << " | " << ev.rank_after << " | "
          << ev.dominant_topic << " | " << ev.score << " |\n";
    }
  }
}

}  // namespace ltp
