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

#include <CLI11.hpp>
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ltp/em.hpp"
#include "ltp/evaluation.hpp"
#include "ltp/inference.hpp"
#include "ltp/io.hpp"
#include "ltp/perm_models.hpp"
#include "ltp/simulator.hpp"
#include "ltp/topic_model.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 1;
constexpr int kExitFileNotFound = 2;
constexpr int kExitSchema = 3;
constexpr int kExitDimension = 4;
constexpr int kExitInternal = 5;

// Machine-readable error record on stderr, distinct exit code per class.
int fail(const std::string& kind, const std::string& message, int code) {
  json record;
  record["error"] = kind;
  record["message"] = message;
  std::cerr << record.dump() << "\n";
  return code;
}

struct CommonOpts {
  int topics = 50;
  double gamma = 1.0;
  double delta = 2.0;
  double lambda = 0.9;
  double mu = 10.0;
  bool em = false;
  double tol = 1e-6;
  int max_iters = 500;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = all cores
  double split = 0.8;
  int repeats = 10;
  std::string out_dir = ".";
};

void add_model_flags(CLI::App* app, CommonOpts& opts) {
  app->add_option("--topics", opts.topics, "Topic count T");
  app->add_option("--gamma", opts.gamma, "Gaussian scale of eta");
  app->add_option("--delta", opts.delta, "Beta prior parameter");
  app->add_option("--lambda", opts.lambda, "Score trade-off in g");
  app->add_option("--mu", opts.mu, "Spread of f");
  app->add_option("--tol", opts.tol, "Convergence tolerance");
  app->add_option("--max-iters", opts.max_iters, "Iteration cap");
  app->add_option("--seed", opts.seed, "RNG seed");
  app->add_option("--threads", opts.threads,
                  "Worker threads (0 = all cores)");
  app->add_option("--out", opts.out_dir, "Output directory");
}

int resolved_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string out_path(const CommonOpts& opts, const std::string& name) {
  std::filesystem::create_directories(opts.out_dir);
  return (std::filesystem::path(opts.out_dir) / name).string();
}

ltp::ModelParams params_of(const CommonOpts& opts) {
  ltp::ModelParams params;
  params.mu = opts.mu;
  params.lambda = opts.lambda;
  params.gamma = opts.gamma;
  params.delta = opts.delta;
  params.validate();
  return params;
}

ltp::ThetaMap load_theta_map(const std::string& path, int expected_T) {
  const auto rows = ltp::read_topic_map_rows(path);
  return ltp::to_theta_map(ltp::import_topic_maps(rows, expected_T));
}

// ---------------------------------------------------------------------------

int cmd_fit_topics(const std::string& items_path, const CommonOpts& opts,
                   int max_iters) {
  const auto documents = ltp::read_items(items_path);
  ltp::FitOptions fopts;
  fopts.T = opts.topics;
  fopts.seed = opts.seed;
  fopts.max_iters = max_iters;
  const auto fit = ltp::fit_topics(documents, fopts);
  if (!fit.converged) {
    std::cerr << json{{"warning", "fit_topics hit the iteration cap"}}.dump()
              << "\n";
  }
  ltp::write_topics(out_path(opts, "topics.json"), fit.model);
  ltp::write_topic_maps(out_path(opts, "topic_maps.jsonl"), fit.topic_maps);
  return 0;
}

int cmd_simulate(const CommonOpts& opts, int num_queries, int results,
                 int k_personalized, double eta_magnitude, double tau,
                 const std::string& mode) {
  ltp::WorldOptions wopts;
  wopts.T = opts.topics;
  wopts.seed = opts.seed;
  const auto world = ltp::gen_world(wopts);
  std::mt19937_64 rng(opts.seed + 1);
  const auto profile =
      ltp::gen_profile(wopts.T, k_personalized, eta_magnitude, tau, rng);

  ltp::DatasetOptions dopts;
  dopts.num_queries = num_queries;
  dopts.results_per_query = results;
  dopts.lambda = opts.lambda;
  dopts.mu = opts.mu;
  dopts.seed = opts.seed + 2;
  dopts.mode = mode == "deterministic" ? ltp::PersonalizeMode::kDeterministic
                                       : ltp::PersonalizeMode::kGenerative;
  const auto dataset = ltp::make_dataset(world, profile, dopts);

  ltp::write_observations(out_path(opts, "observations.jsonl"),
                          dataset.observations);
  std::vector<ltp::Document> docs;
  for (const auto& item : world.items) {
    std::string text;
    for (const auto& tok : item.tokens) {
      text += tok;
      text += ' ';
    }
    if (!text.empty()) text.pop_back();
    docs.push_back({item.id, text});
  }
  ltp::write_items(out_path(opts, "items.jsonl"), docs);
  std::vector<ltp::TopicMap> maps;
  for (const auto& item : world.items) maps.push_back({item.id, item.theta});
  ltp::write_topic_maps(out_path(opts, "topic_maps.jsonl"), maps);
  ltp::write_topics(out_path(opts, "topics.json"), world.model);

  ltp::GroundTruth truth;
  truth.profile_id = profile.profile_id;
  truth.personalized_topics = profile.personalized_topics;
  truth.eta_true = profile.eta_true;
  for (std::size_t i = 0; i < dataset.observations.size(); ++i) {
    truth.z_true[dataset.observations[i].query_id] = dataset.z_true[i];
  }
  ltp::write_ground_truth(out_path(opts, "ground_truth.json"), truth);
  return 0;
}

ltp::ProfileOutput profile_of(const ltp::VariationalState& state,
                              const std::vector<ltp::QueryObservation>& obs,
                              const ltp::ModelParams& params) {
  ltp::ProfileOutput out;
  out.eta_tilde = state.eta_tilde;
  out.kappa1 = state.kappa1;
  out.kappa2 = state.kappa2;
  out.tau_mean = state.kappa1 / (state.kappa1 + state.kappa2);
  out.lambda = params.lambda;
  out.mu = params.mu;
  out.elbo_trace = state.elbo_trace;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    out.phi[obs[i].query_id] = state.phi[i];
  }
  return out;
}

int cmd_learn(const std::string& obs_path, const std::string& maps_path,
              const CommonOpts& opts) {
  const auto observations = ltp::read_observations(obs_path);
  const auto theta_map = load_theta_map(maps_path, opts.topics);
  ltp::ModelParams params = params_of(opts);

  ltp::InferenceOptions iopts;
  iopts.tol = opts.tol;
  iopts.max_iters = opts.max_iters;
  iopts.seed = opts.seed;
  iopts.threads = resolved_threads(opts.threads);

  ltp::ProfileOutput profile;
  if (opts.em) {
    ltp::EmOptions em_opts;
    em_opts.inf = iopts;
    const auto result = ltp::run_ltp_em(observations, theta_map, em_opts);
    profile = profile_of(result.state, observations, result.params);
    for (const auto& it : result.trace) {
      profile.em_trace.push_back({static_cast<double>(it.iter), it.lambda,
                                  it.mu, it.elbo});
    }
  } else {
    const auto state = ltp::run_ltp_inf(observations, params, theta_map,
                                        iopts);
    profile = profile_of(state, observations, params);
  }
  ltp::write_profile(out_path(opts, "profile.json"), profile);
  return 0;
}

int cmd_evaluate(const std::string& profile_path,
                 const std::string& truth_path, const std::string& obs_path,
                 const std::string& maps_path, const CommonOpts& opts,
                 int top_j) {
  const auto profile = ltp::read_profile(profile_path);
  const auto truth = ltp::read_ground_truth(truth_path);
  const auto ranked = ltp::rank_topics(profile.eta_tilde);

  ltp::Report report;
  report.metrics = ltp::retrieval_metrics(ranked, truth.personalized_topics);
  if (!obs_path.empty() && !maps_path.empty()) {
    const auto observations = ltp::read_observations(obs_path);
    const auto theta_map =
        load_theta_map(maps_path, static_cast<int>(profile.eta_tilde.size()));
    report.evidence = ltp::extract_evidence(observations, profile.eta_tilde,
                                            theta_map, top_j);
  }
  ltp::write_report_json(out_path(opts, "report.json"), report);
  ltp::write_report_markdown(out_path(opts, "report.md"), report);
  return 0;
}

int cmd_disambiguate(const std::string& obs_path,
                     const std::string& maps_path,
                     const std::string& profile_path, const CommonOpts& opts,
                     bool mixture) {
  const auto observations = ltp::read_observations(obs_path);
  const auto profile = ltp::read_profile(profile_path);
  const auto theta_map =
      load_theta_map(maps_path, static_cast<int>(profile.eta_tilde.size()));

  ltp::DisambiguateOptions dopts;
  dopts.lambda = profile.lambda;
  dopts.mu = profile.mu;
  if (mixture) dopts.tau_mean = profile.tau_mean;

  std::mt19937_64 rng(opts.seed);
  std::bernoulli_distribution coin(0.5);
  int correct = 0, evaluated = 0;
  for (const auto& obs : observations) {
    if (obs.pi == obs.sigma) continue;
    const bool personalized_first = coin(rng);
    const auto& l1 = personalized_first ? obs.pi : obs.sigma;
    const auto& l2 = personalized_first ? obs.sigma : obs.pi;
    const auto label =
        ltp::disambiguate(l1, l2, profile.eta_tilde, theta_map, dopts);
    const auto want = personalized_first
                          ? ltp::PairLabel::kFirstPersonalized
                          : ltp::PairLabel::kSecondPersonalized;
    if (label == want) ++correct;
    ++evaluated;
  }
  ltp::Report report;
  report.extra["disambiguation_accuracy"] =
      evaluated > 0 ? static_cast<double>(correct) / evaluated : 0.0;
  report.extra["pairs_evaluated"] = evaluated;
  ltp::write_report_json(out_path(opts, "report.json"), report);
  ltp::write_report_markdown(out_path(opts, "report.md"), report);
  return 0;
}

int cmd_classify(const std::vector<std::string>& obs_paths,
                 const std::string& maps_path, const CommonOpts& opts) {
  if (obs_paths.size() < 2) {
    throw std::invalid_argument("classify needs at least 2 observation files");
  }
  std::vector<std::vector<ltp::QueryObservation>> per_user;
  for (const auto& path : obs_paths) {
    per_user.push_back(ltp::read_observations(path));
  }
  const auto theta_map = load_theta_map(maps_path, opts.topics);
  const ltp::ModelParams params = params_of(opts);

  double accuracy_sum = 0.0;
  for (int rep = 0; rep < opts.repeats; ++rep) {
    std::mt19937_64 rng(opts.seed + rep);
    std::map<std::string, std::vector<double>> learned;
    std::vector<std::pair<std::string, const ltp::QueryObservation*>> test;
    for (std::size_t u = 0; u < per_user.size(); ++u) {
      auto shuffled = per_user[u];
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const auto split =
          static_cast<std::size_t>(shuffled.size() * opts.split);
      std::vector<ltp::QueryObservation> train(shuffled.begin(),
                                               shuffled.begin() + split);
      const std::string user = "u" + std::to_string(u);
      ltp::InferenceOptions iopts;
      iopts.tol = opts.tol;
      iopts.max_iters = opts.max_iters;
      iopts.seed = opts.seed + rep;
      iopts.threads = resolved_threads(opts.threads);
      learned[user] =
          ltp::run_ltp_inf(train, params, theta_map, iopts).eta_tilde;
      per_user[u] = shuffled;  // keep the shuffled order for the test slice
      for (std::size_t i = split; i < shuffled.size(); ++i) {
        test.emplace_back(user, &per_user[u][i]);
      }
    }
    int correct = 0;
    for (const auto& [user, obs] : test) {
      if (ltp::classify_user(*obs, learned, theta_map, params.lambda) ==
          user) {
        ++correct;
      }
    }
    accuracy_sum += test.empty()
                        ? 0.0
                        : static_cast<double>(correct) / test.size();
  }

  ltp::Report report;
  report.extra["classification_accuracy"] = accuracy_sum / opts.repeats;
  report.extra["group_size"] = static_cast<double>(per_user.size());
  report.extra["chance"] = 1.0 / static_cast<double>(per_user.size());
  ltp::write_report_json(out_path(opts, "report.json"), report);
  ltp::write_report_markdown(out_path(opts, "report.md"), report);
  return 0;
}

int cmd_evidence(const std::string& obs_path, const std::string& maps_path,
                 const std::string& profile_path, const CommonOpts& opts,
                 int top_j) {
  const auto observations = ltp::read_observations(obs_path);
  const auto profile = ltp::read_profile(profile_path);
  const auto theta_map =
      load_theta_map(maps_path, static_cast<int>(profile.eta_tilde.size()));
  ltp::Report report;
  report.evidence = ltp::extract_evidence(observations, profile.eta_tilde,
                                          theta_map, top_j);
  ltp::write_report_json(out_path(opts, "report.json"), report);
  ltp::write_report_markdown(out_path(opts, "report.md"), report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent topic personalization toolkit"};
  app.require_subcommand(1);
  CommonOpts opts;

  // fit-topics
  auto* fit = app.add_subcommand("fit-topics", "Fit the topic block");
  std::string items_path;
  int fit_iters = 100;
  fit->add_option("--items", items_path, "items.jsonl")->required();
  fit->add_option("--fit-iters", fit_iters, "Topic fitting sweep cap");
  add_model_flags(fit, opts);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  int num_queries = 500, results = 10, k_personalized = 3;
  double eta_magnitude = 2.0, tau = 0.7;
  std::string mode = "generative";
  sim->add_option("--queries", num_queries, "Queries to generate");
  sim->add_option("--results", results, "Results per query");
  sim->add_option("--personalized-topics", k_personalized,
                  "Number of truly personalized topics");
  sim->add_option("--eta-magnitude", eta_magnitude, "True eta magnitude");
  sim->add_option("--tau", tau, "True personalization rate");
  sim->add_option("--mode", mode, "generative | deterministic")
      ->check(CLI::IsMember({"generative", "deterministic"}));
  add_model_flags(sim, opts);

  // learn
  auto* learn = app.add_subcommand("learn", "Run LTP-INF or LTP-EM");
  std::string obs_path, maps_path;
  learn->add_option("--observations", obs_path, "observations.jsonl")
      ->required();
  learn->add_option("--topic-maps", maps_path, "topic_maps.jsonl")
      ->required();
  learn->add_flag("--em", opts.em, "Also estimate (lambda, mu)");
  add_model_flags(learn, opts);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score a learned profile");
  std::string profile_path, truth_path;
  int top_j = 20;
  eval->add_option("--profile", profile_path, "profile.json")->required();
  eval->add_option("--ground-truth", truth_path, "ground_truth.json")
      ->required();
  eval->add_option("--observations", obs_path, "observations.jsonl");
  eval->add_option("--topic-maps", maps_path, "topic_maps.jsonl");
  eval->add_option("--top", top_j, "Evidence rows to keep");
  add_model_flags(eval, opts);

  // disambiguate
  auto* disamb =
      app.add_subcommand("disambiguate", "P-V pair disambiguation accuracy");
  bool mixture = false;
  disamb->add_option("--observations", obs_path, "observations.jsonl")
      ->required();
  disamb->add_option("--topic-maps", maps_path, "topic_maps.jsonl")
      ->required();
  disamb->add_option("--profile", profile_path, "profile.json")->required();
  disamb->add_flag("--mixture", mixture,
                   "Weight g against f by the posterior tau mean");
  add_model_flags(disamb, opts);

  // classify
  auto* classify =
      app.add_subcommand("classify", "User classification accuracy");
  std::vector<std::string> user_obs;
  classify
      ->add_option("--observations", user_obs,
                   "One observations.jsonl per user")
      ->required()
      ->expected(2, -1);
  classify->add_option("--topic-maps", maps_path, "topic_maps.jsonl")
      ->required();
  classify->add_option("--split", opts.split, "Train fraction");
  classify->add_option("--repeats", opts.repeats, "Random split repetitions");
  add_model_flags(classify, opts);

  // evidence
  auto* evidence = app.add_subcommand("evidence", "Extract re-rank evidence");
  evidence->add_option("--observations", obs_path, "observations.jsonl")
      ->required();
  evidence->add_option("--topic-maps", maps_path, "topic_maps.jsonl")
      ->required();
  evidence->add_option("--profile", profile_path, "profile.json")->required();
  evidence->add_option("--top", top_j, "Evidence rows to keep");
  add_model_flags(evidence, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) return cmd_fit_topics(items_path, opts, fit_iters);
    if (sim->parsed()) {
      return cmd_simulate(opts, num_queries, results, k_personalized,
                          eta_magnitude, tau, mode);
    }
    if (learn->parsed()) return cmd_learn(obs_path, maps_path, opts);
    if (eval->parsed()) {
      return cmd_evaluate(profile_path, truth_path, obs_path, maps_path, opts,
                          top_j);
    }
    if (disamb->parsed()) {
      return cmd_disambiguate(obs_path, maps_path, profile_path, opts,
                              mixture);
    }
    if (classify->parsed()) return cmd_classify(user_obs, maps_path, opts);
    if (evidence->parsed()) {
      return cmd_evidence(obs_path, maps_path, profile_path, opts, top_j);
    }
    return fail("usage", "no subcommand", kExitUsage);
  } catch (const ltp::FileNotFoundError& e) {
    return fail("file_not_found", e.what(), kExitFileNotFound);
  } catch (const ltp::SchemaError& e) {
    return fail("schema", e.what(), kExitSchema);
  } catch (const std::invalid_argument& e) {
    return fail("invalid_input", e.what(), kExitDimension);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitInternal);
  }
}
