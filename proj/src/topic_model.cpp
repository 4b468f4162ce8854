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

#include "ltp/topic_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "ltp/math_util.hpp"

namespace ltp {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      if (current.size() >= 2) tokens.push_back(current);
      current.clear();
    }
  }
  if (current.size() >= 2) tokens.push_back(current);
  return tokens;
}

std::vector<std::string> build_vocab(const std::vector<Document>& documents,
                                     int min_count) {
  if (documents.empty()) {
    throw std::invalid_argument("build_vocab: empty corpus");
  }
  std::map<std::string, int> counts;
  for (const auto& doc : documents) {
    for (const auto& tok : tokenize(doc.text)) ++counts[tok];
  }
  std::vector<std::string> vocab;
  for (const auto& [word, count] : counts) {
    if (count >= min_count) vocab.push_back(word);
  }
  if (vocab.empty()) {
    throw std::invalid_argument("build_vocab: vocabulary empty after filter");
  }
  return vocab;  // std::map iteration is already lexicographic
}

namespace {

struct DocTokens {
  std::string item_id;
  std::vector<std::pair<int, int>> word_counts;  // (vocab id, count)
  int total = 0;
};

struct FitState {
  std::vector<std::vector<double>> beta_tilde;   // T x V
  std::vector<std::vector<double>> theta_tilde;  // D x T
  // Responsibilities per doc, per distinct word, per topic.
  std::vector<std::vector<std::vector<double>>> omega;
};

// E[ln beta_{k,w}] under Dirichlet(beta_tilde_k).
std::vector<std::vector<double>> expected_log_beta(
    const std::vector<std::vector<double>>& beta_tilde) {
  std::vector<std::vector<double>> out(beta_tilde.size());
  for (std::size_t k = 0; k < beta_tilde.size(); ++k) {
    double total = 0.0;
    for (double v : beta_tilde[k]) total += v;
    const double psi_total = digamma(total);
    out[k].resize(beta_tilde[k].size());
    for (std::size_t w = 0; w < beta_tilde[k].size(); ++w) {
      out[k][w] = digamma(beta_tilde[k][w]) - psi_total;
    }
  }
  return out;
}

// Per-item objective for the Gaussian mean update, zeta held fixed:
//   -||th||^2/(2 a^2) + sum_k c_k th_k - n*((1/zeta) sum_k e^{th_k + a^2/2}
//   + ln zeta - 1)
double theta_objective(std::span<const double> th, std::span<const double> c,
                       double n_tokens, double alpha, double zeta) {
  double quad = 0.0, lin = 0.0, s = 0.0;
  const double half_a2 = 0.5 * alpha * alpha;
  for (std::size_t k = 0; k < th.size(); ++k) {
    quad += th[k] * th[k];
    lin += c[k] * th[k];
    s += std::exp(th[k] + half_a2);
  }
  return -quad / (2.0 * alpha * alpha) + lin -
         n_tokens * (s / zeta + std::log(zeta) - 1.0);
}

void maximize_theta_tilde(std::vector<double>& th, std::span<const double> c,
                          double n_tokens, double alpha) {
  const int T = static_cast<int>(th.size());
  const double half_a2 = 0.5 * alpha * alpha;
  for (int round = 0; round < 25; ++round) {
    double zeta = 0.0;
    for (int k = 0; k < T; ++k) zeta += std::exp(th[k] + half_a2);
    double obj = theta_objective(th, c, n_tokens, alpha, zeta);
    std::vector<double> grad(T);
    double gmax = 0.0;
    for (int k = 0; k < T; ++k) {
      grad[k] = -th[k] / (alpha * alpha) + c[k] -
                (n_tokens / zeta) * std::exp(th[k] + half_a2);
      gmax = std::max(gmax, std::abs(grad[k]));
    }
    if (gmax < 1e-9) break;
    double step = 1.0 / std::max(1.0, n_tokens);
    std::vector<double> trial(T);
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      for (int k = 0; k < T; ++k) trial[k] = th[k] + step * grad[k];
      if (theta_objective(trial, c, n_tokens, alpha, zeta) > obj) {
        th = trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
}

std::vector<double> softmax(std::span<const double> v) {
  std::vector<double> out(v.size());
  const double hi = *std::max_element(v.begin(), v.end());
  double total = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[k] = std::exp(v[k] - hi);
    total += out[k];
  }
  for (double& x : out) x /= total;
  return out;
}

// Full variational bound of the topic block (additive constants from the
// fixed Gaussian covariance dropped).
double fitting_bound(const std::vector<DocTokens>& docs, const FitState& st,
                     const std::vector<std::vector<double>>& e_log_beta,
                     double nu, double alpha, int V) {
  const int T = static_cast<int>(st.beta_tilde.size());
  double bound = 0.0;

  for (int k = 0; k < T; ++k) {
    double total = 0.0, lgamma_sum = 0.0, inner = 0.0;
    for (int w = 0; w < V; ++w) {
      const double bw = st.beta_tilde[k][w];
      total += bw;
      lgamma_sum += std::lgamma(bw);
      inner += (nu - 1.0) * e_log_beta[k][w] -
               (bw - 1.0) * digamma(bw);
    }
    // E[ln p(beta_k | nu)] + H(q(beta_k))
    bound += std::lgamma(V * nu) - V * std::lgamma(nu) + inner;
    bound += lgamma_sum - std::lgamma(total) +
             (total - V) * digamma(total);
  }

  const double half_a2 = 0.5 * alpha * alpha;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& th = st.theta_tilde[i];
    double quad = 0.0, s = 0.0;
    for (int k = 0; k < T; ++k) {
      quad += th[k] * th[k];
      s += std::exp(th[k] + half_a2);
    }
    bound += -quad / (2.0 * alpha * alpha);
    // Softmax normalizer bound at the tight zeta = s.
    bound += -docs[i].total * std::log(s);
    for (std::size_t wi = 0; wi < docs[i].word_counts.size(); ++wi) {
      const auto [w, count] = docs[i].word_counts[wi];
      const auto& om = st.omega[i][wi];
      for (int k = 0; k < T; ++k) {
        if (om[k] <= 0.0) continue;
        bound += count * om[k] *
                 (th[k] + e_log_beta[k][w] - std::log(om[k]));
      }
    }
  }
  return bound;
}

}  // namespace

FitResult fit_topics(const std::vector<Document>& corpus,
                     const FitOptions& options) {
  if (corpus.empty()) throw std::invalid_argument("fit_topics: empty corpus");
  if (options.T < 1) throw std::invalid_argument("fit_topics: T must be >= 1");
  const int T = options.T;

  const std::vector<std::string> vocab =
      options.vocab ? *options.vocab : build_vocab(corpus, 1);
  const int V = static_cast<int>(vocab.size());
  std::unordered_map<std::string, int> word_id;
  for (int w = 0; w < V; ++w) word_id.emplace(vocab[w], w);

  std::vector<DocTokens> docs;
  docs.reserve(corpus.size());
  for (const auto& doc : corpus) {
    DocTokens dt;
    dt.item_id = doc.item_id;
    std::map<int, int> counts;
    for (const auto& tok : tokenize(doc.text)) {
      auto it = word_id.find(tok);
      if (it != word_id.end()) ++counts[it->second];
    }
    for (const auto& [w, c] : counts) {
      dt.word_counts.emplace_back(w, c);
      dt.total += c;
    }
    docs.push_back(std::move(dt));
  }
  const int D = static_cast<int>(docs.size());

  std::mt19937_64 rng(options.seed);
  FitState st;
  if (options.init_beta_tilde) {
    st.beta_tilde = *options.init_beta_tilde;
  } else {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    st.beta_tilde.assign(T, std::vector<double>(V));
    for (auto& row : st.beta_tilde) {
      for (double& v : row) v = options.nu + unif(rng);
    }
  }
  if (options.init_theta_tilde) {
    st.theta_tilde = *options.init_theta_tilde;
  } else {
    std::normal_distribution<double> noise(0.0, 0.01);
    st.theta_tilde.assign(D, std::vector<double>(T));
    for (auto& row : st.theta_tilde) {
      for (double& v : row) v = noise(rng);
    }
  }
  st.omega.resize(D);
  for (int i = 0; i < D; ++i) {
    st.omega[i].assign(docs[i].word_counts.size(),
                       std::vector<double>(T, 1.0 / T));
  }

  FitResult result;
  double prev_bound = -std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < options.max_iters; ++sweep) {
    auto e_log_beta = expected_log_beta(st.beta_tilde);

    // Responsibilities, closed form.
    for (int i = 0; i < D; ++i) {
      for (std::size_t wi = 0; wi < docs[i].word_counts.size(); ++wi) {
        const int w = docs[i].word_counts[wi].first;
        std::vector<double> logits(T);
        for (int k = 0; k < T; ++k) {
          logits[k] = st.theta_tilde[i][k] + e_log_beta[k][w];
        }
        st.omega[i][wi] = softmax(logits);
      }
    }

    // Dirichlet pseudo-counts.
    for (int k = 0; k < T; ++k) {
      std::fill(st.beta_tilde[k].begin(), st.beta_tilde[k].end(), options.nu);
    }
    for (int i = 0; i < D; ++i) {
      for (std::size_t wi = 0; wi < docs[i].word_counts.size(); ++wi) {
        const auto [w, count] = docs[i].word_counts[wi];
        for (int k = 0; k < T; ++k) {
          st.beta_tilde[k][w] += count * st.omega[i][wi][k];
        }
      }
    }
    e_log_beta = expected_log_beta(st.beta_tilde);

    // Gaussian means against the softmax bound.
    for (int i = 0; i < D; ++i) {
      std::vector<double> c(T, 0.0);
      for (std::size_t wi = 0; wi < docs[i].word_counts.size(); ++wi) {
        const int count = docs[i].word_counts[wi].second;
        for (int k = 0; k < T; ++k) c[k] += count * st.omega[i][wi][k];
      }
      maximize_theta_tilde(st.theta_tilde[i], c, docs[i].total, options.alpha);
    }

    const double bound =
        fitting_bound(docs, st, e_log_beta, options.nu, options.alpha, V);
    result.bound_trace.push_back(bound);
    if (sweep > 0 &&
        std::abs(bound - prev_bound) <
            options.tol * (std::abs(prev_bound) + 1e-12)) {
      result.converged = true;
      prev_bound = bound;
      break;
    }
    prev_bound = bound;
  }

  result.model.T = T;
  result.model.vocab = vocab;
  result.model.nu = options.nu;
  result.model.alpha = options.alpha;
  result.model.beta.assign(T, std::vector<double>(V));
  for (int k = 0; k < T; ++k) {
    double total = 0.0;
    for (int w = 0; w < V; ++w) total += st.beta_tilde[k][w];
    for (int w = 0; w < V; ++w) {
      result.model.beta[k][w] = st.beta_tilde[k][w] / total;
    }
  }
  result.topic_maps.reserve(D);
  for (int i = 0; i < D; ++i) {
    result.topic_maps.push_back({docs[i].item_id, softmax(st.theta_tilde[i])});
  }
  return result;
}

std::vector<TopicMap> import_topic_maps(
    const std::vector<std::pair<std::string, std::vector<double>>>& rows,
    int expected_T) {
  std::vector<TopicMap> maps;
  maps.reserve(rows.size());
  for (const auto& [item_id, weights] : rows) {
    if (expected_T > 0 && static_cast<int>(weights.size()) != expected_T) {
      throw std::invalid_argument("topic-map dimension mismatch for item: " +
                                  item_id);
    }
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) {
        throw std::invalid_argument("negative topic weight for item: " +
                                    item_id);
      }
      total += w;
    }
    if (total <= 0.0) {
      throw std::invalid_argument("all-zero topic weights for item: " +
                                  item_id);
    }
    TopicMap map;
    map.item_id = item_id;
    map.theta.resize(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) {
      map.theta[k] = weights[k] / total;
    }
    maps.push_back(std::move(map));
  }
  return maps;
}

ThetaMap to_theta_map(const std::vector<TopicMap>& maps) {
  ThetaMap out;
  out.reserve(maps.size());
  for (const auto& m : maps) out.emplace(m.item_id, m.theta);
  return out;
}

}  // namespace ltp
