#pragma once

// Latent Dirichlet allocation by collapsed Gibbs sampling, and topic
// profiling of clusters built on it.

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "repo2vec/common.hpp"
#include "repo2vec/textembed.hpp"

namespace repo2vec {

struct LdaConfig {
  std::size_t num_topics = 2;
  double alpha = 0.0;  // 0 selects 50 / num_topics
  double beta = 0.01;
  std::size_t iterations = 500;
  std::uint64_t seed = 1;

  double effective_alpha() const { return alpha > 0.0 ? alpha : 50.0 / static_cast<double>(num_topics); }
};

class LdaSampler {
public:
  LdaSampler(std::span<const TokenSequence> docs, const LdaConfig& config)
      : config_(config), alpha_(config.effective_alpha()), rng_(config.seed) {
    if (config.num_topics < 1) throw InvalidArgument("LDA: num_topics must be >= 1");
    const auto vocab = Vocabulary::build(docs, 1);
    for (std::size_t i = 0; i < vocab.size(); ++i) terms_.push_back(vocab.token(i));
    std::sort(terms_.begin(), terms_.end());
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < terms_.size(); ++i) index[terms_[i]] = i;

    const std::size_t k = config.num_topics;
    doc_topic_.assign(docs.size(), std::vector<std::size_t>(k, 0));
    topic_word_.assign(k, std::vector<std::size_t>(terms_.size(), 0));
    topic_total_.assign(k, 0);
    for (const auto& d : docs) {
      std::vector<std::size_t> ids;
      for (const auto& t : d) ids.push_back(index.at(t));
      words_.push_back(std::move(ids));
    }
    for (std::size_t d = 0; d < words_.size(); ++d) {
      std::vector<std::size_t> z(words_[d].size());
      for (std::size_t i = 0; i < z.size(); ++i) {
        z[i] = static_cast<std::size_t>(rng_.below(k));
        add(d, words_[d][i], z[i], +1);
      }
      assignment_.push_back(std::move(z));
    }
    weights_.resize(k);
  }

  /// One full pass resampling every token's topic.
  void sweep() {
    const std::size_t k = config_.num_topics;
    const double vbeta = static_cast<double>(terms_.size()) * config_.beta;
    for (std::size_t d = 0; d < words_.size(); ++d) {
      for (std::size_t i = 0; i < words_[d].size(); ++i) {
        const auto w = words_[d][i];
        add(d, w, assignment_[d][i], -1);
        double total = 0.0;
        for (std::size_t t = 0; t < k; ++t) {
          weights_[t] = (static_cast<double>(doc_topic_[d][t]) + alpha_) *
                        (static_cast<double>(topic_word_[t][w]) + config_.beta) /
                        (static_cast<double>(topic_total_[t]) + vbeta);
          total += weights_[t];
        }
        double u = rng_.uniform() * total;
        std::size_t chosen = k - 1;
        for (std::size_t t = 0; t < k; ++t) {
          u -= weights_[t];
          if (u < 0.0) {
            chosen = t;
            break;
          }
        }
        assignment_[d][i] = chosen;
        add(d, w, chosen, +1);
      }
    }
  }

  void run() {
    for (std::size_t it = 0; it < config_.iterations; ++it) sweep();
  }

  /// Recomputes every count from the topic assignments and compares.
  bool counts_consistent() const {
    const std::size_t k = config_.num_topics;
    std::vector<std::vector<std::size_t>> dt(words_.size(), std::vector<std::size_t>(k, 0));
    std::vector<std::vector<std::size_t>> tw(k, std::vector<std::size_t>(terms_.size(), 0));
    std::vector<std::size_t> tt(k, 0);
    for (std::size_t d = 0; d < words_.size(); ++d) {
      for (std::size_t i = 0; i < words_[d].size(); ++i) {
        ++dt[d][assignment_[d][i]];
        ++tw[assignment_[d][i]][words_[d][i]];
        ++tt[assignment_[d][i]];
      }
      std::size_t row = 0;
      for (auto c : doc_topic_[d]) row += c;
      if (row != words_[d].size()) return false;
    }
    for (std::size_t t = 0; t < k; ++t) {
      std::size_t row = 0;
      for (auto c : topic_word_[t]) row += c;
      if (row != topic_total_[t]) return false;
    }
    return dt == doc_topic_ && tw == topic_word_ && tt == topic_total_;
  }

  std::size_t num_topics() const { return config_.num_topics; }
  const std::vector<std::string>& terms() const { return terms_; }

  /// P(term | topic) over the whole vocabulary.
  std::vector<double> topic_term_probabilities(std::size_t topic) const {
    const double denom = static_cast<double>(topic_total_[topic]) +
                         static_cast<double>(terms_.size()) * config_.beta;
    std::vector<double> p(terms_.size());
    for (std::size_t w = 0; w < terms_.size(); ++w) {
      p[w] = (static_cast<double>(topic_word_[topic][w]) + config_.beta) / denom;
    }
    return p;
  }

  /// The n most probable terms of a topic, ties by term.
  std::vector<std::string> top_terms(std::size_t topic, std::size_t n = 10) const {
    const auto p = topic_term_probabilities(topic);
    std::vector<std::size_t> order(terms_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < std::min(n, order.size()); ++i) out.push_back(terms_[order[i]]);
    return out;
  }

  /// Topic with the highest posterior share in a document (smallest index
  /// on ties).
  std::size_t document_topic(std::size_t doc) const {
    const auto& row = doc_topic_.at(doc);
    return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }

  std::size_t document_length(std::size_t doc) const { return words_.at(doc).size(); }

private:
  void add(std::size_t d, std::size_t w, std::size_t t, int delta) {
    doc_topic_[d][t] += static_cast<std::size_t>(delta);
    topic_word_[t][w] += static_cast<std::size_t>(delta);
    topic_total_[t] += static_cast<std::size_t>(delta);
  }

  LdaConfig config_;
  double alpha_;
  Rng rng_;
  std::vector<std::string> terms_;
  std::vector<std::vector<std::size_t>> words_;
  std::vector<std::vector<std::size_t>> assignment_;
  std::vector<std::vector<std::size_t>> doc_topic_;
  std::vector<std::vector<std::size_t>> topic_word_;
  std::vector<std::size_t> topic_total_;
  std::vector<double> weights_;
};

// ---------------------------------------------------------------------------
// Cluster profiling

struct TopicProfile {
  std::size_t cluster = 0;
  std::size_t size = 0;      // members of the cluster
  std::size_t sampled = 0;   // members drawn for profiling
  bool profiled = false;     // false when every sampled document is empty
  std::size_t dominant_topic = 0;
  std::vector<std::string> dominant_terms;
  double dominance = 0.0;    // share of profiled documents in the dominant topic
};

struct ProfileConfig {
  std::size_t num_topics = 5;
  double sample_fraction = 0.5;
  std::size_t iterations = 500;
  std::size_t top_terms = 10;
  std::uint64_t seed = 1;
};

/// Per cluster: sample ceil(fraction * size) members, fit LDA on their
/// documents, give each document its most probable topic, and report the
/// modal topic and its share. Empty documents do not vote.
inline std::vector<TopicProfile> lda_profile(std::span<const std::size_t> labels,
                                             std::span<const TokenSequence> docs,
                                             const ProfileConfig& config) {
  if (labels.size() != docs.size()) throw InvalidArgument("lda_profile: labels and documents differ in length");
  if (!(config.sample_fraction > 0.0 && config.sample_fraction <= 1.0)) {
    throw InvalidArgument("lda_profile: sample_fraction must be in (0, 1]");
  }
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);

  std::vector<TopicProfile> out;
  for (auto& [cluster, idx] : members) {
    TopicProfile prof;
    prof.cluster = cluster;
    prof.size = idx.size();
    Rng rng(derive_seed(config.seed, cluster, 0x5a));
    rng.shuffle(idx);
    const auto take = static_cast<std::size_t>(std::ceil(config.sample_fraction * static_cast<double>(idx.size()) - 1e-9));
    idx.resize(std::max<std::size_t>(take, 1));
    std::sort(idx.begin(), idx.end());
    prof.sampled = idx.size();

    std::vector<TokenSequence> sample;
    for (auto i : idx) {
      if (!docs[i].empty()) sample.push_back(docs[i]);
    }
    if (sample.empty()) {
      out.push_back(std::move(prof));
      continue;
    }
    LdaSampler lda(sample, {config.num_topics, 0.0, 0.01, config.iterations, derive_seed(config.seed, cluster, 0x1d)});
    lda.run();
    std::vector<std::size_t> votes(config.num_topics, 0);
    for (std::size_t d = 0; d < sample.size(); ++d) ++votes[lda.document_topic(d)];
    prof.profiled = true;
    prof.dominant_topic = static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    prof.dominant_terms = lda.top_terms(prof.dominant_topic, config.top_terms);
    prof.dominance = static_cast<double>(votes[prof.dominant_topic]) / static_cast<double>(sample.size());
    out.push_back(std::move(prof));
  }
  return out;
}

/// `cluster_id \t size \t dominant_terms \t dominance`; unprofiled
/// clusters carry "unprofiled" in the terms column.
inline void write_cluster_report(std::ostream& out, const std::vector<TopicProfile>& profiles) {
  for (const auto& p : profiles) {
    out << p.cluster << '\t' << p.size << '\t';
    if (!p.profiled) {
      out << "unprofiled\t" << format_real(0.0) << '\n';
      continue;
    }
    for (std::size_t i = 0; i < p.dominant_terms.size(); ++i) {
      if (i) out << ',';
      out << p.dominant_terms[i];
    }
    out << '\t' << format_real(p.dominance) << '\n';
  }
}

}  // namespace repo2vec
