#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "repo2vec/lda.hpp"

using namespace repo2vec;

namespace {

const std::vector<std::string> kFruit{"apple", "banana", "cherry", "grape", "lemon", "mango", "peach", "pear", "plum", "kiwi", "lime", "fig"};
const std::vector<std::string> kTools{"hammer", "wrench", "saw", "drill", "chisel", "pliers", "level", "clamp", "file", "rasp", "vise", "awl"};

std::vector<TokenSequence> planted_corpus(std::size_t docs_per_topic, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TokenSequence> docs;
  for (std::size_t d = 0; d < 2 * docs_per_topic; ++d) {
    const auto& vocab = d % 2 ? kTools : kFruit;
    TokenSequence doc;
    for (int i = 0; i < 40; ++i) doc.push_back(vocab[rng.below(vocab.size())]);
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace

TEST(Lda, DefaultAlpha) {
  LdaConfig c;
  c.num_topics = 5;
  EXPECT_DOUBLE_EQ(c.effective_alpha(), 10.0);
}

TEST(Lda, RecoversPlantedTopicsAndKeepsCountsConsistent) {
  const auto docs = planted_corpus(20, 3);
  LdaConfig c;
  c.num_topics = 2;
  c.iterations = 100;
  c.seed = 4;
  LdaSampler lda(docs, c);
  ASSERT_TRUE(lda.counts_consistent());
  for (std::size_t it = 0; it < c.iterations; ++it) {
    lda.sweep();
    ASSERT_TRUE(lda.counts_consistent()) << "after sweep " << it;
  }
  const std::set<std::string> fruit(kFruit.begin(), kFruit.end());
  std::set<bool> topic_is_fruit;
  for (std::size_t t = 0; t < 2; ++t) {
    const auto top = lda.top_terms(t, 10);
    ASSERT_EQ(top.size(), 10u);
    const bool first = fruit.count(top[0]) > 0;
    for (const auto& w : top) EXPECT_EQ(fruit.count(w) > 0, first) << w;
    topic_is_fruit.insert(first);
  }
  EXPECT_EQ(topic_is_fruit.size(), 2u);
  // Documents are assigned to the topic of their vocabulary.
  for (std::size_t d = 2; d < docs.size(); ++d) {
    EXPECT_EQ(lda.document_topic(d) == lda.document_topic(d % 2), true);
  }
  EXPECT_NE(lda.document_topic(0), lda.document_topic(1));
}

TEST(Lda, DeterministicForSeed) {
  const auto docs = planted_corpus(5, 1);
  LdaConfig c;
  c.iterations = 20;
  LdaSampler a(docs, c), b(docs, c);
  a.run();
  b.run();
  EXPECT_EQ(a.top_terms(0), b.top_terms(0));
  EXPECT_EQ(a.topic_term_probabilities(1), b.topic_term_probabilities(1));
}

TEST(Lda, TopicTermProbabilitiesSumToOne) {
  const auto docs = planted_corpus(3, 2);
  LdaSampler lda(docs, {3, 0.0, 0.01, 5, 1});
  lda.run();
  for (std::size_t t = 0; t < 3; ++t) {
    double s = 0;
    for (double p : lda.topic_term_probabilities(t)) s += p;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(LdaProfile, SamplesAndReportsDominance) {
  const auto docs = planted_corpus(10, 5);
  // cluster 0: fruit documents, cluster 1: tool documents
  std::vector<std::size_t> labels;
  for (std::size_t d = 0; d < docs.size(); ++d) labels.push_back(d % 2);
  ProfileConfig pc;
  pc.num_topics = 2;
  pc.iterations = 50;
  const auto profiles = lda_profile(labels, docs, pc);
  ASSERT_EQ(profiles.size(), 2u);
  const std::set<std::string> fruit(kFruit.begin(), kFruit.end());
  for (const auto& p : profiles) {
    EXPECT_EQ(p.size, 10u);
    EXPECT_EQ(p.sampled, 5u);
    EXPECT_TRUE(p.profiled);
    EXPECT_GT(p.dominance, 0.0);
    EXPECT_LE(p.dominance, 1.0);
    for (const auto& w : p.dominant_terms) EXPECT_EQ(fruit.count(w) > 0, p.cluster == 0) << w;
  }
}

TEST(LdaProfile, EmptyDocumentsAreUnprofiled) {
  const std::vector<TokenSequence> docs{{}, {}, {"a", "b"}};
  const std::vector<std::size_t> labels{0, 0, 1};
  ProfileConfig pc;
  pc.sample_fraction = 1.0;
  pc.iterations = 5;
  const auto profiles = lda_profile(labels, docs, pc);
  ASSERT_EQ(profiles.size(), 2u);
  EXPECT_FALSE(profiles[0].profiled);
  EXPECT_TRUE(profiles[1].profiled);
  EXPECT_DOUBLE_EQ(profiles[1].dominance, 1.0);
  std::ostringstream out;
  write_cluster_report(out, profiles);
  EXPECT_EQ(out.str().substr(0, 20), "0\t2\tunprofiled\t0\n1\t1");
}

TEST(LdaProfile, Errors) {
  const std::vector<TokenSequence> docs{{"a"}};
  const std::vector<std::size_t> labels{0, 1};
  EXPECT_THROW(lda_profile(labels, docs, {}), InvalidArgument);
  ProfileConfig bad;
  bad.sample_fraction = 0.0;
  const std::vector<std::size_t> one{0};
  EXPECT_THROW(lda_profile(one, docs, bad), InvalidArgument);
}
