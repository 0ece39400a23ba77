#include <gtest/gtest.h>

#include "oracles.hpp"
#include "repo2vec/classify.hpp"
#include "test_support.hpp"

using namespace repo2vec;

namespace {

std::vector<LabeledEmbedding> blobs(std::size_t per_class, std::size_t dim, double separation, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledEmbedding> out;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const bool mal = i % 2;
    Embedding v(dim);
    for (auto& x : v) x = testing_support::gaussian(rng) + (mal ? separation : 0.0);
    out.push_back({"r" + std::to_string(i), v, mal ? RepoLabel::malware : RepoLabel::benign});
  }
  return out;
}

}  // namespace

TEST(NaiveBayes, TwoPointExample) {
  const std::vector<LabeledEmbedding> data{{"a", {1.0, 0.0}, RepoLabel::malware}, {"b", {-1.0, 0.0}, RepoLabel::benign}};
  const auto m = nb_fit(data);
  EXPECT_EQ(m.prior[0], 0.5);
  EXPECT_EQ(m.prior[1], 0.5);
  EXPECT_EQ(m.mean[1], (Embedding{1.0, 0.0}));
  EXPECT_EQ(m.mean[0], (Embedding{-1.0, 0.0}));
  EXPECT_DOUBLE_EQ(m.variance_floor, 1e-9);
  for (const auto& v : m.variance) EXPECT_EQ(v, (Embedding{1e-9, 1e-9}));
  EXPECT_EQ(nb_predict(m, std::vector<double>{1.0, 0.0}).label, RepoLabel::malware);
  EXPECT_EQ(nb_predict(m, std::vector<double>{-1.0, 0.0}).label, RepoLabel::benign);
  // equidistant point: tie goes to benign
  EXPECT_EQ(nb_predict(m, std::vector<double>{0.0, 0.0}).label, RepoLabel::benign);
}

TEST(NaiveBayes, DuplicationGivesIdenticalModel) {
  const auto data = blobs(15, 12, 1.0, 3);
  auto doubled = data;
  doubled.insert(doubled.end(), data.begin(), data.end());
  EXPECT_TRUE(nb_fit(data) == nb_fit(doubled));
}

TEST(NaiveBayes, ParametersMatchDirectOracle) {
  const auto data = blobs(10, 5, 2.0, 7);
  const auto m = nb_fit(data);
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    const auto x = testing_support::random_vector(rng, 5, 3.0);
    const auto p = nb_predict(m, x);
    for (auto label : {RepoLabel::benign, RepoLabel::malware}) {
      const double want = oracle::nb_log_posterior(data, label, x);
      EXPECT_NEAR(p.log_posterior[static_cast<std::size_t>(label)], want, 1e-9 * std::max(1.0, std::fabs(want)));
    }
  }
}

TEST(NaiveBayes, FeatureScalingLeavesPredictionsUnchanged) {
  const auto data = blobs(20, 8, 0.7, 11);
  auto scaled = data;
  for (auto& e : scaled)
    for (auto& x : e.fused) x *= 3.5;
  const auto m = nb_fit(data), ms = nb_fit(scaled);
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    auto x = testing_support::random_vector(rng, 8, 2.0);
    const auto a = nb_predict(m, x).label;
    for (auto& v : x) v *= 3.5;
    EXPECT_EQ(nb_predict(ms, x).label, a);
  }
}

TEST(NaiveBayes, Errors) {
  const std::vector<LabeledEmbedding> one_class{{"a", {1.0}, RepoLabel::benign}};
  EXPECT_THROW(nb_fit(one_class), InvalidArgument);
  const auto m = nb_fit(blobs(2, 3, 1.0, 1));
  EXPECT_THROW(nb_predict(m, std::vector<double>{1.0}), InvalidArgument);
  EXPECT_THROW(parse_label("unknown"), DataError);
}

TEST(Metrics, AllOneLabelOnBalancedData) {
  const std::vector<RepoLabel> truth{RepoLabel::malware, RepoLabel::benign, RepoLabel::malware, RepoLabel::benign};
  const std::vector<RepoLabel> all_mal(4, RepoLabel::malware), all_ben(4, RepoLabel::benign);
  const auto a = classification_metrics(truth, all_mal);
  EXPECT_EQ(a.accuracy, 0.5);
  EXPECT_EQ(a.recall, 1.0);
  EXPECT_EQ(a.precision, 0.5);
  const auto b = classification_metrics(truth, all_ben);
  EXPECT_EQ(b.accuracy, 0.5);
  EXPECT_EQ(b.recall, 0.0);
  EXPECT_EQ(b.precision, 0.0);
  EXPECT_EQ(b.f1, 0.0);
}

TEST(CrossValidation, SeparableBlobs) {
  const auto data = blobs(100, 384, 1.0, 5);
  const auto r = cross_validate(data, 10, 9);
  EXPECT_GE(r.pooled.accuracy, 0.95);
  EXPECT_EQ(r.per_fold.size(), 10u);
  EXPECT_EQ(r.pooled.f1, 2 * r.pooled.precision * r.pooled.recall / (r.pooled.precision + r.pooled.recall));
  std::size_t total = 0;
  for (const auto& f : r.per_fold) total += f.tp + f.fp + f.tn + f.fn;
  EXPECT_EQ(total, data.size());
}

TEST(CrossValidation, StratifiedAndDeterministic) {
  const auto data = blobs(23, 4, 1.0, 2);
  const auto folds = stratified_folds(data, 5, 3);
  std::vector<std::array<std::size_t, 2>> per(5, {0, 0});
  for (std::size_t i = 0; i < data.size(); ++i) ++per[folds[i]][static_cast<std::size_t>(data[i].label)];
  for (const auto& f : per) {
    EXPECT_GE(f[0], 4u);
    EXPECT_LE(f[0], 5u);
  }
  EXPECT_EQ(folds, stratified_folds(data, 5, 3));
  const auto a = cross_validate(data, 5, 3), b = cross_validate(data, 5, 3);
  EXPECT_EQ(a.pooled.tp, b.pooled.tp);
  EXPECT_EQ(a.pooled.fp, b.pooled.fp);
}

TEST(CrossValidation, InsufficientDataIsAnError) {
  const auto data = blobs(3, 2, 1.0, 1);
  EXPECT_THROW(cross_validate(data, 10, 1), DataError);
  EXPECT_THROW(cross_validate(data, 1, 1), InvalidArgument);
}

TEST(Labels, ReadCsv) {
  const auto dir = testing_support::temp_dir("labels");
  testing_support::write_text(dir / "l.csv", "repo_id,label\na,malware\nb, benign\n");
  const auto l = read_labels_csv(dir / "l.csv");
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[1], (std::pair<std::string, RepoLabel>{"b", RepoLabel::benign}));
  testing_support::write_text(dir / "bad.csv", "a,evil\n");
  EXPECT_THROW(read_labels_csv(dir / "bad.csv"), DataError);
  std::filesystem::remove_all(dir);
}
