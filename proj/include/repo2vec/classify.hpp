#pragma once

// Gaussian naive Bayes over fused embeddings, stratified k-fold
// cross-validation and malware-positive classification metrics.

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "repo2vec/common.hpp"

namespace repo2vec {

enum class RepoLabel { benign = 0, malware = 1 };

inline constexpr std::size_t kNumLabels = 2;

inline std::string_view to_string(RepoLabel l) { return l == RepoLabel::malware ? "malware" : "benign"; }

inline RepoLabel parse_label(std::string_view s) {
  if (s == "malware") return RepoLabel::malware;
  if (s == "benign") return RepoLabel::benign;
  throw DataError("unknown label: '" + std::string(s) + "' (expected malware or benign)");
}

struct LabeledEmbedding {
  std::string repo_id;
  Embedding fused;
  RepoLabel label;
};

struct NBModel {
  std::array<double, kNumLabels> prior{};
  std::array<Embedding, kNumLabels> mean;
  std::array<Embedding, kNumLabels> variance;
  double variance_floor = 0.0;

  std::size_t dim() const { return mean[0].size(); }
  friend bool operator==(const NBModel&, const NBModel&) = default;
};

namespace detail {

inline double population_variance(std::vector<double>& column) {
  const double n = static_cast<double>(column.size());
  const double mean = exact_sum(column) / n;
  for (auto& x : column) x = (x - mean) * (x - mean);
  return exact_sum(column) / n;
}

}  // namespace detail

/// Per-class priors, means and variances. Variances are floored at
/// smoothing * max(largest per-dimension variance of the data, 1e-12).
inline NBModel nb_fit(std::span<const LabeledEmbedding> data, double smoothing = 1e-9) {
  if (data.empty()) throw InvalidArgument("nb_fit: no data");
  const std::size_t dim = data.front().fused.size();
  std::array<std::vector<const Embedding*>, kNumLabels> by_class;
  for (const auto& e : data) {
    require_same_dim(e.fused, data.front().fused, "nb_fit");
    by_class[static_cast<std::size_t>(e.label)].push_back(&e.fused);
  }
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    if (by_class[c].empty()) {
      throw InvalidArgument("nb_fit: class '" + std::string(to_string(static_cast<RepoLabel>(c))) + "' has no examples");
    }
  }

  double max_var = 0.0;
  std::vector<double> column(data.size());
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < data.size(); ++i) column[i] = data[i].fused[j];
    max_var = std::max(max_var, detail::population_variance(column));
  }

  NBModel m;
  m.variance_floor = smoothing * std::max(max_var, 1e-12);
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    const auto& members = by_class[c];
    m.prior[c] = static_cast<double>(members.size()) / static_cast<double>(data.size());
    m.mean[c].assign(dim, 0.0);
    m.variance[c].assign(dim, 0.0);
    std::vector<double> col(members.size());
    for (std::size_t j = 0; j < dim; ++j) {
      for (std::size_t i = 0; i < members.size(); ++i) col[i] = (*members[i])[j];
      m.mean[c][j] = exact_sum(col) / static_cast<double>(col.size());
      m.variance[c][j] = std::max(detail::population_variance(col), m.variance_floor);
    }
  }
  return m;
}

struct Prediction {
  RepoLabel label;
  std::array<double, kNumLabels> log_posterior;  // unnormalized
};

inline Prediction nb_predict(const NBModel& m, std::span<const double> x) {
  if (x.size() != m.dim()) throw InvalidArgument("nb_predict: dimension mismatch");
  Prediction p{RepoLabel::benign, {}};
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    double lp = std::log(m.prior[c]);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double v = m.variance[c][j];
      const double d = x[j] - m.mean[c][j];
      lp -= 0.5 * std::log(2.0 * std::numbers::pi * v) + d * d / (2.0 * v);
    }
    p.log_posterior[c] = lp;
  }
  // Ties go to the lexicographically smaller label, "benign".
  p.label = p.log_posterior[1] > p.log_posterior[0] ? RepoLabel::malware : RepoLabel::benign;
  return p;
}

struct ClassificationMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

/// Metrics with malware as the positive class.
inline ClassificationMetrics classification_metrics(std::span<const RepoLabel> truth,
                                                    std::span<const RepoLabel> predicted) {
  if (truth.size() != predicted.size()) throw InvalidArgument("classification_metrics: length mismatch");
  ClassificationMetrics m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == RepoLabel::malware;
    const bool p = predicted[i] == RepoLabel::malware;
    if (t && p) ++m.tp;
    else if (!t && p) ++m.fp;
    else if (!t && !p) ++m.tn;
    else ++m.fn;
  }
  const double n = static_cast<double>(truth.size());
  m.accuracy = n > 0 ? static_cast<double>(m.tp + m.tn) / n : 0.0;
  m.precision = m.tp + m.fp > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
  m.recall = m.tp + m.fn > 0 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

struct CrossValidationReport {
  ClassificationMetrics pooled;
  std::vector<ClassificationMetrics> per_fold;
};

/// Fold of every example: each class is shuffled with its own seeded
/// stream and dealt round-robin over the folds.
inline std::vector<std::size_t> stratified_folds(std::span<const LabeledEmbedding> data, std::size_t folds,
                                                 std::uint64_t seed) {
  std::vector<std::size_t> fold(data.size(), 0);
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (static_cast<std::size_t>(data[i].label) == c) idx.push_back(i);
    }
    Rng rng(derive_seed(seed, "fold-class-" + std::to_string(c)));
    rng.shuffle(idx);
    for (std::size_t k = 0; k < idx.size(); ++k) fold[idx[k]] = k % folds;
  }
  return fold;
}

inline CrossValidationReport cross_validate(std::span<const LabeledEmbedding> data, std::size_t folds = 10,
                                            std::uint64_t seed = 1, double smoothing = 1e-9) {
  if (folds < 2) throw InvalidArgument("cross_validate: need at least 2 folds");
  std::array<std::size_t, kNumLabels> count{};
  for (const auto& e : data) ++count[static_cast<std::size_t>(e.label)];
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    if (count[c] < folds) {
      throw DataError("cross_validate: class '" + std::string(to_string(static_cast<RepoLabel>(c))) + "' has " +
                      std::to_string(count[c]) + " examples, fewer than " + std::to_string(folds) + " folds");
    }
  }
  const auto fold = stratified_folds(data, folds, seed);
  std::vector<RepoLabel> truth, predicted;
  CrossValidationReport report;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<LabeledEmbedding> train;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (fold[i] == f) test.push_back(i);
      else train.push_back(data[i]);
    }
    const auto model = nb_fit(train, smoothing);
    std::vector<RepoLabel> ft, fp;
    for (auto i : test) {
      ft.push_back(data[i].label);
      fp.push_back(nb_predict(model, data[i].fused).label);
    }
    report.per_fold.push_back(classification_metrics(ft, fp));
    truth.insert(truth.end(), ft.begin(), ft.end());
    predicted.insert(predicted.end(), fp.begin(), fp.end());
  }
  report.pooled = classification_metrics(truth, predicted);
  return report;
}

/// `repo_id,label` rows; a leading `repo_id,label` header is skipped.
inline std::vector<std::pair<std::string, RepoLabel>> read_labels_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::pair<std::string, RepoLabel>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto fields = split(t, ',');
    if (fields.size() != 2) throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected repo_id,label");
    const auto id = std::string(trim(fields[0]));
    const auto label = std::string(trim(fields[1]));
    if (line_no == 1 && id == "repo_id" && label == "label") continue;
    out.emplace_back(id, parse_label(label));
  }
  return out;
}

inline nlohmann::json to_json(const ClassificationMetrics& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
          {"tp", m.tp},             {"fp", m.fp},               {"tn", m.tn},         {"fn", m.fn}};
}

inline nlohmann::json to_json(const CrossValidationReport& r) {
  nlohmann::json j = to_json(r.pooled);
  j["positive_class"] = "malware";
  j["folds"] = nlohmann::json::array();
  for (const auto& f : r.per_fold) j["folds"].push_back(to_json(f));
  return j;
}

}  // namespace repo2vec
