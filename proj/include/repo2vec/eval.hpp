#pragma once

// Query evaluation against graded ground truth: success rate, pooled
// precision, Spearman rank correlation and category histograms.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "repo2vec/common.hpp"
#include "repo2vec/fusion.hpp"

namespace repo2vec {

/// 4 = strongly similar, 3 = weakly similar, 2 = weakly dissimilar,
/// 1 = strongly dissimilar.
using Category = int;

inline constexpr Category kMinCategory = 1;
inline constexpr Category kMaxCategory = 4;
inline constexpr Category kSimilarThreshold = 3;

class GroundTruth {
public:
  void add(const std::string& query_id, const std::string& result_id, Category c) {
    if (c < kMinCategory || c > kMaxCategory) {
      throw DataError("category out of range [1, 4] for (" + query_id + ", " + result_id + "): " + std::to_string(c));
    }
    if (!table_.emplace(std::pair{query_id, result_id}, c).second) {
      throw DataError("duplicate ground-truth pair (" + query_id + ", " + result_id + ")");
    }
  }

  const Category* find(const std::string& query_id, const std::string& result_id) const {
    const auto it = table_.find({query_id, result_id});
    return it == table_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return table_.size(); }

private:
  std::map<std::pair<std::string, std::string>, Category> table_;
};

/// `query_id,result_id,category`; a leading header row is skipped.
inline GroundTruth read_ground_truth(std::istream& in, const std::string& source = "ground truth") {
  GroundTruth gt;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto f = split(t, ',');
    if (f.size() != 3) throw DataError(source + ":" + std::to_string(line_no) + ": expected query_id,result_id,category");
    const auto c = std::string(trim(f[2]));
    if (line_no == 1 && c == "category") continue;
    int cat = 0;
    try {
      std::size_t used = 0;
      cat = std::stoi(c, &used);
      if (used != c.size()) throw std::invalid_argument(c);
    } catch (const std::exception&) {
      throw DataError(source + ":" + std::to_string(line_no) + ": bad category '" + c + "'");
    }
    gt.add(std::string(trim(f[0])), std::string(trim(f[1])), cat);
  }
  return gt;
}

inline GroundTruth read_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_ground_truth(in, path.string());
}

/// A query together with the repositories it returned, best first.
struct QueryOutcome {
  std::string query_id;
  QueryResult results;
};

namespace detail {

/// Categories of every returned pair, or an error naming all missing pairs.
inline std::vector<std::vector<Category>> lookup_categories(std::span<const QueryOutcome> outcomes,
                                                            const GroundTruth& gt) {
  std::vector<std::vector<Category>> out;
  std::vector<std::string> missing;
  for (const auto& q : outcomes) {
    std::vector<Category> cats;
    for (const auto& r : q.results) {
      if (const auto* c = gt.find(q.query_id, r.repo_id)) cats.push_back(*c);
      else missing.push_back("(" + q.query_id + ", " + r.repo_id + ")");
    }
    out.push_back(std::move(cats));
  }
  if (!missing.empty()) {
    std::string msg = "ground truth missing " + std::to_string(missing.size()) + " pair(s):";
    for (const auto& m : missing) msg += " " + m;
    throw DataError(msg);
  }
  return out;
}

}  // namespace detail

using CategoryHistogram = std::map<Category, std::size_t>;

inline CategoryHistogram category_histogram(std::span<const QueryOutcome> outcomes, const GroundTruth& gt) {
  CategoryHistogram h;
  for (Category c = kMinCategory; c <= kMaxCategory; ++c) h[c] = 0;
  for (const auto& cats : detail::lookup_categories(outcomes, gt)) {
    for (auto c : cats) ++h[c];
  }
  return h;
}

/// Share of queries with at least one returned repository of category >= 3.
inline double success_rate(std::span<const QueryOutcome> outcomes, const GroundTruth& gt) {
  const auto cats = detail::lookup_categories(outcomes, gt);
  if (cats.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& q : cats) {
    if (std::any_of(q.begin(), q.end(), [](Category c) { return c >= kSimilarThreshold; })) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(cats.size());
}

/// (SS + WS) / (SS + WS + WD + SD) from histogram counts.
inline double precision_from_counts(std::size_t ss, std::size_t ws, std::size_t wd, std::size_t sd) {
  const std::size_t total = ss + ws + wd + sd;
  return total == 0 ? 0.0 : static_cast<double>(ss + ws) / static_cast<double>(total);
}

/// Pooled over every returned pair of every query.
inline double precision(std::span<const QueryOutcome> outcomes, const GroundTruth& gt) {
  auto h = category_histogram(outcomes, gt);
  return precision_from_counts(h[4], h[3], h[2], h[1]);
}

/// Ranks where the highest category gets rank 1; tied categories share
/// the average of the ranks they span.
inline std::vector<double> ranks_from_categories(std::span<const Category> categories) {
  const std::size_t n = categories.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return categories[a] > categories[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && categories[order[j]] == categories[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = avg;
    i = j;
  }
  return ranks;
}

/// Spearman correlation of two rank vectors. Without ties this is
/// 1 - 6 sum(d^2) / (n (n^2 - 1)); with ties, the Pearson correlation of
/// the ranks. A constant ranking has no defined correlation and gives 0.
inline double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("spearman: rankings differ in length");
  const std::size_t n = a.size();
  if (n < 2) throw InvalidArgument("spearman: need at least 2 ranked items");
  auto has_ties = [](std::span<const double> r) {
    std::vector<double> s(r.begin(), r.end());
    std::sort(s.begin(), s.end());
    return std::adjacent_find(s.begin(), s.end()) != s.end();
  };
  if (!has_ties(a) && !has_ties(b)) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    const double nn = static_cast<double>(n);
    return 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));
  }
  const double nn = static_cast<double>(n);
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= nn;
  mb /= nn;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

/// Returned order (1..k) against the order induced by the ground truth.
inline double query_spearman(std::span<const Category> categories) {
  std::vector<double> returned(categories.size());
  for (std::size_t i = 0; i < returned.size(); ++i) returned[i] = static_cast<double>(i + 1);
  return spearman(returned, ranks_from_categories(categories));
}

struct EvalReport {
  std::size_t queries = 0;
  std::size_t k = 0;
  double success_rate = 0.0;
  double precision = 0.0;
  double spearman_mean = 0.0;  // over queries with at least 2 results
  CategoryHistogram category_counts;
};

inline EvalReport evaluate(std::span<const QueryOutcome> outcomes, const GroundTruth& gt, std::size_t k) {
  EvalReport r;
  r.queries = outcomes.size();
  r.k = k;
  r.category_counts = category_histogram(outcomes, gt);
  r.success_rate = success_rate(outcomes, gt);
  auto& h = r.category_counts;
  r.precision = precision_from_counts(h[4], h[3], h[2], h[1]);
  double total = 0.0;
  std::size_t counted = 0;
  for (const auto& cats : detail::lookup_categories(outcomes, gt)) {
    if (cats.size() < 2) continue;
    total += query_spearman(cats);
    ++counted;
  }
  r.spearman_mean = counted ? total / static_cast<double>(counted) : 0.0;
  return r;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [c, n] : r.category_counts) counts[std::to_string(c)] = n;
  return {{"queries", r.queries},       {"k", r.k},
          {"success_rate", r.success_rate}, {"precision", r.precision},
          {"spearman_mean", r.spearman_mean}, {"category_counts", counts}};
}

inline void write_eval_table(std::ostream& out, const EvalReport& r) {
  auto count = [&](Category c) {
    const auto it = r.category_counts.find(c);
    return it == r.category_counts.end() ? std::size_t{0} : it->second;
  };
  out << "success_rate\tprecision\tspearman_mean\tSS\tWS\tWD\tSD\n";
  out << format_real(r.success_rate) << '\t' << format_real(r.precision) << '\t' << format_real(r.spearman_mean)
      << '\t' << count(4) << '\t' << count(3) << '\t' << count(2) << '\t' << count(1) << '\n';
}

}  // namespace repo2vec
