#pragma once

// Weighted fusion of the metadata, structure and code vectors into one
// repository vector, cosine similarity, and top-k queries over a store.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "repo2vec/common.hpp"
#include "repo2vec/vector_io.hpp"

namespace repo2vec {

inline constexpr std::size_t kPartDim = 128;
inline constexpr std::size_t kFusedDim = 3 * kPartDim;

struct FusionWeights {
  double meta = 1.0;
  double structure = 1.0;
  double code = 1.0;

  void validate() const {
    for (double w : {meta, structure, code}) {
      if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgument("fusion weights must lie in [0, 1]");
    }
  }

  friend bool operator==(const FusionWeights&, const FusionWeights&) = default;
};

/// Presets "M" (metadata only), "MS" (metadata + structure), "All".
inline FusionWeights variant_weights(std::string_view name) {
  if (name == "M") return {1.0, 0.0, 0.0};
  if (name == "MS") return {1.0, 1.0, 0.0};
  if (name == "All") return {1.0, 1.0, 1.0};
  throw InvalidArgument("unknown weight preset: " + std::string(name));
}

/// Concatenation (M, S, C) of the unit-normalized parts scaled by their
/// weights. Zero parts stay zero.
inline Embedding fuse(std::span<const double> meta, std::span<const double> structure,
                      std::span<const double> code, const FusionWeights& w) {
  if (meta.size() != structure.size() || meta.size() != code.size()) {
    throw InvalidArgument("fuse: parts must share a dimension");
  }
  Embedding out;
  out.reserve(meta.size() * 3);
  const std::span<const double> parts[] = {meta, structure, code};
  const double weights[] = {w.meta, w.structure, w.code};
  for (std::size_t p = 0; p < 3; ++p) {
    for (double x : normalized(parts[p])) out.push_back(weights[p] * x);
  }
  return out;
}

/// dot(a,b)/(|a||b|), or 0 when either vector is zero.
inline double cosine(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a, b, "cosine");
  const double aa = dot(a, a);
  const double bb = dot(b, b);
  if (aa == 0.0 || bb == 0.0) return 0.0;
  // sqrt(aa*bb) keeps cosine(v, v) exactly 1.
  const double c = dot(a, b) / std::sqrt(aa * bb);
  return std::clamp(c, -1.0, 1.0);
}

struct RepoEmbedding {
  std::string repo_id;
  Embedding meta;
  Embedding structure;
  Embedding code;
  Embedding fused;
};

inline RepoEmbedding make_embedding(std::string repo_id, Embedding m, Embedding s, Embedding c,
                                    const FusionWeights& w) {
  RepoEmbedding e{std::move(repo_id), std::move(m), std::move(s), std::move(c), {}};
  e.fused = fuse(e.meta, e.structure, e.code, w);
  return e;
}

struct ScoredRepo {
  std::string repo_id;
  double score;

  friend bool operator==(const ScoredRepo&, const ScoredRepo&) = default;
};

using QueryResult = std::vector<ScoredRepo>;

/// Minimal view of a store row for querying: id and fused vector.
struct StoreRow {
  std::string repo_id;
  Embedding fused;
};

/// The k most cosine-similar repositories to the query, query excluded,
/// ties by ascending repo_id.
inline QueryResult top_k(std::string_view query_id, std::span<const StoreRow> store, std::size_t k) {
  if (k < 1) throw InvalidArgument("top_k: k must be >= 1");
  const auto q = std::find_if(store.begin(), store.end(), [&](const StoreRow& r) { return r.repo_id == query_id; });
  if (q == store.end()) throw InvalidArgument("unknown query id: " + std::string(query_id));
  QueryResult all;
  all.reserve(store.size());
  for (const auto& r : store) {
    if (r.repo_id == query_id) continue;
    all.push_back({r.repo_id, cosine(q->fused, r.fused)});
  }
  const std::size_t n = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(),
                    [](const ScoredRepo& a, const ScoredRepo& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.repo_id < b.repo_id;
                    });
  all.resize(n);
  return all;
}

inline std::vector<StoreRow> store_rows(std::span<const RepoEmbedding> embeddings) {
  std::vector<StoreRow> rows;
  rows.reserve(embeddings.size());
  for (const auto& e : embeddings) rows.push_back({e.repo_id, e.fused});
  return rows;
}

inline std::vector<StoreRow> read_store(const std::filesystem::path& path, std::size_t dim = kFusedDim) {
  std::vector<StoreRow> rows;
  for (auto& [id, v] : read_vectors_tsv(path, dim)) rows.push_back({std::move(id), std::move(v)});
  return rows;
}

inline void write_store(std::ostream& out, std::span<const StoreRow> rows) {
  for (const auto& r : rows) write_vector_row(out, r.repo_id, r.fused);
}

/// `rank \t repo_id \t score`, ranks from 1.
inline void write_query_result(std::ostream& out, const QueryResult& result) {
  for (std::size_t i = 0; i < result.size(); ++i) {
    out << (i + 1) << '\t' << result[i].repo_id << '\t' << format_real(result[i].score) << '\n';
  }
}

}  // namespace repo2vec
