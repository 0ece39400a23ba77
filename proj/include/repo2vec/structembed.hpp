#pragma once

// Directory-structure embedding: second-order biased random walks over
// the anonymous tree, skip-gram over the node sequences, and column-wise
// aggregation of the node vectors into one structure vector.

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "repo2vec/common.hpp"
#include "repo2vec/corpus.hpp"
#include "repo2vec/textembed.hpp"

namespace repo2vec {

struct WalkConfig {
  double p = 1.0;  // return parameter
  double q = 1.0;  // in-out parameter
  std::size_t walks_per_node = 10;
  std::size_t walk_length = 40;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(p > 0.0) || !(q > 0.0)) throw InvalidArgument("WalkConfig: p and q must be > 0");
    if (walks_per_node < 1) throw InvalidArgument("WalkConfig: walks_per_node must be >= 1");
    if (walk_length < 2) throw InvalidArgument("WalkConfig: walk_length must be >= 2");
  }
};

using Walk = std::vector<std::size_t>;
using NodeWalks = std::vector<Walk>;

/// Undirected graph view used by the walker. Trees are the production
/// input; the walker itself only needs adjacency.
class WalkGraph {
public:
  explicit WalkGraph(std::vector<std::vector<std::size_t>> adjacency) : adj_(std::move(adjacency)) {
    for (auto& nbrs : adj_) {
      sorted_.emplace_back(nbrs);
      std::sort(sorted_.back().begin(), sorted_.back().end());
    }
  }
  explicit WalkGraph(const DirTree& tree) : WalkGraph(tree.adjacency()) {}

  std::size_t size() const { return adj_.size(); }
  const std::vector<std::size_t>& neighbors(std::size_t n) const { return adj_.at(n); }
  bool adjacent(std::size_t a, std::size_t b) const {
    return std::binary_search(sorted_[a].begin(), sorted_[a].end(), b);
  }

private:
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::vector<std::size_t>> sorted_;
};

/// Normalized probabilities of moving from `current` to each of its
/// neighbors (in adjacency order), given the node visited before it:
/// weight 1/p to return, 1 to a neighbor of `previous`, 1/q otherwise.
inline std::vector<double> transition_probabilities(const WalkGraph& g, std::size_t previous,
                                                    std::size_t current, double p, double q) {
  const auto& nbrs = g.neighbors(current);
  std::vector<double> w(nbrs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    const auto x = nbrs[i];
    if (x == previous) {
      w[i] = 1.0 / p;
    } else if (g.adjacent(previous, x)) {
      w[i] = 1.0;
    } else {
      w[i] = 1.0 / q;
    }
    total += w[i];
  }
  for (auto& x : w) x /= total;
  return w;
}

namespace detail {

inline std::size_t sample_index(std::span<const double> probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

}  // namespace detail

/// One walk from `start`. The first step is uniform over neighbors, later
/// steps use the second-order weights. Each walk has its own RNG stream
/// so the result does not depend on the order walks are generated in.
inline Walk random_walk(const WalkGraph& g, std::size_t start, const WalkConfig& config,
                        std::uint64_t walk_seed) {
  Rng rng(walk_seed);
  Walk walk{start};
  walk.reserve(config.walk_length);
  while (walk.size() < config.walk_length) {
    const auto cur = walk.back();
    const auto& nbrs = g.neighbors(cur);
    if (nbrs.empty()) break;
    if (walk.size() == 1) {
      walk.push_back(nbrs[static_cast<std::size_t>(rng.below(nbrs.size()))]);
      continue;
    }
    const auto probs = transition_probabilities(g, walk[walk.size() - 2], cur, config.p, config.q);
    walk.push_back(nbrs[detail::sample_index(probs, rng)]);
  }
  return walk;
}

/// walks_per_node walks from every node, round by round.
inline NodeWalks generate_walks(const WalkGraph& g, const WalkConfig& config) {
  config.validate();
  if (g.size() == 0) throw InvalidArgument("generate_walks: empty graph");
  NodeWalks walks;
  walks.reserve(g.size() * config.walks_per_node);
  for (std::size_t r = 0; r < config.walks_per_node; ++r) {
    for (std::size_t n = 0; n < g.size(); ++n) {
      walks.push_back(random_walk(g, n, config, derive_seed(config.seed, n, r)));
    }
  }
  return walks;
}

inline NodeWalks generate_walks(const DirTree& tree, const WalkConfig& config) {
  return generate_walks(WalkGraph(tree), config);
}

/// Debug dump: one walk per line, space-separated node indices.
inline void write_walks(std::ostream& out, const NodeWalks& walks) {
  for (const auto& w : walks) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) out << ' ';
      out << w[i];
    }
    out << '\n';
  }
}

/// Skip-gram over the walks with node indices as tokens. Returns one
/// vector per node index.
inline std::map<std::size_t, Embedding> train_node_vectors(const NodeWalks& walks,
                                                           const EmbedConfig& config) {
  std::vector<TokenSequence> seqs;
  seqs.reserve(walks.size());
  bool has_pair = false;
  for (const auto& w : walks) {
    TokenSequence s;
    s.reserve(w.size());
    for (auto n : w) s.push_back(std::to_string(n));
    has_pair = has_pair || w.size() >= 2;
    seqs.push_back(std::move(s));
  }
  if (!has_pair) throw InvalidArgument("train_node_vectors: need at least one walk of length >= 2");
  const auto model = train_skipgram(seqs, config);
  std::map<std::size_t, Embedding> out;
  for (std::size_t i = 0; i < model.vocab.size(); ++i) {
    const auto r = model.input.row(i);
    out.emplace(std::stoull(model.vocab.token(i)), Embedding(r.begin(), r.end()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Column-wise aggregation

enum class Aggregator { mean, mode, max, min, sum, std };

inline std::string_view to_string(Aggregator a) {
  switch (a) {
    case Aggregator::mean: return "mean";
    case Aggregator::mode: return "mode";
    case Aggregator::max: return "max";
    case Aggregator::min: return "min";
    case Aggregator::sum: return "sum";
    case Aggregator::std: return "std";
  }
  return "?";
}

inline Aggregator parse_aggregator(std::string_view name) {
  for (auto a : {Aggregator::mean, Aggregator::mode, Aggregator::max, Aggregator::min,
                 Aggregator::sum, Aggregator::std}) {
    if (to_string(a) == name) return a;
  }
  throw InvalidArgument("unknown aggregator: " + std::string(name));
}

namespace detail {

inline double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

/// Most frequent value after rounding to three decimals; the mean of the
/// tied values when several are equally frequent.
inline double column_mode(std::vector<double> column) {
  for (auto& x : column) x = round3(x);
  std::sort(column.begin(), column.end());
  std::size_t best = 0;
  std::vector<double> tied;
  for (std::size_t i = 0; i < column.size();) {
    std::size_t j = i;
    while (j < column.size() && column[j] == column[i]) ++j;
    const std::size_t run = j - i;
    if (run > best) {
      best = run;
      tied.assign(1, column[i]);
    } else if (run == best) {
      tied.push_back(column[i]);
    }
    i = j;
  }
  return exact_sum(tied) / static_cast<double>(tied.size());
}

}  // namespace detail

/// Applies `agg` to every column of the input vectors. Results do not
/// depend on the order of the inputs: sums are correctly rounded.
inline Embedding aggregate(std::span<const Embedding> vectors, Aggregator agg) {
  if (vectors.empty()) throw InvalidArgument("aggregate: empty input");
  const std::size_t dim = vectors.front().size();
  for (const auto& v : vectors) require_same_dim(v, vectors.front(), "aggregate");
  const double n = static_cast<double>(vectors.size());

  Embedding out(dim);
  std::vector<double> column(vectors.size());
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t i = 0; i < vectors.size(); ++i) column[i] = vectors[i][d];
    const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
    const bool constant = *lo == *hi;
    switch (agg) {
      case Aggregator::min: out[d] = *lo; break;
      case Aggregator::max: out[d] = *hi; break;
      case Aggregator::sum: out[d] = exact_sum(column); break;
      case Aggregator::mean: out[d] = constant ? *lo : exact_sum(column) / n; break;
      case Aggregator::std: {
        if (constant) {
          out[d] = 0.0;
          break;
        }
        const double mean = exact_sum(column) / n;
        std::vector<double> sq(column.size());
        for (std::size_t i = 0; i < column.size(); ++i) sq[i] = (column[i] - mean) * (column[i] - mean);
        out[d] = std::sqrt(exact_sum(sq) / n);
        break;
      }
      case Aggregator::mode: out[d] = detail::column_mode(column); break;
    }
  }
  return out;
}

/// Structure vector S of one tree. Trees without an edge map to zero.
inline Embedding struct2vec(const DirTree& tree, const WalkConfig& walk_config,
                            const EmbedConfig& embed_config, Aggregator agg = Aggregator::mean) {
  if (tree.size() < 2) return Embedding(embed_config.dim, 0.0);
  const auto walks = generate_walks(tree, walk_config);
  const auto node_vectors = train_node_vectors(walks, embed_config);
  std::vector<Embedding> vs;
  vs.reserve(node_vectors.size());
  for (const auto& [node, v] : node_vectors) vs.push_back(v);
  return aggregate(vs, agg);
}

}  // namespace repo2vec
