#pragma once

// Agglomerative hierarchical clustering (Lance-Williams updates),
// dendrogram cuts, SSE curves with chord-distance elbow detection, and
// the adjusted Rand index for comparing partitions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "repo2vec/common.hpp"

namespace repo2vec {

enum class Linkage { ward, average, complete };

inline Linkage parse_linkage(std::string_view name) {
  if (name == "ward") return Linkage::ward;
  if (name == "average") return Linkage::average;
  if (name == "complete") return Linkage::complete;
  throw InvalidArgument("unknown linkage: " + std::string(name));
}

/// Reference to a dendrogram node: points are -(i+1), the merge at
/// position m is m+1.
using ClusterRef = std::int64_t;

inline ClusterRef point_ref(std::size_t i) { return -static_cast<ClusterRef>(i) - 1; }
inline ClusterRef merge_ref(std::size_t m) { return static_cast<ClusterRef>(m) + 1; }

struct Merge {
  ClusterRef left;
  ClusterRef right;
  double height;
  std::size_t size;

  friend bool operator==(const Merge&, const Merge&) = default;
};

struct Dendrogram {
  std::size_t points = 0;
  std::vector<Merge> merges;  // points - 1 entries
};

/// Distances within this relative margin of the minimum count as ties;
/// ties go to the pair with the smallest (min index, max index).
inline constexpr double kMergeTieTolerance = 1e-10;

inline bool within_tie(double d, double best) {
  return d <= best + kMergeTieTolerance * std::fabs(best) + 1e-14;
}

/// Base dissimilarity a linkage starts from: squared Euclidean for Ward,
/// Euclidean otherwise.
inline double base_distance(std::span<const double> a, std::span<const double> b, Linkage linkage) {
  const double sq = squared_distance(a, b);
  return linkage == Linkage::ward ? sq : std::sqrt(sq);
}

struct AgnesOptions {
  Linkage linkage = Linkage::ward;
  bool normalize = true;  // cluster unit-length copies of the inputs
};

/// Agglomerative clustering. A cluster is identified by its smallest
/// point index; left is always the cluster with the smaller index.
inline Dendrogram agnes(std::span<const Embedding> input, const AgnesOptions& options = {}) {
  const std::size_t n = input.size();
  if (n < 2) throw InvalidArgument("agnes: need at least 2 vectors");
  std::vector<Embedding> pts;
  pts.reserve(n);
  for (const auto& v : input) {
    require_same_dim(v, input.front(), "agnes");
    pts.push_back(options.normalize ? normalized(v) : v);
  }

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i * n + j] = dist[j * n + i] = base_distance(pts[i], pts[j], options.linkage);
    }
  }
  auto d = [&](std::size_t i, std::size_t j) -> double& { return dist[i * n + j]; };

  std::vector<std::size_t> size(n, 1);
  std::vector<ClusterRef> ref(n);
  for (std::size_t i = 0; i < n; ++i) ref[i] = point_ref(i);

  Dendrogram out;
  out.points = n;
  out.merges.reserve(n - 1);
  std::vector<std::size_t> live(n);
  std::iota(live.begin(), live.end(), 0);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < live.size(); ++x) {
      for (std::size_t y = x + 1; y < live.size(); ++y) best = std::min(best, d(live[x], live[y]));
    }
    std::size_t a = 0, b = 0;
    bool found = false;
    for (std::size_t x = 0; x < live.size() && !found; ++x) {
      for (std::size_t y = x + 1; y < live.size(); ++y) {
        if (within_tie(d(live[x], live[y]), best)) {
          a = live[x];
          b = live[y];
          found = true;
          break;
        }
      }
    }
    const double height = d(a, b);
    const std::size_t na = size[a], nb = size[b];
    for (auto k : live) {
      if (k == a || k == b) continue;
      const std::size_t nk = size[k];
      double nd = 0.0;
      switch (options.linkage) {
        case Linkage::ward:
          nd = ((na + nk) * d(k, a) + (nb + nk) * d(k, b) - nk * height) / static_cast<double>(na + nb + nk);
          break;
        case Linkage::average:
          nd = (na * d(k, a) + nb * d(k, b)) / static_cast<double>(na + nb);
          break;
        case Linkage::complete:
          nd = std::max(d(k, a), d(k, b));
          break;
      }
      d(k, a) = d(a, k) = nd;
    }
    out.merges.push_back({ref[a], ref[b], height, na + nb});
    ref[a] = merge_ref(step);
    size[a] = na + nb;
    live.erase(std::find(live.begin(), live.end(), b));
  }
  return out;
}

/// Labels after undoing the last k-1 merges. Labels are numbered by the
/// smallest point index in each cluster.
inline std::vector<std::size_t> cut(const Dendrogram& d, std::size_t k) {
  const std::size_t n = d.points;
  if (k < 1 || k > n) throw InvalidArgument("cut: k must be in [1, " + std::to_string(n) + "]");
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  // Representative point of every merge node.
  std::vector<std::size_t> rep(d.merges.size());
  auto point_of = [&](ClusterRef r) {
    return r < 0 ? static_cast<std::size_t>(-r - 1) : rep[static_cast<std::size_t>(r - 1)];
  };
  for (std::size_t m = 0; m < d.merges.size(); ++m) {
    rep[m] = point_of(d.merges[m].left);
    if (m < n - k) {
      const auto ra = find(point_of(d.merges[m].left));
      const auto rb = find(point_of(d.merges[m].right));
      parent[std::max(ra, rb)] = std::min(ra, rb);
    }
  }
  std::vector<std::size_t> labels(n);
  std::map<std::size_t, std::size_t> label_of_root;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = find(i);
    const auto [it, inserted] = label_of_root.emplace(r, label_of_root.size());
    labels[i] = it->second;
  }
  return labels;
}

/// Sum over points of the squared distance to their cluster centroid.
inline double sse(std::span<const Embedding> vectors, std::span<const std::size_t> labels) {
  if (vectors.empty()) return 0.0;
  const std::size_t dim = vectors.front().size();
  const std::size_t k = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<Embedding> centroid(k, Embedding(dim, 0.0));
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    ++count[labels[i]];
    for (std::size_t j = 0; j < dim; ++j) centroid[labels[i]][j] += vectors[i][j];
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (auto& x : centroid[c]) x /= static_cast<double>(std::max<std::size_t>(count[c], 1));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) total += squared_distance(vectors[i], centroid[labels[i]]);
  return total;
}

using SSECurve = std::map<std::size_t, double>;

/// SSE of cut(d, k) for k in [k_min, k_max].
inline SSECurve sse_curve(std::span<const Embedding> vectors, const Dendrogram& d, std::size_t k_min,
                          std::size_t k_max) {
  if (vectors.size() != d.points) throw InvalidArgument("sse_curve: vector count differs from dendrogram");
  if (k_min < 1 || k_min > k_max || k_max > d.points) throw InvalidArgument("sse_curve: bad k range");
  SSECurve curve;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    const auto labels = cut(d, k);
    curve[k] = sse(vectors, labels);
  }
  return curve;
}

/// Interior k farthest from the chord between the curve's endpoints,
/// both axes min-max scaled to [0, 1]. Ties go to the smaller k.
inline std::size_t elbow(const SSECurve& curve) {
  if (curve.size() < 3) throw InvalidArgument("elbow: need at least 3 points");
  const double k0 = static_cast<double>(curve.begin()->first);
  const double k1 = static_cast<double>(curve.rbegin()->first);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& [k, v] : curve) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span_y = hi > lo ? hi - lo : 1.0;
  auto xy = [&](std::size_t k, double v) {
    return std::pair{(static_cast<double>(k) - k0) / (k1 - k0), (v - lo) / span_y};
  };
  const auto [x0, y0] = xy(curve.begin()->first, curve.begin()->second);
  const auto [x1, y1] = xy(curve.rbegin()->first, curve.rbegin()->second);
  const double len = std::hypot(x1 - x0, y1 - y0);

  std::size_t best_k = std::next(curve.begin())->first;
  double best = -1.0;
  for (auto it = std::next(curve.begin()); it != std::prev(curve.end()); ++it) {
    const auto [x, y] = xy(it->first, it->second);
    const double dist = std::fabs((x1 - x0) * (y0 - y) - (x0 - x) * (y1 - y0)) / len;
    if (dist > best + 1e-12) {
      best = dist;
      best_k = it->first;
    }
  }
  return best_k;
}

/// Adjusted Rand index between two labelings of the same points.
inline double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw InvalidArgument("adjusted_rand_index: length mismatch");
  std::map<std::pair<std::size_t, std::size_t>, double> table;
  std::map<std::size_t, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  auto c2 = [](double x) { return x * (x - 1) / 2; };
  double index = 0, sa = 0, sb = 0;
  for (const auto& [key, v] : table) index += c2(v);
  for (const auto& [key, v] : rows) sa += c2(v);
  for (const auto& [key, v] : cols) sb += c2(v);
  const double expected = sa * sb / c2(static_cast<double>(a.size()));
  const double max_index = (sa + sb) / 2;
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

/// One merge per line: `left \t right \t height \t size`.
inline void write_dendrogram(std::ostream& out, const Dendrogram& d) {
  for (const auto& m : d.merges) {
    out << m.left << '\t' << m.right << '\t' << format_real(m.height) << '\t' << m.size << '\n';
  }
}

}  // namespace repo2vec
