#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "repo2vec/cluster.hpp"
#include "test_support.hpp"

using namespace repo2vec;

namespace {

void expect_same_dendrogram(const Dendrogram& a, const Dendrogram& b) {
  ASSERT_EQ(a.merges.size(), b.merges.size());
  for (std::size_t m = 0; m < a.merges.size(); ++m) {
    EXPECT_EQ(a.merges[m].left, b.merges[m].left) << "merge " << m;
    EXPECT_EQ(a.merges[m].right, b.merges[m].right) << "merge " << m;
    EXPECT_EQ(a.merges[m].size, b.merges[m].size) << "merge " << m;
    EXPECT_NEAR(a.merges[m].height, b.merges[m].height, 1e-9 * std::max(1.0, std::fabs(b.merges[m].height)));
  }
}

}  // namespace

TEST(Agnes, FourPointsOnALine) {
  const std::vector<Embedding> pts{{0.0}, {1.0}, {5.0}, {7.0}};
  const auto d = agnes(pts, {Linkage::complete, false});
  ASSERT_EQ(d.merges.size(), 3u);
  EXPECT_EQ(d.merges[0], (Merge{-1, -2, 1.0, 2}));
  EXPECT_EQ(d.merges[1], (Merge{-3, -4, 2.0, 2}));
  EXPECT_EQ(d.merges[2], (Merge{1, 2, 7.0, 4}));
  EXPECT_EQ(cut(d, 2), (std::vector<std::size_t>{0, 0, 1, 1}));
  EXPECT_EQ(cut(d, 4), (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(cut(d, 1), (std::vector<std::size_t>{0, 0, 0, 0}));
}

TEST(Agnes, WardHeightsOnLine) {
  const std::vector<Embedding> pts{{0.0}, {1.0}, {5.0}, {7.0}};
  const auto d = agnes(pts, {Linkage::ward, false});
  EXPECT_DOUBLE_EQ(d.merges[0].height, 1.0);
  EXPECT_DOUBLE_EQ(d.merges[1].height, 4.0);
  // 2 * 2 * 2 / 4 * (0.5 - 6)^2
  EXPECT_DOUBLE_EQ(d.merges[2].height, 60.5);
}

TEST(Agnes, TiesGoToSmallestPair) {
  // Unit square: four equal nearest-neighbour distances.
  const std::vector<Embedding> pts{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  for (auto l : {Linkage::ward, Linkage::average, Linkage::complete}) {
    const auto d = agnes(pts, {l, false});
    EXPECT_EQ(d.merges[0].left, -1);
    EXPECT_EQ(d.merges[0].right, -2);
    EXPECT_EQ(d.merges[1].left, -3);
    EXPECT_EQ(d.merges[1].right, -4);
  }
}

TEST(Agnes, MatchesNaiveOracleOnRandomInstances) {
  Rng rng(99);
  for (int seed = 0; seed < 20; ++seed) {
    const std::size_t n = 2 + rng.below(9);
    std::vector<Embedding> pts;
    for (std::size_t i = 0; i < n; ++i) {
      // integer grid points create exact ties
      pts.push_back({static_cast<double>(rng.below(4)), static_cast<double>(rng.below(4)) + 1.0});
    }
    for (auto l : {Linkage::ward, Linkage::average, Linkage::complete}) {
      for (bool norm : {false, true}) {
        const auto got = agnes(pts, {l, norm});
        const auto want = oracle::agnes(pts, l, norm);
        expect_same_dendrogram(got, want);
        for (std::size_t k = 1; k <= n; ++k) EXPECT_EQ(cut(got, k), oracle::cut(want, k));
      }
    }
  }
}

TEST(Agnes, Errors) {
  EXPECT_THROW(agnes(std::vector<Embedding>{{1.0}}), InvalidArgument);
  EXPECT_THROW(agnes(std::vector<Embedding>{{1.0}, {1.0, 2.0}}), InvalidArgument);
  const auto d = agnes(std::vector<Embedding>{{0.0}, {1.0}}, {Linkage::ward, false});
  EXPECT_THROW(cut(d, 0), InvalidArgument);
  EXPECT_THROW(cut(d, 3), InvalidArgument);
  EXPECT_THROW(parse_linkage("single"), InvalidArgument);
}

TEST(Sse, CurveIsNonIncreasingForWard) {
  Rng rng(5);
  std::vector<Embedding> pts;
  for (int i = 0; i < 25; ++i) pts.push_back(testing_support::random_vector(rng, 4));
  const auto d = agnes(pts, {Linkage::ward, false});
  const auto curve = sse_curve(pts, d, 1, 25);
  double prev = INFINITY;
  for (const auto& [k, v] : curve) {
    EXPECT_LE(v, prev + 1e-12);
    prev = v;
  }
  EXPECT_NEAR(curve.at(25), 0.0, 1e-12);
}

TEST(Elbow, HandComputedCurve) {
  const SSECurve curve{{1, 100}, {2, 40}, {3, 15}, {4, 12}, {5, 11}, {6, 10.5}};
  EXPECT_EQ(elbow(curve), 3u);
}

TEST(Elbow, StraightLineTiesToSmallestK) {
  const SSECurve line{{1, 5}, {2, 4}, {3, 3}, {4, 2}, {5, 1}};
  EXPECT_EQ(elbow(line), 2u);
  EXPECT_THROW(elbow(SSECurve{{1, 2}, {2, 1}}), InvalidArgument);
}

TEST(AdjustedRand, MatchesPairCountingOracle) {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng.below(30);
    std::vector<std::size_t> a(n), b(n);
    for (auto& x : a) x = rng.below(4);
    for (auto& x : b) x = rng.below(3);
    EXPECT_NEAR(adjusted_rand_index(a, b), oracle::ari(a, b), 1e-12);
  }
  const std::vector<std::size_t> x{0, 0, 1, 1}, y{5, 5, 2, 2};
  EXPECT_DOUBLE_EQ(adjusted_rand_index(x, y), 1.0);
}

TEST(Dendrogram, Export) {
  const auto d = agnes(std::vector<Embedding>{{0.0}, {1.0}, {3.0}}, {Linkage::complete, false});
  std::ostringstream out;
  write_dendrogram(out, d);
  EXPECT_EQ(out.str(), "-1\t-2\t1\t2\n1\t-3\t3\t3\n");
}
