#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include <anykernel/errors.hpp>
#include <anykernel/graph.hpp>
#include <anykernel/graph_kernels.hpp>
#include <anykernel/nature.hpp>

#include "oracles.hpp"

using namespace anykernel;

namespace {

EvolvingGraph graph_from(int n, const std::vector<std::pair<int, int>>& edges, int dim = 2) {
  EvolvingGraph g;
  for (int v = 0; v < n; ++v) g.add_node(v, DenseVector(static_cast<std::size_t>(dim), static_cast<double>(v)));
  for (auto [a, b] : edges) g.add_edge(a, b);
  return g;
}

Point pt(std::shared_ptr<const UniverseElement> u, double p) { return Point{Features(std::move(u)), p}; }

}  // namespace

TEST(Embeddedness, SharedNeighbors) {
  // i = 0, j = 1 share 2 and 3; not adjacent.
  const auto g = graph_from(5, {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {1, 4}});
  EXPECT_EQ(embeddedness(*g.element(0, 1)), 2);
}

TEST(Embeddedness, IsolatedPair) {
  const auto g = graph_from(2, {});
  EXPECT_EQ(embeddedness(*g.element(0, 1)), 0);
}

TEST(Embeddedness, StarLeaves) {
  const auto g = graph_from(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  EXPECT_EQ(embeddedness(*g.element(1, 2)), 1);
}

TEST(Embeddedness, AdjacentPairCountsItself) {
  const auto g = graph_from(2, {{0, 1}});
  EXPECT_EQ(embeddedness(*g.element(0, 1)), 2);
}

TEST(Embeddedness, MissingNode) {
  const auto g = graph_from(2, {});
  EXPECT_THROW(g.element(0, 7), DomainError);
}

TEST(PairGroups, DiagonalAndBins) {
  EvolvingGraph g;
  // Features: three group indicators.
  g.add_node(0, {1, 1, 0});
  g.add_node(1, {1, 1, 1});
  const auto groups = GroupFamily::from_feature_indices({0, 1, 2}, 3);
  const auto k = pair_groups_kernel(groups, 10);
  const auto u = g.element(0, 1);
  EXPECT_EQ(k(pt(u, 0.42), pt(u, 0.42)), 2.0 * 3.0);
  EXPECT_EQ(k(pt(u, 0.42), pt(u, 0.55)), 0.0);
}

TEST(PairGroups, MatchesDoubleLoop) {
  std::mt19937_64 rng(7);
  std::bernoulli_distribution coin(0.5);
  const auto groups = GroupFamily::from_feature_indices({0, 1, 2}, 3);
  const auto k = group_pair_count_kernel(groups);
  for (int rep = 0; rep < 200; ++rep) {
    EvolvingGraph g;
    for (int v = 0; v < 4; ++v) g.add_node(v, {double(coin(rng)), double(coin(rng)), double(coin(rng))});
    const auto a = g.element(0, 1), b = g.element(2, 3);
    double expect = 0.0;
    for (std::size_t g1 = 0; g1 < 3; ++g1)
      for (std::size_t g2 = 0; g2 < 3; ++g2)
        expect += a->features_i()[g1] * a->features_j()[g2] * b->features_i()[g1] * b->features_j()[g2];
    EXPECT_EQ(k(pt(a, 0.5), pt(b, 0.5)), expect);
    EXPECT_LE(k(pt(a, 0.5), pt(a, 0.5)), 9.0);
  }
}

TEST(GroupFamily, RejectsTooManyMemberships) {
  const auto groups = GroupFamily::from_feature_indices({0, 1, 2}, 2);
  EXPECT_THROW(groups.membership({1, 1, 1}), DomainError);
  EXPECT_EQ(groups.membership({1, 0, 1}), 0b101U);
}

TEST(EmbeddednessKernel, Values) {
  const auto k = embeddedness_kernel(10);
  const auto g2 = graph_from(5, {{0, 2}, {0, 3}, {1, 2}, {1, 3}});
  const auto g3 = graph_from(5, {{0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}, {1, 4}});
  const auto a = g2.element(0, 1), b = g2.element(0, 1), c = g3.element(0, 1);
  EXPECT_EQ(k(pt(a, 0.3), pt(b, 0.35)), 1.0);
  EXPECT_EQ(k(pt(a, 0.3), pt(c, 0.35)), 0.0);
  EXPECT_EQ(k(pt(c, 0.99), pt(c, 0.99)), 1.0);
  EXPECT_EQ(k.diag_bound(), 1.0);
}

TEST(Isomorphism, SmallCases) {
  const auto k = isomorphism_kernel(10);
  const auto e1 = graph_from(2, {{0, 1}}).element(0, 1);
  const auto e2 = graph_from(4, {{2, 3}}).element(2, 3);
  EXPECT_EQ(k(pt(e1, 0.2), pt(e2, 0.21)), 1.0);
  // Triangle through a common neighbor versus a path i - c - j.
  const auto tri = graph_from(3, {{0, 1}, {0, 2}, {1, 2}}).element(0, 1);
  const auto path = graph_from(3, {{0, 2}, {1, 2}}).element(0, 1);
  EXPECT_EQ(k(pt(tri, 0.5), pt(path, 0.5)), 0.0);
  EXPECT_EQ(k(pt(tri, 0.5), pt(tri, 0.05)), 0.0);
}

TEST(Isomorphism, MarkedPairIsOrdered) {
  // i has an extra private neighbor in a, j has it in b.
  const auto a = graph_from(3, {{0, 2}}).element(0, 1);
  const auto b = graph_from(3, {{1, 2}}).element(0, 1);
  EXPECT_EQ(isomorphism_kernel(10)(pt(a, 0.5), pt(b, 0.5)), 0.0);
  EXPECT_TRUE(oracle::isomorphic_marked(*a, *a));
  EXPECT_FALSE(oracle::isomorphic_marked(*a, *b));
}

TEST(Isomorphism, MatchesPermutationOracle) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> size(2, 7);
  std::bernoulli_distribution copy(0.5), flip(0.3);
  const auto k = isomorphism_kernel(10);
  int positives = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const int n = size(rng);
    const auto raw = oracle::random_element(rng, n, 0.4);
    auto other = copy(rng) ? oracle::relabel(raw, rng) : oracle::random_element(rng, n, 0.4);
    if (flip(rng) && n > 3) other = oracle::relabel(oracle::random_element(rng, n, 0.4), rng);
    const auto a = make_element(raw), b = make_element(other);
    const bool iso = oracle::isomorphic_marked(*a, *b);
    positives += iso;
    ASSERT_EQ(k(pt(a, 0.5), pt(b, 0.5)), iso ? 1.0 : 0.0) << "case " << rep;
  }
  EXPECT_GT(positives, 100);
}

TEST(Isomorphism, SizeCap) {
  std::vector<std::pair<int, int>> star;
  for (int v = 2; v < 12; ++v) star.emplace_back(0, v);
  const auto big = graph_from(12, star).element(0, 1);
  EXPECT_THROW(isomorphism_kernel(10)(pt(big, 0.5), pt(big, 0.5)), SizeError);
}

TEST(RConvolution, Examples) {
  const auto one = constant_kernel(1.0);
  EXPECT_EQ(r_convolution({}, {}, one), 0.0);
  EXPECT_EQ(r_convolution({{1.0}}, {{2.0}}, one), 1.0);
  const std::vector<DenseVector> a{{1.0, 0.0}, {0.5, 2.0}};
  const std::vector<DenseVector> b{{1.0, 1.0}, {0.0, -1.0}, {3.0, 0.5}};
  double expect = 0.0;
  for (const auto& x : a)
    for (const auto& y : b) expect += x[0] * y[0] + x[1] * y[1];
  EXPECT_NEAR(r_convolution(a, b, linear_features_kernel()), expect, 1e-12);
}

TEST(GraphStream, SnapshotRoundTrip) {
  std::ostringstream out;
  {
    GraphEvolution nature(GraphEvolutionParams{}, 3, &out);
    for (std::int64_t t = 1; t <= 200; ++t) {
      const auto x = nature.features(t);
      nature.outcome(t, x, PredictionDistribution::point_mass(0.5));
    }
    nature.finish();
    std::istringstream in(out.str());
    const auto g = read_graph(in);
    EXPECT_EQ(g.node_count(), nature.graph().node_count());
    EXPECT_EQ(g.edges(), nature.graph().edges());
  }
  std::istringstream bad("anykernel-graph 1\ndim 2\nt 1\ne 0 1\n");
  EXPECT_THROW(read_graph(bad), FormatError);
}

TEST(GraphEvolution, Deterministic) {
  auto run = [] {
    GraphEvolution nature(GraphEvolutionParams{}, 9);
    std::vector<std::string> forms;
    for (std::int64_t t = 1; t <= 100; ++t) {
      const auto x = nature.features(t);
      forms.push_back(x.element().canonical_form());
      nature.outcome(t, x, PredictionDistribution::point_mass(0.4));
    }
    return forms;
  };
  EXPECT_EQ(run(), run());
}
