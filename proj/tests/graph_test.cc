#include <tiling/constructions.hh>
#include <tiling/graph.hh>
#include <tiling/random.hh>

#include <gtest/gtest.h>

#include "oracles.hh"

#include <algorithm>

using namespace tiling;

namespace
{
    using oracle::complete_graph;

    auto random_graph(int n, double p, std::uint64_t seed) -> TripartiteGraph
    {
        Rng rng(seed);
        return oracle::random_graph(n, p, rng);
    }

    // Counts edges by brute force over vertex pairs.
    auto slow_edges(const TripartiteGraph & g, const VertexSet & a, const VertexSet & b) -> std::int64_t
    {
        std::int64_t e = 0;
        for (int u : a.offsets())
            for (int v : b.offsets())
                e += g.has_edge({a.cls(), u}, {b.cls(), v});
        return e;
    }

    auto random_subset(int cls, int n, Rng & rng) -> VertexSet
    {
        VertexSet s(cls, n);
        for (int u = 0; u < n; ++u)
            if (bernoulli(rng, 0.5))
                s.insert(u);
        if (s.empty())
            s.insert(0);
        return s;
    }
}

TEST(Build, EmptyGraphOnThreeVertices)
{
    auto g = build(1, {});
    EXPECT_EQ(g.n(), 1);
    EXPECT_EQ(g.edge_count(), 0);
}

TEST(Build, CompleteK111)
{
    auto g = build(1, {{{0, 0}, {1, 0}}, {{0, 0}, {2, 0}}, {{1, 0}, {2, 0}}});
    EXPECT_EQ(g.edge_count(), 3);
    EXPECT_EQ(bar_min_degree(g), 1);
}

TEST(Build, DuplicateEdgesCollapse)
{
    auto g = build(2, {{{0, 1}, {2, 0}}, {{2, 0}, {0, 1}}});
    EXPECT_EQ(g.edge_count(), 1);
    EXPECT_TRUE(g.has_edge({2, 0}, {0, 1}));
}

TEST(Build, RejectsSameClassEdge)
{
    EXPECT_THROW(build(2, {{{1, 0}, {1, 1}}}), SameClassEdge);
}

TEST(Build, RejectsOutOfRange)
{
    EXPECT_THROW(build(2, {{{0, 2}, {1, 0}}}), OutOfRange);
    EXPECT_THROW(build(2, {{{0, 0}, {3, 0}}}), OutOfRange);
    EXPECT_THROW(build(2, {{{0, -1}, {1, 0}}}), OutOfRange);
}

TEST(BarMinDegree, CompleteGraphIsN)
{
    for (int n = 1; n <= 6; ++n)
        EXPECT_EQ(bar_min_degree(complete_graph(n)), n);
}

TEST(BarMinDegree, Gamma3IsTwo)
{
    auto b = blowup(PatternGraph::gamma3(), uniform_block_sizes(PatternGraph::gamma3(), 1));
    EXPECT_EQ(bar_min_degree(b.graph), 2);
}

TEST(BarMinDegree, LowerBoundsEveryCrossDegreeAndIsAttained)
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto g = random_graph(5, 0.6, seed);
        int d = bar_min_degree(g);
        bool attained = false;
        for (int i = 0; i < num_classes; ++i)
            for (int u = 0; u < g.n(); ++u)
                for (int j = 0; j < num_classes; ++j) {
                    if (i == j)
                        continue;
                    int c = g.cross_degree({i, u}, j);
                    EXPECT_LE(d, c);
                    attained = attained || c == d;
                }
        EXPECT_TRUE(attained);
    }
}

TEST(Density, CompleteIsOne)
{
    auto g = complete_graph(4);
    EXPECT_EQ(density(VertexSet::full(0, 4), VertexSet::full(2, 4), g), Rational(1));
}

TEST(Density, SameColumnThetaBlocksAreZero)
{
    auto pattern = PatternGraph::theta(3, 3);
    auto b = blowup(pattern, uniform_block_sizes(pattern, 2));
    for (int j = 0; j < 3; ++j) {
        auto a = VertexSet::of(0, 6, {2 * j, 2 * j + 1});
        auto c = VertexSet::of(1, 6, {2 * j, 2 * j + 1});
        EXPECT_EQ(density(a, c, b.graph), Rational(0));
    }
}

TEST(Density, SingletonEdge)
{
    auto g = build(2, {{{0, 1}, {1, 0}}});
    EXPECT_EQ(density(VertexSet::of(0, 2, {1}), VertexSet::of(1, 2, {0}), g), Rational(1));
    EXPECT_EQ(density(VertexSet::of(0, 2, {0}), VertexSet::of(1, 2, {0}), g), Rational(0));
}

TEST(Density, Errors)
{
    auto g = complete_graph(3);
    EXPECT_THROW(density(VertexSet(0, 3), VertexSet::full(1, 3), g), EmptySet);
    EXPECT_THROW(density(VertexSet::full(1, 3), VertexSet::full(1, 3), g), SameClass);
}

TEST(Density, SymmetricAndMatchesPairCount)
{
    Rng rng(7);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto g = random_graph(6, 0.5, seed);
        auto a = random_subset(0, 6, rng);
        auto b = random_subset(2, 6, rng);
        auto d = density(a, b, g);
        EXPECT_EQ(d, density(b, a, g));
        EXPECT_EQ(d, Rational(slow_edges(g, a, b), a.size() * b.size()));
    }
}

TEST(Neighbors, CompleteGraphGivesWholeClass)
{
    auto g = complete_graph(4);
    EXPECT_EQ(g.neighbors({1, 2}, 0), VertexSet::full(0, 4));
}

TEST(Neighbors, CommonOfEmptySetIsWholeClass)
{
    auto g = build(3, {});
    EXPECT_EQ(g.common_neighbors(VertexSet(0, 3), 2), VertexSet::full(2, 3));
}

TEST(Neighbors, CommonMatchesPairwiseCheck)
{
    Rng rng(11);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto g = random_graph(7, 0.7, seed);
        auto s = random_subset(1, 7, rng);
        auto common = g.common_neighbors(s, 2);
        for (int w = 0; w < 7; ++w) {
            bool all = true;
            for (int u : s.offsets())
                all = all && g.has_edge({1, u}, {2, w});
            EXPECT_EQ(common.contains(w), all);
        }
    }
}

TEST(Induced, FullSetsGiveSameGraph)
{
    auto g = random_graph(5, 0.5, 3);
    auto sub = induced(g, VertexSet::full(0, 5), VertexSet::full(1, 5), VertexSet::full(2, 5));
    EXPECT_EQ(sub.graph, g);
}

TEST(Induced, DensityIsPreservedUnderRestriction)
{
    Rng rng(5);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto g = random_graph(8, 0.5, seed);
        std::vector<int> pick;
        for (int u = 0; u < 8; ++u)
            if (bernoulli(rng, 0.5))
                pick.push_back(u);
        if (pick.empty())
            pick.push_back(3);
        std::vector<int> pick2 = pick, pick3 = pick;
        std::reverse(pick2.begin(), pick2.end());
        auto s1 = VertexSet::of(0, 8, pick), s2 = VertexSet::of(1, 8, pick2), s3 = VertexSet::of(2, 8, pick3);
        auto sub = induced(g, s1, s2, s3);
        int m = sub.graph.n();
        EXPECT_EQ(density(VertexSet::full(0, m), VertexSet::full(2, m), sub.graph), density(s1, s3, g));
        for (int u = 0; u < m; ++u)
            for (int v = 0; v < m; ++v)
                EXPECT_EQ(sub.graph.has_edge({0, u}, {1, v}), g.has_edge({0, sub.to_original[0][u]}, {1, sub.to_original[1][v]}));
    }
}

TEST(Induced, UnequalSizesRejected)
{
    auto g = complete_graph(3);
    EXPECT_THROW(induced(g, VertexSet::of(0, 3, {0}), VertexSet::full(1, 3), VertexSet::full(2, 3)), std::invalid_argument);
}

TEST(TextFormat, RoundTripIsIdentity)
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto g = random_graph(6, 0.4, seed);
        auto text = write_graph(g, 2);
        auto parsed = read_graph(text);
        EXPECT_EQ(parsed.graph, g);
        EXPECT_EQ(parsed.h, 2);
        EXPECT_EQ(write_graph(parsed.graph, parsed.h), text);
    }
}

TEST(TextFormat, CanonicalOrderAndOneBasedClasses)
{
    auto g = build(2, {{{2, 1}, {1, 0}}, {{0, 1}, {1, 1}}, {{0, 0}, {2, 1}}});
    EXPECT_EQ(write_graph(g, 0), "tripartite N=2 h=0\ne 1 1 2 1\ne 1 0 3 1\ne 2 0 3 1\n");
}

TEST(TextFormat, CommentsAndReversedEdgesAccepted)
{
    auto parsed = read_graph("# a comment\ntripartite N=2 h=1\n\ne 3 1 1 0  # trailing\n");
    EXPECT_TRUE(parsed.graph.has_edge({0, 0}, {2, 1}));
    EXPECT_EQ(parsed.graph.edge_count(), 1);
}

TEST(TextFormat, MalformedInputThrows)
{
    EXPECT_THROW(read_graph("tripartite N=x h=1\n"), ParseError);
    EXPECT_THROW(read_graph("tripartite N=2 h=1\ne 1 0 1 1\n"), ParseError);
    EXPECT_THROW(read_graph("tripartite N=2 h=1\ne 1 0 2 7\n"), ParseError);
    EXPECT_THROW(read_graph("e 1 0 2 1\n"), ParseError);
    EXPECT_THROW(read_graph("tripartite N=2 h=1\nf 1 0 2 1\n"), ParseError);
}

TEST(VertexSetOps, SetAlgebra)
{
    auto a = VertexSet::of(1, 5, {0, 1, 2});
    auto b = VertexSet::of(1, 5, {2, 3});
    EXPECT_EQ((a - b).offsets(), (std::vector<int>{0, 1}));
    EXPECT_EQ((a & b).offsets(), (std::vector<int>{2}));
    EXPECT_EQ((a | b).offsets(), (std::vector<int>{0, 1, 2, 3}));
}
