#include <tiling/certificate.hh>
#include <tiling/constructions.hh>

#include <gtest/gtest.h>

#include "oracles.hh"

#include <set>

using namespace tiling;

namespace
{
    // Independent Sidon-pair check by listing all differences and sums.
    auto slow_sidon_ok(const SidonPair & p, int d) -> bool
    {
        const int n = p.modulus;
        auto is_sidon = [&](const std::vector<int> & s) {
            std::multiset<int> diffs;
            for (int a : s)
                for (int b : s)
                    if (a != b)
                        diffs.insert(((a - b) % n + n) % n);
            for (int x : diffs)
                if (diffs.count(x) > 1)
                    return false;
            return std::set<int>(s.begin(), s.end()).size() == s.size();
        };
        if (static_cast<int>(p.s_set.size()) != d || static_cast<int>(p.t_set.size()) != d)
            return false;
        if (! is_sidon(p.s_set) || ! is_sidon(p.t_set))
            return false;
        for (int a : p.s_set)
            for (int b : p.s_set)
                for (int t : p.t_set)
                    if ((a + b) % n == t)
                        return false;
        return true;
    }

    auto exact_regular(const TripartiteGraph & g, int d) -> bool
    {
        for (int i = 0; i < num_classes; ++i)
            for (int u = 0; u < g.n(); ++u)
                for (int j = 0; j < num_classes; ++j) {
                    if (i == j)
                        continue;
                    int deg = 0;
                    for (int v = 0; v < g.n(); ++v)
                        deg += g.has_edge({i, u}, {j, v});
                    if (deg != d)
                        return false;
                }
        return true;
    }
}

TEST(Pattern, Gamma3HasBarMinDegreeTwoAndNoTriangleFactor)
{
    auto p = PatternGraph::gamma3();
    auto b = blowup(p, uniform_block_sizes(p, 1));
    EXPECT_EQ(oracle::slow_bar_min_degree(b.graph), 2);
    EXPECT_FALSE(oracle::slow_has_factor(b.graph, 1));
}

TEST(Pattern, ThetaAdjacency)
{
    auto p = PatternGraph::theta(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int i2 = 0; i2 < 3; ++i2)
                for (int j2 = 0; j2 < 3; ++j2)
                    EXPECT_EQ(p.adjacent({i, j}, {i2, j2}), i != i2 && j != j2);
}

TEST(Pattern, RejectsSamePartNonedge)
{
    EXPECT_THROW(PatternGraph("bad", 3, 2, {{{0, 0}, {0, 1}}}), std::invalid_argument);
}

TEST(Blowup, SizeOneGamma3IsGamma3)
{
    auto p = PatternGraph::gamma3();
    auto b = blowup(p, uniform_block_sizes(p, 1));
    EXPECT_EQ(b.graph.n(), 3);
    EXPECT_EQ(b.graph.edge_count(), 27 - 9);
}

TEST(Blowup, Theta33HasBarMinDegreeTwoM)
{
    auto p = PatternGraph::theta(3, 3);
    for (int m = 1; m <= 4; ++m)
        EXPECT_EQ(bar_min_degree(blowup(p, uniform_block_sizes(p, m)).graph), 2 * m);
}

TEST(Blowup, SingleBlockIsComplete)
{
    auto b = blowup(PatternGraph::complete(3), {{4}, {4}, {4}});
    EXPECT_EQ(b.graph, oracle::complete_graph(4));
}

TEST(Blowup, BlockDensitiesAreZeroOrOne)
{
    auto p = PatternGraph::gamma3();
    BlockSizes sizes{{1, 2, 3}, {3, 2, 1}, {2, 2, 2}};
    auto b = blowup(p, sizes);
    const int n = b.graph.n();
    for (int i = 0; i < 3; ++i)
        for (int i2 = i + 1; i2 < 3; ++i2)
            for (int j = 0; j < 3; ++j)
                for (int j2 = 0; j2 < 3; ++j2) {
                    VertexSet a(i, n), c(i2, n);
                    for (int u = 0; u < n; ++u) {
                        if (b.block_of[i][u] == j)
                            a.insert(u);
                        if (b.block_of[i2][u] == j2)
                            c.insert(u);
                    }
                    EXPECT_EQ(density(a, c, b.graph), Rational(p.adjacent({i, j}, {i2, j2}) ? 1 : 0));
                }
}

TEST(Blowup, UnbalancedRejected)
{
    auto p = PatternGraph::theta(3, 2);
    EXPECT_THROW(blowup(p, {{1, 2}, {2, 2}, {1, 2}}), UnbalancedParts);
}

TEST(Blowup, NoisyWithZeroProbabilityIsExact)
{
    auto p = PatternGraph::theta(3, 3);
    EXPECT_EQ(noisy_blowup(p, uniform_block_sizes(p, 3), 0.0, 5).graph, blowup(p, uniform_block_sizes(p, 3)).graph);
}

TEST(Sidon, EmptyForDegreeZero)
{
    auto p = find_sidon_pair(9, 0, 1);
    EXPECT_TRUE(p.s_set.empty());
    EXPECT_TRUE(p.t_set.empty());
}

TEST(Sidon, SingletonsModSeven)
{
    auto p = find_sidon_pair(7, 1, 3);
    EXPECT_TRUE(slow_sidon_ok(p, 1));
}

TEST(Sidon, LargerInstancesPassIndependentCheck)
{
    for (auto [n, d] : std::vector<std::pair<int, int>>{{101, 4}, {31, 3}, {60, 5}, {200, 6}})
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto p = find_sidon_pair(n, d, seed);
            EXPECT_TRUE(slow_sidon_ok(p, d)) << n << " " << d;
            EXPECT_TRUE(check_sidon_pair(p, d));
        }
}

TEST(Sidon, CheckerRejectsBadPairs)
{
    EXPECT_FALSE(check_sidon_pair({10, {0, 1, 2}, {5, 7, 9}}, 3));    // 1-0 == 2-1
    EXPECT_FALSE(check_sidon_pair({10, {0, 1}, {2, 5}}, 2));          // 1+1 == 2
    EXPECT_FALSE(check_sidon_pair({10, {0, 1}, {5}}, 2));
    EXPECT_TRUE(check_sidon_pair({10, {0, 1}, {5, 7}}, 2));
}

TEST(Sidon, SmallModulusIsInfeasible)
{
    // d(d-1) > n-1 leaves too few differences.
    EXPECT_THROW(find_sidon_pair(5, 3, 0), Infeasible);
    EXPECT_THROW(find_sidon_pair(8, 5, 0), Infeasible);
}

TEST(Sidon, DeterministicGivenSeed)
{
    auto a = find_sidon_pair(80, 5, 42);
    auto b = find_sidon_pair(80, 5, 42);
    EXPECT_EQ(a.s_set, b.s_set);
    EXPECT_EQ(a.t_set, b.t_set);
}

TEST(QGraph, EmptyForDegreeZero)
{
    EXPECT_EQ(q_graph(7, 0, 1).graph.edge_count(), 0);
}

TEST(QGraph, TriangleFreeC4FreeRegular)
{
    for (auto [n, d] : std::vector<std::pair<int, int>>{{7, 1}, {31, 3}, {40, 4}, {5, 2}, {4, 1}})
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            auto q = q_graph(n, d, seed);
            EXPECT_EQ(oracle::count_triangles(q.graph), 0);
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j)
                    EXPECT_EQ(oracle::count_c4(q.graph, i, j), 0);
            EXPECT_TRUE(exact_regular(q.graph, d));
        }
}

TEST(G3, ParameterArithmetic)
{
    G3Params a{3, 1, 1};
    EXPECT_EQ(a.n(), 12);
    EXPECT_EQ(a.column_sizes(), (std::array<int, 3>{5, 3, 4}));
    EXPECT_EQ(a.column_degrees(), (std::array<int, 3>{2, 0, 1}));
    EXPECT_EQ(a.expected_bar_min_degree(), 9);

    G3Params b{4, 1, 2};
    EXPECT_EQ(b.n(), 20);
    EXPECT_EQ(b.column_sizes(), (std::array<int, 3>{11, 4, 5}));
    EXPECT_EQ(b.column_degrees(), (std::array<int, 3>{8, 1, 2}));
    EXPECT_EQ(b.expected_bar_min_degree(), 17);
}

TEST(G3, TwoFormulasForBarMinDegreeAgree)
{
    for (int h = 3; h <= 6; ++h)
        for (int q = 1; q <= 5; ++q)
            for (int r = 1; r <= 2; ++r) {
                G3Params p{h, q, r};
                const int n = p.n();
                const int ceil = (2 * n + 3 * h - 1) / (3 * h);
                EXPECT_EQ(p.expected_bar_min_degree(), h * ceil + h - 3);
                auto sizes = p.column_sizes();
                EXPECT_EQ(sizes[0] + sizes[1] + sizes[2], n);
            }
}

TEST(G3, SmallestInstanceBuildsWithExactBarMinDegree)
{
    auto inst = g3_construction({3, 1, 1}, 0);
    EXPECT_EQ(inst.graph.n(), 12);
    EXPECT_EQ(oracle::slow_bar_min_degree(inst.graph), 9);
    for (int c = 0; c < 3; ++c) {
        std::array<int, 3> count{};
        for (int col : inst.column_of[c])
            ++count[col];
        EXPECT_EQ(count, (std::array<int, 3>{5, 3, 4}));
        EXPECT_TRUE(std::is_sorted(inst.column_of[c].begin(), inst.column_of[c].end()));
    }
}

TEST(G3, SecondInstanceBarMinDegree)
{
    auto inst = g3_construction({3, 2, 1}, 0);
    EXPECT_EQ(inst.graph.n(), 21);
    EXPECT_EQ(oracle::slow_bar_min_degree(inst.graph), 15);
}

TEST(G3, InfeasibleColumnIsReported)
{
    try {
        g3_construction({4, 1, 2}, 0);
        FAIL() << "expected Infeasible";
    }
    catch (const Infeasible & e) {
        ASSERT_TRUE(e.column.has_value());
        EXPECT_EQ(*e.column, 1);
        EXPECT_EQ(e.n, 11);
        EXPECT_EQ(e.d, 8);
    }
}

TEST(G3, InvalidParameters)
{
    EXPECT_THROW(g3_construction({2, 1, 1}, 0), std::invalid_argument);
    EXPECT_THROW(g3_construction({3, 1, 3}, 0), std::invalid_argument);
}

TEST(RandomMinDegree, SaturatedTargetGivesComplete)
{
    EXPECT_EQ(random_graph_with_min_degree(6, 6, 1), oracle::complete_graph(6));
}

TEST(RandomMinDegree, HitsTargetExactly)
{
    for (int n = 3; n <= 8; ++n)
        for (int t = 0; t <= n; ++t)
            for (std::uint64_t seed = 0; seed < 5; ++seed)
                EXPECT_EQ(oracle::slow_bar_min_degree(random_graph_with_min_degree(n, t, seed)), t) << n << " " << t;
}

TEST(Planted, SingleCopy)
{
    auto p = planted_factor_graph(3, 3, 0.5, 0);
    EXPECT_EQ(p.graph, oracle::complete_graph(3));
    EXPECT_EQ(p.factor.copies.size(), 1U);
}

TEST(Planted, NoNoiseMeansDisjointCopies)
{
    auto p = planted_factor_graph(4, 2, 0.0, 9);
    EXPECT_EQ(p.graph.edge_count(), 2 * 3 * 4);
    EXPECT_TRUE(verify_factor(p.graph, 2, p.factor));
}

TEST(Planted, CertificateAlwaysVerifies)
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const int h = 1 + static_cast<int>(seed % 3);
        auto p = planted_factor_graph(h * 4, h, 0.3, seed);
        EXPECT_TRUE(verify_factor(p.graph, h, p.factor));
    }
}

TEST(VerifyFactor, DetectsDeletedEdge)
{
    auto g = oracle::complete_graph(2);
    FactorCertificate cert{{KhhhCopy{{std::vector<int>{0, 1}, std::vector<int>{0, 1}, std::vector<int>{0, 1}}}}};
    EXPECT_TRUE(verify_factor(g, 2, cert));
    auto b = g.to_builder();
    b.remove_edge({0, 1}, {2, 0});
    auto v = verify_factor(std::move(b).build(), 2, cert);
    EXPECT_FALSE(v);
    EXPECT_FALSE(v.first_violation.empty());
}

TEST(VerifyFactor, DetectsReuseAndWrongCount)
{
    auto g = oracle::complete_graph(2);
    FactorCertificate reuse{{KhhhCopy{{std::vector<int>{0}, std::vector<int>{0}, std::vector<int>{0}}},
        KhhhCopy{{std::vector<int>{0}, std::vector<int>{1}, std::vector<int>{1}}}}};
    EXPECT_FALSE(verify_factor(g, 1, reuse));
    FactorCertificate short_one{{KhhhCopy{{std::vector<int>{0}, std::vector<int>{0}, std::vector<int>{0}}}}};
    EXPECT_FALSE(verify_factor(g, 1, short_one));
}
