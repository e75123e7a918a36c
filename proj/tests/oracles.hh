#ifndef TILING_TESTS_ORACLES_HH
#define TILING_TESTS_ORACLES_HH

// Slow, obviously-correct reference computations and small generators shared
// by the unit tests and the acceptance runner. Nothing here uses the bitmaps
// beyond has_edge().

#include <tiling/graph.hh>
#include <tiling/random.hh>

#include <algorithm>
#include <numeric>
#include <vector>

namespace oracle {

using namespace tiling;

inline auto complete_graph(int n) -> TripartiteGraph
{
    GraphBuilder b(n);
    for (int i = 0; i < num_classes; ++i)
        for (int j = i + 1; j < num_classes; ++j)
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v)
                    b.add_edge({i, u}, {j, v});
    return std::move(b).build();
}

inline auto random_graph(int n, double p, Rng & rng) -> TripartiteGraph
{
    GraphBuilder b(n);
    for (int i = 0; i < num_classes; ++i)
        for (int j = i + 1; j < num_classes; ++j)
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v)
                    if (bernoulli(rng, p))
                        b.add_edge({i, u}, {j, v});
    return std::move(b).build();
}

/// Graph number `code` among all 2^(3 n^2) graphs on n vertices per class.
inline auto graph_from_code(int n, std::uint64_t code) -> TripartiteGraph
{
    GraphBuilder b(n);
    int bit = 0;
    for (int i = 0; i < num_classes; ++i)
        for (int j = i + 1; j < num_classes; ++j)
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v, ++bit)
                    if ((code >> bit) & 1U)
                        b.add_edge({i, u}, {j, v});
    return std::move(b).build();
}

inline auto slow_bar_min_degree(const TripartiteGraph & g) -> int
{
    int best = g.n();
    for (int i = 0; i < num_classes; ++i)
        for (int u = 0; u < g.n(); ++u)
            for (int j = 0; j < num_classes; ++j) {
                if (i == j)
                    continue;
                int d = 0;
                for (int v = 0; v < g.n(); ++v)
                    d += g.has_edge({i, u}, {j, v});
                best = std::min(best, d);
            }
    return best;
}

inline auto count_triangles(const TripartiteGraph & g) -> long
{
    long t = 0;
    for (int a = 0; a < g.n(); ++a)
        for (int b = 0; b < g.n(); ++b)
            if (g.has_edge({0, a}, {1, b}))
                for (int c = 0; c < g.n(); ++c)
                    t += g.has_edge({0, a}, {2, c}) && g.has_edge({1, b}, {2, c});
    return t;
}

/// Number of 4-cycles inside the pair (i, j): pairs of pairs with all four edges.
inline auto count_c4(const TripartiteGraph & g, int i, int j) -> long
{
    long t = 0;
    const int n = g.n();
    for (int u = 0; u < n; ++u)
        for (int u2 = u + 1; u2 < n; ++u2) {
            long common = 0;
            for (int v = 0; v < n; ++v)
                common += g.has_edge({i, u}, {j, v}) && g.has_edge({i, u2}, {j, v});
            t += common * (common - 1) / 2;
        }
    return t;
}

/// Decides a K_{h,h,h}-factor by trying every way to pick the copy through the
/// lowest uncovered vertex of class 1. Independent of the library search.
inline auto slow_has_factor(const TripartiteGraph & g, int h) -> bool
{
    const int n = g.n();
    std::vector<std::vector<bool>> used(num_classes, std::vector<bool>(static_cast<std::size_t>(n), false));

    auto subsets = [&](int cls, int size, int must) {
        std::vector<std::vector<int>> out;
        std::vector<int> free;
        for (int u = 0; u < n; ++u)
            if (! used[cls][u] && u != must)
                free.push_back(u);
        const int need = must >= 0 ? size - 1 : size;
        if (need > static_cast<int>(free.size()))
            return out;
        std::vector<bool> mask(free.size(), false);
        std::fill(mask.begin(), mask.begin() + need, true);
        do {
            std::vector<int> s;
            if (must >= 0)
                s.push_back(must);
            for (std::size_t k = 0; k < free.size(); ++k)
                if (mask[k])
                    s.push_back(free[k]);
            out.push_back(s);
        } while (std::prev_permutation(mask.begin(), mask.end()));
        return out;
    };

    auto complete = [&](int ci, const std::vector<int> & a, int cj, const std::vector<int> & b) {
        for (int u : a)
            for (int v : b)
                if (! g.has_edge({ci, u}, {cj, v}))
                    return false;
        return true;
    };

    auto rec = [&](auto & self) -> bool {
        int first = -1;
        for (int u = 0; u < n && first < 0; ++u)
            if (! used[0][u])
                first = u;
        if (first < 0)
            return true;
        for (const auto & a : subsets(0, h, first))
            for (const auto & b : subsets(1, h, -1)) {
                if (! complete(0, a, 1, b))
                    continue;
                for (const auto & c : subsets(2, h, -1)) {
                    if (! complete(0, a, 2, c) || ! complete(1, b, 2, c))
                        continue;
                    for (int x : a)
                        used[0][x] = true;
                    for (int x : b)
                        used[1][x] = true;
                    for (int x : c)
                        used[2][x] = true;
                    bool ok = self(self);
                    for (int x : a)
                        used[0][x] = false;
                    for (int x : b)
                        used[1][x] = false;
                    for (int x : c)
                        used[2][x] = false;
                    if (ok)
                        return true;
                }
            }
        return false;
    };
    return rec(rec);
}

}

#endif
