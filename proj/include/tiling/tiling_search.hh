#ifndef TILING_TILING_SEARCH_HH
#define TILING_TILING_SEARCH_HH

#include <tiling/graph.hh>

#include <cstdint>
#include <vector>

namespace tiling {

/// Exact search for a perfect tiling by complete multipartite copies
/// K_{h,...,h} over two or three classes, restricted to given vertex subsets.
/// Used for K_{h,h,h}-factors of a whole graph and for K_{h,h}-factors of a
/// bipartite pair.
struct TilingProblem
{
    const TripartiteGraph * graph = nullptr;
    std::vector<int> classes;    // distinct, increasing
    std::vector<Bits> allowed;   // one per entry of classes
    int h = 1;
};

enum class SearchStatus
{
    found,
    exhausted,
    budget_exceeded
};

/// copies[k][p] = offsets of copy k inside classes[p], sorted.
using TileCopies = std::vector<std::vector<std::vector<int>>>;

struct TilingSearchResult
{
    SearchStatus status = SearchStatus::exhausted;
    TileCopies copies;
    std::uint64_t nodes = 0;
};

struct TilingSearchOptions
{
    std::uint64_t node_budget = 100'000'000;
    unsigned threads = 1;
};

/// Branches on the uncovered vertex lying in the fewest remaining copies
/// (counts capped, ties to lowest class then lowest offset) and enumerates the
/// copies through it in lexicographic order. Deterministic for any thread count.
auto search_tiling(const TilingProblem & problem, const TilingSearchOptions & options = {}) -> TilingSearchResult;

}

#endif
