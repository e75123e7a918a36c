#ifndef TILING_MATCHING_HH
#define TILING_MATCHING_HH

#include <vector>

namespace tiling {

/// Bipartite graph given by adjacency lists of the left side.
struct BipartiteAdjacency
{
    int left = 0;
    int right = 0;
    std::vector<std::vector<int>> adj;
};

struct Matching
{
    std::vector<int> mate_left;     // -1 when unmatched
    std::vector<int> mate_right;
    int size = 0;
};

/// Hopcroft-Karp. Neighbours are tried in the order listed.
auto maximum_matching(const BipartiteAdjacency & g) -> Matching;

/// A left set whose neighbourhood is smaller than itself, found from a maximum
/// matching by alternating reachability (Koenig). Empty iff the matching
/// saturates the left side.
struct HallViolator
{
    std::vector<int> left;
    std::vector<int> neighbours;
};

auto hall_violator(const BipartiteAdjacency & g, const Matching & m) -> HallViolator;

}

#endif
