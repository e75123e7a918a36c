#ifndef TILING_CONSTRUCTIONS_HH
#define TILING_CONSTRUCTIONS_HH

#include <tiling/certificate.hh>
#include <tiling/graph.hh>

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tiling {

struct BlockId
{
    int part = 0;
    int block = 0;

    friend bool operator==(const BlockId &, const BlockId &) = default;
    friend auto operator<=>(const BlockId &, const BlockId &) = default;
};

/// A small template graph whose vertices are blocks (part, block). Blocks in
/// different parts are adjacent unless the pair is listed as a nonedge; blocks
/// in one part are never adjacent.
class PatternGraph
{
public:
    PatternGraph(std::string name, int parts, int blocks_per_part, std::vector<std::pair<BlockId, BlockId>> nonedges);

    /// The 3x3 obstruction: every block misses exactly one block of each other
    /// part, and no choice of three pairwise adjacent blocks covers all nine.
    static auto gamma3() -> PatternGraph;
    /// Theta_{parts x blocks}: (i, j) ~ (i', j') iff i != i' and j != j'.
    static auto theta(int parts, int blocks) -> PatternGraph;
    /// Theta_{2x2} on parts 1 and 2, with a third part joined to everything.
    static auto theta22_with_apex_part() -> PatternGraph;
    static auto complete(int parts) -> PatternGraph;

    auto name() const -> const std::string & { return name_; }
    auto parts() const -> int { return parts_; }
    auto blocks_per_part() const -> int { return blocks_; }
    auto adjacent(BlockId a, BlockId b) const -> bool;
    auto nonedges() const -> const std::vector<std::pair<BlockId, BlockId>> & { return nonedges_; }

private:
    std::string name_;
    int parts_;
    int blocks_;
    std::vector<std::pair<BlockId, BlockId>> nonedges_;
    std::vector<bool> nonadjacent_;
};

class UnbalancedParts : public std::invalid_argument
{
public:
    explicit UnbalancedParts(const std::string & what) : std::invalid_argument(what) {}
};

using BlockSizes = std::vector<std::vector<int>>;

auto uniform_block_sizes(const PatternGraph & pattern, int block_size) -> BlockSizes;

/// Block labels for a tripartite graph: block_of[c][offset].
using BlockAssignment = std::array<std::vector<int>, num_classes>;

struct Blowup
{
    TripartiteGraph graph;
    BlockAssignment block_of;
};

/// Blocks occupy contiguous offset ranges in block order.
auto blowup(const PatternGraph & pattern, const BlockSizes & block_sizes) -> Blowup;

/// blowup() followed by turning each vertex pair on a pattern nonedge into an
/// edge independently with probability p.
auto noisy_blowup(const PatternGraph & pattern, const BlockSizes & block_sizes, double p, std::uint64_t seed) -> Blowup;

class Infeasible : public std::runtime_error
{
public:
    Infeasible(int n, int d, const std::string & what) : std::runtime_error(what), n(n), d(d) {}

    int n;
    int d;
    std::optional<int> column;
};

struct SidonPair
{
    int modulus = 0;
    std::vector<int> s_set;
    std::vector<int> t_set;
};

/// True iff both sets are Sidon in Z_n, have size d, and (S + S) misses T.
auto check_sidon_pair(const SidonPair & pair, int d, std::string * why = nullptr) -> bool;

struct SidonSearchBudget
{
    int restarts = 64;
    int insertions_per_restart = 10000;
};

/// Seeded randomized search with backtracking. Throws Infeasible when the
/// budget runs out or when d(d-1) > n-1 rules out a Sidon d-set mod n.
auto find_sidon_pair(int n, int d, std::uint64_t seed, SidonSearchBudget budget = {}) -> SidonPair;

/// Difference graph of a Sidon pair: (1,u)~(2,v) iff v-u in S, (2,v)~(3,w) iff
/// w-v in S, (1,u)~(3,w) iff w-u in T.
auto q_graph_from_pair(const SidonPair & pair) -> TripartiteGraph;

struct QGraph
{
    TripartiteGraph graph;
    SidonPair pair;
};

auto q_graph(int n, int d, std::uint64_t seed, SidonSearchBudget budget = {}) -> QGraph;

struct G3Params
{
    int h = 3;
    int q = 1;
    int r = 1;

    auto n() const -> int { return (3 * q + r) * h; }
    auto column_sizes() const -> std::array<int, 3> { return {q * h + r * h - 1, q * h, q * h + 1}; }
    /// Column 1 carries no internal edges when rh+h-4 < 0; never happens for h >= 3.
    auto column_degrees() const -> std::array<int, 3> { return {std::max(r * h + h - 4, 0), h - 3, h - 2}; }
    auto expected_bar_min_degree() const -> int { return 2 * q * h + r * h + h - 3; }
    void validate() const;
};

struct G3Instance
{
    G3Params params;
    TripartiteGraph graph;
    /// column_of[c][offset] in {0, 1, 2}; columns are contiguous ranges in order.
    BlockAssignment column_of;
};

auto g3_construction(const G3Params & params, std::uint64_t seed, SidonSearchBudget budget = {}) -> G3Instance;

/// Random graph with bar_min_degree exactly target: random start, repair
/// deficient vertices by adding edges, then delete random edges while every
/// degree stays above target until some degree reaches it.
auto random_graph_with_min_degree(int n, int target, std::uint64_t seed) -> TripartiteGraph;

struct PlantedFactor
{
    TripartiteGraph graph;
    FactorCertificate factor;
};

/// N/h disjoint random copies of K_{h,h,h} plus every other cross pair
/// independently with probability extra_edge_prob.
auto planted_factor_graph(int n, int h, double extra_edge_prob, std::uint64_t seed) -> PlantedFactor;

}

#endif
