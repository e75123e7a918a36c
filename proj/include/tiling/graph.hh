#ifndef TILING_GRAPH_HH
#define TILING_GRAPH_HH

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>
#include <boost/rational.hpp>

namespace tiling {

using Bits = boost::dynamic_bitset<std::uint64_t>;
using Rational = boost::rational<std::int64_t>;

inline constexpr int num_classes = 3;

// Class indices are 0-based in the C++ API. The text format and the CLI use
// 1-based class indices.
struct VertexRef
{
    int cls = 0;
    int offset = 0;

    friend bool operator==(const VertexRef &, const VertexRef &) = default;
    friend auto operator<=>(const VertexRef &, const VertexRef &) = default;
};

class SameClassEdge : public std::invalid_argument
{
public:
    explicit SameClassEdge(const std::string & what) : std::invalid_argument(what) {}
};

class OutOfRange : public std::out_of_range
{
public:
    explicit OutOfRange(const std::string & what) : std::out_of_range(what) {}
};

class EmptySet : public std::invalid_argument
{
public:
    explicit EmptySet(const std::string & what) : std::invalid_argument(what) {}
};

class SameClass : public std::invalid_argument
{
public:
    explicit SameClass(const std::string & what) : std::invalid_argument(what) {}
};

class ParseError : public std::runtime_error
{
public:
    explicit ParseError(const std::string & what) : std::runtime_error(what) {}
};

/// A subset of one vertex class, stored as a bitmap over [0, N).
class VertexSet
{
public:
    VertexSet() = default;
    VertexSet(int cls, int n) : cls_(cls), members_(static_cast<std::size_t>(n)) {}
    VertexSet(int cls, Bits members) : cls_(cls), members_(std::move(members)) {}

    static auto full(int cls, int n) -> VertexSet;
    static auto of(int cls, int n, const std::vector<int> & offsets) -> VertexSet;

    auto cls() const -> int { return cls_; }
    auto universe() const -> int { return static_cast<int>(members_.size()); }
    auto size() const -> int { return static_cast<int>(members_.count()); }
    auto empty() const -> bool { return members_.none(); }
    auto contains(int offset) const -> bool { return members_.test(static_cast<std::size_t>(offset)); }
    auto bits() const -> const Bits & { return members_; }

    void insert(int offset) { members_.set(static_cast<std::size_t>(offset)); }
    void erase(int offset) { members_.reset(static_cast<std::size_t>(offset)); }

    /// Members in increasing offset order.
    auto offsets() const -> std::vector<int>;

    auto operator-(const VertexSet & other) const -> VertexSet;
    auto operator&(const VertexSet & other) const -> VertexSet;
    auto operator|(const VertexSet & other) const -> VertexSet;

    friend bool operator==(const VertexSet &, const VertexSet &) = default;

private:
    int cls_ = 0;
    Bits members_;
};

class TripartiteGraph;

/// Single-owner builder. Edges are deduplicated.
class GraphBuilder
{
public:
    explicit GraphBuilder(int n_per_class);

    auto n() const -> int { return n_; }
    void add_edge(VertexRef a, VertexRef b);
    void remove_edge(VertexRef a, VertexRef b);
    auto has_edge(VertexRef a, VertexRef b) const -> bool;

    auto build() && -> TripartiteGraph;
    auto build() const & -> TripartiteGraph;

private:
    void check(VertexRef a, VertexRef b) const;

    int n_;
    // rows_[i][j][u] = neighbours of (i, u) in class j
    std::array<std::array<std::vector<Bits>, num_classes>, num_classes> rows_;
};

/// Balanced tripartite graph with N vertices per class. Immutable.
class TripartiteGraph
{
public:
    TripartiteGraph() = default;

    auto n() const -> int { return n_; }
    auto has_edge(VertexRef a, VertexRef b) const -> bool;

    /// Neighbours of v inside class j, as a bitmap over [0, N). Empty for j == v.cls.
    auto row(VertexRef v, int j) const -> const Bits &;

    auto cross_degree(VertexRef v, int j) const -> int;
    auto neighbors(VertexRef v, int j) const -> VertexSet;

    /// Common neighbours in class j of every vertex of s; all of V^(j) when s is empty.
    auto common_neighbors(const VertexSet & s, int j) const -> VertexSet;

    auto edge_count() const -> std::int64_t;
    auto edge_count(const VertexSet & a, const VertexSet & b) const -> std::int64_t;

    /// Edges as (a, b) with a.cls < b.cls, ordered by class pair then offsets.
    auto edges() const -> std::vector<std::pair<VertexRef, VertexRef>>;

    auto to_builder() const -> GraphBuilder;

    friend bool operator==(const TripartiteGraph &, const TripartiteGraph &) = default;

private:
    friend class GraphBuilder;

    int n_ = 0;
    std::array<std::array<std::vector<Bits>, num_classes>, num_classes> rows_;
};

auto build(int n_per_class, const std::vector<std::pair<VertexRef, VertexRef>> & edges) -> TripartiteGraph;

auto bar_min_degree(const TripartiteGraph & g) -> int;

/// Exact e(a, b) / (|a| |b|).
auto density(const VertexSet & a, const VertexSet & b, const TripartiteGraph & g) -> Rational;

struct InducedGraph
{
    TripartiteGraph graph;
    // to_original[c][k] = original offset of the k-th vertex of class c
    std::array<std::vector<int>, num_classes> to_original;
};

/// Subgraph induced by three equal-sized sets, one per class, relabelled densely
/// in increasing offset order.
auto induced(const TripartiteGraph & g, const VertexSet & s1, const VertexSet & s2, const VertexSet & s3) -> InducedGraph;

struct ParsedGraph
{
    TripartiteGraph graph;
    int h = 0;
};

void write_graph(std::ostream & out, const TripartiteGraph & g, int h);
auto write_graph(const TripartiteGraph & g, int h) -> std::string;
auto read_graph(std::istream & in) -> ParsedGraph;
auto read_graph(const std::string & text) -> ParsedGraph;
auto read_graph_file(const std::string & path) -> ParsedGraph;

}

#endif
