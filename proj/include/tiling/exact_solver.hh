#ifndef TILING_EXACT_SOLVER_HH
#define TILING_EXACT_SOLVER_HH

#include <tiling/certificate.hh>
#include <tiling/constructions.hh>
#include <tiling/graph.hh>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tiling {

class IndivisibleN : public std::invalid_argument
{
public:
    explicit IndivisibleN(const std::string & what) : std::invalid_argument(what) {}
};

class TooLarge : public std::invalid_argument
{
public:
    explicit TooLarge(const std::string & what) : std::invalid_argument(what) {}
};

enum class NoFactorKind
{
    exhausted_search,
    column_argument
};

/// Premises of the column counting argument, as measured on the graph.
struct ColumnPremises
{
    G3Params params;
    std::array<int, 3> column_sizes{};
    /// Largest within-column cross-degree of each column.
    std::array<int, 3> max_column_degree{};
    bool columns_triangle_free = false;
    bool columns_c4_free = false;
    /// Every copy meets column 3 in at most h vertices of one class, so a
    /// factor needs at least 3 * ceil((qh + 1) / h) copies.
    int copies_needed = 0;
    int copies_available = 0;
};

struct NoFactorCertificate
{
    NoFactorKind kind = NoFactorKind::exhausted_search;
    std::uint64_t nodes = 0;
    BlockAssignment columns;
    ColumnPremises premises;
};

struct Unknown
{
    std::uint64_t nodes = 0;
    std::string reason;
};

using ExactOutcome = std::variant<FactorCertificate, NoFactorCertificate, Unknown>;

struct ExactOptions
{
    std::uint64_t node_budget = 100'000'000;
    unsigned threads = 1;
};

/// Throws IndivisibleN unless h divides N.
auto find_factor_exact(const TripartiteGraph & g, int h, const ExactOptions & options = {}) -> ExactOutcome;

inline constexpr int default_oracle_vertex_bound = 18;

/// Enumerates every partition of each class into h-blocks and every matching
/// of the blocks. Throws TooLarge when 3N exceeds max_vertices.
auto brute_force_oracle(const TripartiteGraph & g, int h, int max_vertices = default_oracle_vertex_bound) -> bool;

struct NotApplicable
{
    std::string reason;
};

/// Checks the premises of the column counting argument against a 3-column
/// labelling (columns[c][offset] in {0, 1, 2}).
auto g3_no_factor_certificate(const TripartiteGraph & g, const BlockAssignment & columns, int h)
    -> std::variant<NoFactorCertificate, NotApplicable>;

/// Re-derives a no-factor certificate: column premises are re-measured,
/// exhausted searches are re-run (brute force when the graph is tiny).
auto check_no_factor(const TripartiteGraph & g, int h, const NoFactorCertificate & cert, const ExactOptions & options = {}) -> Verdict;

auto to_factor_certificate(const std::vector<std::vector<std::vector<int>>> & copies) -> FactorCertificate;

}

#endif
