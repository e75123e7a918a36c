#ifndef TILING_TILER_HH
#define TILING_TILER_HH

#include <tiling/certificate.hh>
#include <tiling/exact_solver.hh>
#include <tiling/graph.hh>
#include <tiling/structure.hh>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tiling {

// ---- stars -----------------------------------------------------------------

struct Star
{
    VertexRef center;
    std::vector<int> leaves;    // offsets in the leaf class, sorted
    int leaf_class = 0;
};

/// Size and degree hypotheses of the star lemma, measured on the input.
struct StarHypotheses
{
    Rational epsilon{0};
    int m = 0;
    bool epsilon_small = false;     // below the lemma's bound for this form
    bool sizes_near_m = false;      // ||A_i| - m| < epsilon m
    bool degrees_small = false;     // d_i < epsilon m
    bool min_degrees_met = false;   // every leaf-side vertex has d_i neighbours among the centres' side
    auto all() const -> bool { return epsilon_small && sizes_near_m && degrees_small && min_degrees_met; }
};

struct StarFamily
{
    std::vector<Star> stars;
    /// counts[i] = number of stars centred in the i-th input set.
    std::vector<int> counts;
    StarHypotheses hypotheses;
};

/// The greedy stalled: every vertex of A1 \ S has fewer than h neighbours in
/// A2 \ T, where S are the centres and T the leaves used so far.
struct StarCertificate
{
    VertexSet centers_side;     // A1
    VertexSet leaves_side;      // A2
    VertexSet s;
    VertexSet t;
    int d1 = 0;
    int h = 0;
    int quota = 0;
    /// (d1 - |S|) |A2 \ T| <= e(A1 \ S, A2 \ T) <= (h - 1) |A1 \ S|
    std::int64_t lower = 0;
    std::int64_t edges = 0;
    std::int64_t upper = 0;
    /// delta_1 - (h - 1)(|A1 \ S| - |A2 \ T|) / |A2 \ T|, a lower bound on |S|
    /// whenever the minimum-degree hypothesis holds.
    Rational s_lower_bound{0};
    StarHypotheses hypotheses;
};

/// Re-checks the structural claims of a certificate against the graph: sizes,
/// containment, the fewer-than-h condition for all of A1 \ S, and |S| below
/// quota. When the minimum-degree hypothesis holds it also checks the
/// inequality chain and that the derived bound on |S| is consistent.
auto verify_star_certificate(const TripartiteGraph & g, const StarCertificate & c) -> Verdict;

auto verify_star_family(const TripartiteGraph & g, int h, const std::vector<VertexSet> & sets, const std::vector<int> & quotas,
    const StarFamily & f) -> Verdict;

/// Greedy K_{1,h} packing with centres in a1 and leaves in a2, aiming for
/// max(0, d1 - h + 1) stars. epsilon and m only feed the hypothesis report.
auto star_family_bipartite(const VertexSet & a1, const VertexSet & a2, const TripartiteGraph & g, int h, int d1,
    Rational epsilon = Rational(0), int m = 0) -> std::variant<StarFamily, StarCertificate>;

/// Stars centred in sets[i] with leaves in sets[(i + 1) % 3], quota
/// max(0, d[i] - h + 1) each, following the case chain of the lemma's proof.
auto star_family_tripartite(const std::array<VertexSet, 3> & sets, const TripartiteGraph & g, int h, const std::array<int, 3> & d,
    Rational epsilon = Rational(0), int m = 0) -> std::variant<StarFamily, StarCertificate>;

// ---- K_{h,h} factors and their extension -------------------------------------

class UnbalancedOrIndivisible : public std::invalid_argument
{
public:
    explicit UnbalancedOrIndivisible(const std::string & what) : std::invalid_argument(what) {}
};

class InvalidInputFactor : public std::invalid_argument
{
public:
    explicit InvalidInputFactor(const std::string & what) : std::invalid_argument(what) {}
};

struct KhhCopy
{
    std::vector<int> first;     // offsets in the first class, sorted
    std::vector<int> second;

    friend bool operator==(const KhhCopy &, const KhhCopy &) = default;
};

struct KhhFactor
{
    int first_class = 0;
    int second_class = 1;
    std::vector<KhhCopy> copies;
};

/// Items that cannot all be served: `deficient` indexes the items needing
/// vertices (clusters, or factor copies when extending) and `partners` lists
/// the offsets available to them, fewer than they need together.
struct MatchingFailure
{
    int matched = 0;
    int needed = 0;
    std::vector<std::vector<int>> clusters;
    std::vector<int> deficient;
    std::vector<int> partners;
    bool degree_hypothesis = false;
};

auto verify_khh_factor(const TripartiteGraph & g, int h, const VertexSet & b1, const VertexSet & b2, const KhhFactor & f) -> Verdict;

struct ClusterOptions
{
    /// Shuffle before cutting into clusters; offset order otherwise.
    std::optional<std::uint64_t> shuffle_seed;
    /// Grow each cluster by the vertex keeping the largest common neighbourhood
    /// on the other side, instead of cutting consecutive runs.
    bool by_common_neighbourhood = false;
    /// Also weigh common neighbours in the class neither side lies in, and
    /// only give a cluster vertices that keep h of them.
    bool count_third_class = false;
};

/// Cuts b1 into h-clusters and gives each cluster h common neighbours from b2
/// by maximum matching. Succeeds whenever every vertex misses fewer than
/// M / (2h^2) of the other side.
auto cluster_khh_factor(const VertexSet & b1, const VertexSet & b2, const TripartiteGraph & g, int h, const ClusterOptions & options = {})
    -> std::variant<KhhFactor, MatchingFailure>;

/// Gives every copy of a K_{h,h}-factor h common neighbours from `first`, a
/// set in the third class. With preset clusters each copy takes one whole
/// cluster instead.
auto extend_to_khhh(const TripartiteGraph & g, int h, const VertexSet & first, const KhhFactor & factor,
    const std::vector<std::vector<int>> & preset_clusters = {}) -> std::variant<std::vector<KhhhCopy>, MatchingFailure>;

/// Whole-graph form: `factor` covers two classes and the third is tiled.
auto extend_to_khhh(const TripartiteGraph & g, int h, const KhhFactor & factor) -> std::variant<FactorCertificate, MatchingFailure>;

/// Sparse split of a bipartite pair: both (a_sparse, b_sparse) and
/// (a_rest, b_rest) have density at most epsilon.
struct ThetaSplitWitness
{
    VertexSet a_sparse, a_rest, b_sparse, b_rest;
    Rational density{0};
    Rational rest_density{0};
};

struct KhhSearchOptions
{
    std::uint64_t seed = 0;
    int shuffles = 32;
    std::uint64_t node_budget = 1'000'000;
    /// Cluster swaps tried by the local search before the exact search.
    std::uint64_t swap_evaluations = 2000;
    FitOptions fit;
};

/// Cluster matching with seeded shuffles, a cluster swap search, a bounded
/// exact search, then a Theta_{2x2} fit. Unknown when none of them settles the pair.
auto khh_factor_or_theta(const VertexSet & b1, const VertexSet & b2, const TripartiteGraph & g, int h, Rational epsilon,
    const KhhSearchOptions & options = {}) -> std::variant<KhhFactor, ThetaSplitWitness, Unknown>;

// ---- pipeline ----------------------------------------------------------------

struct SolveConfig
{
    std::uint64_t seed = 0;
    Rational gamma{1, 20};
    Rational delta{1, 10};
    Rational epsilon{1, 20};
    /// A vertex is typical for a set when it misses at most this fraction of it.
    Rational typical{1, 10};
    std::uint64_t node_budget = 100'000'000;
    std::uint64_t local_node_budget = 1'000'000;
    std::uint64_t swap_evaluations = 2000;
    int effort = 8;
    int retries = 32;
    unsigned threads = 1;
    /// Skip the constructive stages and go straight to the exact search.
    bool exact_only = false;
    /// Run the cluster-matching stage before the extreme-case stage.
    bool direct = true;
    /// Optional 3-column labelling used to cross-check with the column argument.
    std::optional<BlockAssignment> columns;
};

struct ThresholdReport
{
    int bar_min_degree = 0;
    /// h ceil(2N / 3h) + h - 3, + h - 1 and + 2h - 1.
    int construction_level = 0;
    int extreme_level = 0;
    int upper_level = 0;
    /// Range for the optimal threshold at this N mod 6h.
    int band_low = 0;
    int band_high = 0;
};

auto threshold_report(const TripartiteGraph & g, int h) -> ThresholdReport;

enum class Branch
{
    none,
    part1,
    part2,
    part3a,
    part3b,
    very_extreme
};

auto branch_name(Branch b) -> std::string;

struct StageRecord
{
    std::string stage;
    std::string outcome;
    std::string detail;
};

struct StructureReport
{
    Branch branch = Branch::none;
    std::optional<ExtremeWitness> extreme;
    std::optional<ApproxWitness> theta33;
    std::optional<ApproxWitness> gamma3;
    std::optional<VeryExtremeWitness> very_extreme;
    std::string very_extreme_note;
};

enum class SolveOutcome
{
    factor,
    no_factor,
    structure_only,
    unknown
};

struct SolveResult
{
    SolveOutcome outcome = SolveOutcome::unknown;
    std::optional<FactorCertificate> factor;
    std::string factor_stage;
    std::optional<NoFactorCertificate> no_factor;
    std::optional<NoFactorCertificate> column_check;
    std::optional<StructureReport> structure;
    std::optional<Unknown> unknown;
    ThresholdReport thresholds;
    std::vector<StageRecord> trace;
};

/// Throws IndivisibleN unless h divides N.
auto solve(const TripartiteGraph & g, int h, const SolveConfig & config = {}) -> SolveResult;

}

#endif
