#ifndef TILING_STRUCTURE_HH
#define TILING_STRUCTURE_HH

#include <tiling/constructions.hh>
#include <tiling/graph.hh>

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tiling {

class MalformedAssignment : public std::invalid_argument
{
public:
    explicit MalformedAssignment(const std::string & what) : std::invalid_argument(what) {}
};

class WrongDivisibility : public std::invalid_argument
{
public:
    explicit WrongDivisibility(const std::string & what) : std::invalid_argument(what) {}
};

struct NotFound
{
    std::string reason;
    /// True when every candidate was examined, so the answer is a proof of absence.
    bool exhaustive = false;
};

struct Violation
{
    std::string message;
};

/// Sets A_1, A_2, A_3 of size floor(N/3), one per class, with pairwise
/// densities (1,2), (1,3), (2,3) all at most gamma.
struct ExtremeWitness
{
    std::array<VertexSet, num_classes> sets;
    std::array<Rational, 3> densities;
};

struct DetectOptions
{
    int restarts = 8;
    /// Enumerate every triple of sets when floor(N/3) is at most this.
    int exhaustive_set_size = 2;
};

/// Seeded multi-start swap refinement minimising the edges among the three
/// sets; exhaustive when floor(N/3) is small. Returned witnesses are verified
/// with exact densities.
auto detect_extreme(const TripartiteGraph & g, Rational gamma, std::uint64_t seed, const DetectOptions & options = {})
    -> std::variant<ExtremeWitness, NotFound>;

/// Re-evaluates sizes and densities of an extreme-case witness.
auto check_extreme(const TripartiteGraph & g, const ExtremeWitness & w, Rational gamma) -> bool;

/// The vertex sets a pattern is laid over: part p of the pattern lives in
/// parts[p], a subset of one class. Parts are in distinct classes and have a
/// common size.
using PatternParts = std::vector<VertexSet>;

auto whole_classes(const TripartiteGraph & g, int parts) -> PatternParts;

/// block_of[p][offset] is the pattern block of that vertex of part p, or -1
/// for vertices of the class outside the part.
using PatternAssignment = std::vector<std::vector<int>>;

struct NonedgeDensity
{
    BlockId a;
    BlockId b;
    Rational density;
};

struct ApproxWitness
{
    std::string pattern;
    int m = 0;
    PatternParts parts;
    PatternAssignment block_of;
    std::vector<NonedgeDensity> densities;
};

/// Checks block sizes are m or m + 1 with m = floor(part size / blocks) and
/// every pattern nonedge block pair has density below delta. Throws
/// MalformedAssignment for labels that do not fit the parts or sizes.
auto check_approx(const TripartiteGraph & g, const PatternGraph & pattern, const PatternParts & parts,
    const PatternAssignment & block_of, Rational delta) -> std::variant<ApproxWitness, Violation>;

auto check_approx(const TripartiteGraph & g, const PatternGraph & pattern, const PatternAssignment & block_of, Rational delta)
    -> std::variant<ApproxWitness, Violation>;

/// Converts a blow-up's block map into a whole-graph pattern assignment.
auto assignment_from_blocks(const BlockAssignment & blocks, int parts) -> PatternAssignment;

struct FitOptions
{
    int restarts = 8;
    /// Enumerate every balanced assignment when there are at most this many.
    std::uint64_t exhaustive_limit = 200'000;
};

/// Neighbourhood clustering, label alignment, then swap and move refinement
/// minimising the edges lying on pattern nonedges.
auto fit_approx(const TripartiteGraph & g, const PatternGraph & pattern, const PatternParts & parts, Rational delta,
    std::uint64_t seed, const FitOptions & options = {}) -> std::variant<ApproxWitness, NotFound>;

auto fit_approx(const TripartiteGraph & g, const PatternGraph & pattern, Rational delta, std::uint64_t seed,
    const FitOptions & options = {}) -> std::variant<ApproxWitness, NotFound>;

/// sets[i][j] is the block of class i matched to pattern block (i, j).
using NineSets = std::array<std::array<VertexSet, 3>, num_classes>;

struct VeryExtremeWitness
{
    int q = 0;
    NineSets sets;
    /// worst[i][j] = largest number of non-neighbours a vertex of sets[i][j]
    /// has inside one pattern-adjacent block.
    std::array<std::array<int, 3>, num_classes> worst{};
};

/// Throws WrongDivisibility unless N = (6q + 3) h, MalformedAssignment if two
/// sets of one class overlap.
auto check_very_extreme(const TripartiteGraph & g, int h, const NineSets & sets, const PatternGraph & pattern = PatternGraph::gamma3())
    -> std::variant<VeryExtremeWitness, Violation>;

auto nine_sets_from_assignment(const TripartiteGraph & g, const PatternAssignment & block_of) -> NineSets;

}

#endif
