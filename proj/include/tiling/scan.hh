#ifndef TILING_SCAN_HH
#define TILING_SCAN_HH

#include <tiling/report.hh>
#include <tiling/run_config.hh>

#include <optional>
#include <string>
#include <vector>

namespace tiling {

struct ScanOptions
{
    int h = 1;
    int n = 3;
    std::vector<int> levels;
    int samples = 100;
    RunConfig config;
    unsigned workers = 1;
    /// Where failure exemplars are written; none are written when empty.
    std::string exemplar_dir;
    /// Cross-check every small sample against the brute-force oracle.
    bool exhaustive = false;
    /// Exemplars kept per level besides theorem contradictions, which are always kept.
    int max_exemplars = 4;
};

struct ScanExemplar
{
    int sample = 0;
    std::uint64_t seed = 0;
    int bar_min_degree = 0;
    /// No factor although the level reaches h ceil(2N / 3h) + 2h - 1.
    bool theorem_contradiction = false;
    /// Every edge lies on an edge of a blow-up of the 3x3 obstruction with
    /// blocks of size N/3, i.e. the graph is a spanning subgraph of one.
    bool within_gamma3 = false;
    NoFactorCertificate certificate;
    TripartiteGraph graph;
    std::string path;
};

struct ScanLevel
{
    int level = 0;
    /// The level actually generated: min(level, N).
    int effective_level = 0;
    int samples = 0;
    int factor = 0;
    int no_factor = 0;
    int structure_only = 0;
    int unknown = 0;
    int oracle_checked = 0;
    std::vector<ScanExemplar> exemplars;
};

struct ScanReport
{
    int h = 0;
    int n = 0;
    int upper_level = 0;
    int theorem_contradictions = 0;
    std::vector<ScanLevel> levels;
};

/// Samples random graphs with exactly the requested bar-minimum degree and
/// tabulates solver outcomes per level. Sample k of level L uses the sub-seed
/// derive_seed(derive_seed(seed, L), k), so results do not depend on the
/// worker count. Throws IndivisibleN unless h divides N.
auto run_scan(const ScanOptions & options) -> ScanReport;

auto to_json(const ScanReport & r) -> Json;

}

#endif
