#ifndef TILING_RUN_CONFIG_HH
#define TILING_RUN_CONFIG_HH

#include <tiling/graph.hh>
#include <tiling/tiler.hh>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tiling {

class ConfigError : public std::invalid_argument
{
public:
    explicit ConfigError(const std::string & what) : std::invalid_argument(what) {}
};

/// Settings shared by every subcommand. The file form is one `key = value`
/// per line with '#' comments; see keys() for the accepted names.
struct RunConfig
{
    std::uint64_t seed = 0;
    Rational gamma{1, 20};
    Rational delta{1, 10};
    Rational epsilon{1, 20};
    Rational typical{1, 10};
    std::uint64_t node_budget = 100'000'000;
    std::uint64_t local_node_budget = 1'000'000;
    std::uint64_t swap_evaluations = 2000;
    int effort = 8;
    int restarts = 32;
    /// Graphs with at most this many vertices get brute-force cross-checks.
    int tiny_bound = 18;

    /// Sets one key; throws ConfigError for unknown keys or bad values.
    void set(const std::string & key, const std::string & value);
    /// Throws ConfigError unless tolerances lie in (0, 1) and budgets are positive.
    void validate() const;

    /// Sorted `key=value` lines; the config hash is taken over this text.
    auto canonical_text() const -> std::string;
    auto hash() const -> std::string;

    auto solve_config(unsigned threads) const -> SolveConfig;

    static auto keys() -> const std::vector<std::string> &;
};

auto parse_config(const std::string & text) -> RunConfig;
auto read_config_file(const std::string & path) -> RunConfig;

/// Lowercase hex SHA-256.
auto sha256_hex(const std::string & bytes) -> std::string;
auto file_sha256(const std::string & path) -> std::string;

}

#endif
