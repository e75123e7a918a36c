#include <tiling/report.hh>
#include <tiling/run_config.hh>

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace tiling {

namespace
{
    auto trim(const std::string & s) -> std::string
    {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos)
            return "";
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    template <typename T>
    auto parse_integer(const std::string & key, const std::string & value) -> T
    {
        T out{};
        const char * end = value.data() + value.size();
        auto [p, ec] = std::from_chars(value.data(), end, out);
        if (ec != std::errc() || p != end)
            throw ConfigError("config key " + key + ": not an integer: \"" + value + "\"");
        return out;
    }

    auto parse_tolerance(const std::string & key, const std::string & value) -> Rational
    {
        try {
            return parse_rational(value);
        } catch (const std::invalid_argument &) {
            throw ConfigError("config key " + key + ": not a rational: \"" + value + "\"");
        }
    }
}

auto RunConfig::keys() -> const std::vector<std::string> &
{
    static const std::vector<std::string> k{"delta", "effort", "epsilon", "gamma", "local_node_budget", "node_budget", "restarts",
        "seed", "swap_evaluations", "tiny_bound", "typical"};
    return k;
}

void RunConfig::set(const std::string & key, const std::string & value)
{
    if (key == "seed")
        seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "gamma")
        gamma = parse_tolerance(key, value);
    else if (key == "delta")
        delta = parse_tolerance(key, value);
    else if (key == "epsilon")
        epsilon = parse_tolerance(key, value);
    else if (key == "typical")
        typical = parse_tolerance(key, value);
    else if (key == "node_budget")
        node_budget = parse_integer<std::uint64_t>(key, value);
    else if (key == "local_node_budget")
        local_node_budget = parse_integer<std::uint64_t>(key, value);
    else if (key == "swap_evaluations")
        swap_evaluations = parse_integer<std::uint64_t>(key, value);
    else if (key == "effort")
        effort = parse_integer<int>(key, value);
    else if (key == "restarts")
        restarts = parse_integer<int>(key, value);
    else if (key == "tiny_bound")
        tiny_bound = parse_integer<int>(key, value);
    else
        throw ConfigError("unknown config key \"" + key + "\"");
}

void RunConfig::validate() const
{
    for (auto [name, r] : {std::pair{"gamma", gamma}, {"delta", delta}, {"epsilon", epsilon}, {"typical", typical}})
        if (r <= Rational(0) || r >= Rational(1))
            throw ConfigError(std::string(name) + " must lie strictly between 0 and 1");
    if (node_budget == 0 || local_node_budget == 0 || swap_evaluations == 0)
        throw ConfigError("budgets must be positive");
    if (effort < 1 || restarts < 1 || tiny_bound < 1)
        throw ConfigError("effort, restarts and tiny_bound must be positive");
}

auto RunConfig::canonical_text() const -> std::string
{
    std::ostringstream out;
    out << "delta=" << rational_to_string(delta) << "\n"
        << "effort=" << effort << "\n"
        << "epsilon=" << rational_to_string(epsilon) << "\n"
        << "gamma=" << rational_to_string(gamma) << "\n"
        << "local_node_budget=" << local_node_budget << "\n"
        << "node_budget=" << node_budget << "\n"
        << "restarts=" << restarts << "\n"
        << "seed=" << seed << "\n"
        << "swap_evaluations=" << swap_evaluations << "\n"
        << "tiny_bound=" << tiny_bound << "\n"
        << "typical=" << rational_to_string(typical) << "\n";
    return out.str();
}

auto RunConfig::hash() const -> std::string
{
    return sha256_hex(canonical_text());
}

auto RunConfig::solve_config(unsigned threads) const -> SolveConfig
{
    SolveConfig c;
    c.seed = seed;
    c.gamma = gamma;
    c.delta = delta;
    c.epsilon = epsilon;
    c.typical = typical;
    c.node_budget = node_budget;
    c.local_node_budget = local_node_budget;
    c.swap_evaluations = swap_evaluations;
    c.effort = effort;
    c.retries = restarts;
    c.threads = std::max(1u, threads);
    return c;
}

auto parse_config(const std::string & text) -> RunConfig
{
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return c;
}

auto read_config_file(const std::string & path) -> RunConfig
{
    std::ifstream in(path);
    if (! in)
        throw ConfigError("cannot read config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

auto sha256_hex(const std::string & bytes) -> std::string
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    static const char * hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

auto file_sha256(const std::string & path) -> std::string
{
    std::ifstream in(path, std::ios::binary);
    if (! in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    return sha256_hex(bytes.str());
}

}
