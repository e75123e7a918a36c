#include <tiling/constructions.hh>
#include <tiling/random.hh>

#include <numeric>
#include <set>

namespace tiling {

PatternGraph::PatternGraph(std::string name, int parts, int blocks_per_part, std::vector<std::pair<BlockId, BlockId>> nonedges) :
    name_(std::move(name)),
    parts_(parts),
    blocks_(blocks_per_part),
    nonadjacent_(static_cast<std::size_t>(parts * blocks_per_part * parts * blocks_per_part), false)
{
    if (parts < 2 || parts > num_classes || blocks_per_part < 1)
        throw std::invalid_argument("pattern needs 2 or 3 parts and at least one block per part");

    auto index = [&](BlockId b) { return b.part * blocks_ + b.block; };
    for (auto [a, b] : nonedges) {
        for (auto x : {a, b})
            if (x.part < 0 || x.part >= parts_ || x.block < 0 || x.block >= blocks_)
                throw std::invalid_argument("pattern nonedge out of range");
        if (a.part == b.part)
            throw std::invalid_argument("pattern nonedges must join different parts");
        if (b < a)
            std::swap(a, b);
        const auto total = static_cast<std::size_t>(parts_ * blocks_);
        if (nonadjacent_[index(a) * total + index(b)])
            continue;
        nonadjacent_[index(a) * total + index(b)] = true;
        nonadjacent_[index(b) * total + index(a)] = true;
        nonedges_.emplace_back(a, b);
    }
    std::sort(nonedges_.begin(), nonedges_.end());
}

auto PatternGraph::gamma3() -> PatternGraph
{
    // Nonedges: same column between parts 1-2 and 2-3; between parts 1-3 the
    // column pairing is twisted by the transposition (2 3).
    constexpr int twist[3] = {0, 2, 1};
    std::vector<std::pair<BlockId, BlockId>> nonedges;
    for (int j = 0; j < 3; ++j) {
        nonedges.push_back({{0, j}, {1, j}});
        nonedges.push_back({{1, j}, {2, j}});
        nonedges.push_back({{0, j}, {2, twist[j]}});
    }
    return PatternGraph("gamma3", 3, 3, std::move(nonedges));
}

auto PatternGraph::theta(int parts, int blocks) -> PatternGraph
{
    std::vector<std::pair<BlockId, BlockId>> nonedges;
    for (int i = 0; i < parts; ++i)
        for (int i2 = i + 1; i2 < parts; ++i2)
            for (int j = 0; j < blocks; ++j)
                nonedges.push_back({{i, j}, {i2, j}});
    return PatternGraph("theta" + std::to_string(parts) + std::to_string(blocks), parts, blocks, std::move(nonedges));
}

auto PatternGraph::theta22_with_apex_part() -> PatternGraph
{
    std::vector<std::pair<BlockId, BlockId>> nonedges;
    for (int j = 0; j < 2; ++j)
        nonedges.push_back({{0, j}, {1, j}});
    return PatternGraph("theta22", 3, 2, std::move(nonedges));
}

auto PatternGraph::complete(int parts) -> PatternGraph
{
    return PatternGraph("complete", parts, 1, {});
}

auto PatternGraph::adjacent(BlockId a, BlockId b) const -> bool
{
    if (a.part == b.part)
        return false;
    const auto total = static_cast<std::size_t>(parts_ * blocks_);
    return ! nonadjacent_[static_cast<std::size_t>(a.part * blocks_ + a.block) * total + static_cast<std::size_t>(b.part * blocks_ + b.block)];
}

auto uniform_block_sizes(const PatternGraph & pattern, int block_size) -> BlockSizes
{
    return BlockSizes(static_cast<std::size_t>(pattern.parts()), std::vector<int>(static_cast<std::size_t>(pattern.blocks_per_part()), block_size));
}

auto blowup(const PatternGraph & pattern, const BlockSizes & block_sizes) -> Blowup
{
    if (pattern.parts() != num_classes)
        throw std::invalid_argument("blowup needs a three-part pattern");
    if (block_sizes.size() != num_classes)
        throw std::invalid_argument("blowup needs block sizes for every part");

    int n = -1;
    for (int c = 0; c < num_classes; ++c) {
        if (static_cast<int>(block_sizes[c].size()) != pattern.blocks_per_part())
            throw std::invalid_argument("blowup: wrong number of blocks in part " + std::to_string(c + 1));
        int total = 0;
        for (int s : block_sizes[c]) {
            if (s < 1)
                throw std::invalid_argument("blowup: block sizes must be positive");
            total += s;
        }
        if (n >= 0 && total != n)
            throw UnbalancedParts("blowup: part sizes differ (" + std::to_string(n) + " vs " + std::to_string(total) + ")");
        n = total;
    }

    Blowup result;
    for (int c = 0; c < num_classes; ++c)
        for (int b = 0; b < pattern.blocks_per_part(); ++b)
            result.block_of[c].insert(result.block_of[c].end(), static_cast<std::size_t>(block_sizes[c][b]), b);

    GraphBuilder builder(n);
    for (int i = 0; i < num_classes; ++i)
        for (int j = i + 1; j < num_classes; ++j)
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v)
                    if (pattern.adjacent({i, result.block_of[i][u]}, {j, result.block_of[j][v]}))
                        builder.add_edge({i, u}, {j, v});
    result.graph = std::move(builder).build();
    return result;
}

auto noisy_blowup(const PatternGraph & pattern, const BlockSizes & block_sizes, double p, std::uint64_t seed) -> Blowup
{
    auto result = blowup(pattern, block_sizes);
    Rng rng(seed);
    auto builder = result.graph.to_builder();
    const int n = result.graph.n();
    for (int i = 0; i < num_classes; ++i)
        for (int j = i + 1; j < num_classes; ++j)
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v)
                    if (! pattern.adjacent({i, result.block_of[i][u]}, {j, result.block_of[j][v]}) && bernoulli(rng, p))
                        builder.add_edge({i, u}, {j, v});
    result.graph = std::move(builder).build();
    return result;
}

auto check_sidon_pair(const SidonPair & pair, int d, std::string * why) -> bool
{
    auto fail = [&](const std::string & reason) {
        if (why)
            *why = reason;
        return false;
    };

    const int n = pair.modulus;
    if (n < 1)
        return fail("modulus must be positive");
    if (static_cast<int>(pair.s_set.size()) != d || static_cast<int>(pair.t_set.size()) != d)
        return fail("set sizes differ from d");

    auto is_sidon = [&](const std::vector<int> & set, const char * name) {
        std::vector<bool> seen_member(static_cast<std::size_t>(n), false);
        for (int x : set) {
            if (x < 0 || x >= n)
                return fail(std::string(name) + " has an element outside Z_n");
            if (seen_member[x])
                return fail(std::string(name) + " repeats an element");
            seen_member[x] = true;
        }
        std::vector<bool> seen_diff(static_cast<std::size_t>(n), false);
        for (int a : set)
            for (int b : set)
                if (a != b) {
                    int diff = ((a - b) % n + n) % n;
                    if (seen_diff[diff])
                        return fail(std::string(name) + " is not Sidon: difference " + std::to_string(diff) + " repeats");
                    seen_diff[diff] = true;
                }
        return true;
    };

    if (! is_sidon(pair.s_set, "S") || ! is_sidon(pair.t_set, "T"))
        return false;

    std::set<int> t(pair.t_set.begin(), pair.t_set.end());
    for (int a : pair.s_set)
        for (int b : pair.s_set)
            if (t.count((a + b) % n))
                return fail("S + S meets T at " + std::to_string((a + b) % n));
    return true;
}

namespace
{
    class SidonSearch
    {
    public:
        SidonSearch(int n, int d, Rng & rng, int insertion_budget) :
            n_(n), d_(d), budget_(insertion_budget),
            perm_s_(static_cast<std::size_t>(n)), perm_t_(static_cast<std::size_t>(n)),
            diff_s_(static_cast<std::size_t>(n), false), diff_t_(static_cast<std::size_t>(n), false),
            sums_(static_cast<std::size_t>(n), 0)
        {
            std::iota(perm_s_.begin(), perm_s_.end(), 0);
            std::iota(perm_t_.begin(), perm_t_.end(), 0);
            std::shuffle(perm_s_.begin(), perm_s_.end(), rng);
            std::shuffle(perm_t_.begin(), perm_t_.end(), rng);
        }

        auto run() -> bool { return fill_s(0); }

        std::vector<int> s, t;

    private:
        auto mod(int x) const -> int { return ((x % n_) + n_) % n_; }

        // Ordered differences created by adding x to set; false if any collides
        // with a used difference or with another new one.
        auto new_differences(const std::vector<int> & set, const std::vector<bool> & used, int x, std::vector<int> & out) const -> bool
        {
            out.clear();
            for (int y : set) {
                for (int diff : {mod(x - y), mod(y - x)}) {
                    if (used[diff] || std::find(out.begin(), out.end(), diff) != out.end())
                        return false;
                    out.push_back(diff);
                }
            }
            return true;
        }

        auto fill_s(std::size_t start) -> bool
        {
            if (static_cast<int>(s.size()) == d_)
                return fill_t(0);
            std::vector<int> diffs;
            for (std::size_t i = start; i + (d_ - s.size()) <= perm_s_.size(); ++i) {
                int x = perm_s_[i];
                if (! new_differences(s, diff_s_, x, diffs))
                    continue;
                if (++insertions_ > budget_)
                    return false;
                for (int diff : diffs)
                    diff_s_[diff] = true;
                s.push_back(x);
                for (int y : s)
                    sums_[mod(x + y)] += 1;
                if (fill_s(i + 1))
                    return true;
                for (int y : s)
                    sums_[mod(x + y)] -= 1;
                s.pop_back();
                for (int diff : diffs)
                    diff_s_[diff] = false;
                if (insertions_ > budget_)
                    return false;
            }
            return false;
        }

        auto fill_t(std::size_t start) -> bool
        {
            if (static_cast<int>(t.size()) == d_)
                return true;
            std::vector<int> diffs;
            for (std::size_t i = start; i + (d_ - t.size()) <= perm_t_.size(); ++i) {
                int x = perm_t_[i];
                if (sums_[x] > 0 || ! new_differences(t, diff_t_, x, diffs))
                    continue;
                if (++insertions_ > budget_)
                    return false;
                for (int diff : diffs)
                    diff_t_[diff] = true;
                t.push_back(x);
                if (fill_t(i + 1))
                    return true;
                t.pop_back();
                for (int diff : diffs)
                    diff_t_[diff] = false;
                if (insertions_ > budget_)
                    return false;
            }
            return false;
        }

        int n_, d_, budget_;
        long insertions_ = 0;
        std::vector<int> perm_s_, perm_t_;
        std::vector<bool> diff_s_, diff_t_;
        std::vector<int> sums_;
    };
}

auto find_sidon_pair(int n, int d, std::uint64_t seed, SidonSearchBudget budget) -> SidonPair
{
    if (n < 1 || d < 0)
        throw std::invalid_argument("find_sidon_pair needs n >= 1 and d >= 0");

    SidonPair result{n, {}, {}};
    if (d == 0)
        return result;

    auto infeasible = [&](const std::string & why) {
        return Infeasible(n, d, "no Sidon pair for Q(" + std::to_string(n) + ", " + std::to_string(d) + "): " + why);
    };

    if (d > n || static_cast<long>(d) * (d - 1) > n - 1)
        throw infeasible("a Sidon " + std::to_string(d) + "-set needs d(d-1) <= n-1 distinct nonzero differences");

    Rng rng(seed);
    for (int attempt = 0; attempt < budget.restarts; ++attempt) {
        SidonSearch search(n, d, rng, budget.insertions_per_restart);
        if (search.run()) {
            result.s_set = std::move(search.s);
            result.t_set = std::move(search.t);
            std::sort(result.s_set.begin(), result.s_set.end());
            std::sort(result.t_set.begin(), result.t_set.end());
            return result;
        }
    }
    throw infeasible("search budget of " + std::to_string(budget.restarts) + " restarts exhausted");
}

auto q_graph_from_pair(const SidonPair & pair) -> TripartiteGraph
{
    const int n = pair.modulus;
    GraphBuilder builder(n);
    for (int u = 0; u < n; ++u) {
        for (int s : pair.s_set) {
            builder.add_edge({0, u}, {1, (u + s) % n});
            builder.add_edge({1, u}, {2, (u + s) % n});
        }
        for (int t : pair.t_set)
            builder.add_edge({0, u}, {2, (u + t) % n});
    }
    return std::move(builder).build();
}

auto q_graph(int n, int d, std::uint64_t seed, SidonSearchBudget budget) -> QGraph
{
    auto pair = find_sidon_pair(n, d, seed, budget);
    auto graph = q_graph_from_pair(pair);
    return QGraph{std::move(graph), std::move(pair)};
}

void G3Params::validate() const
{
    if (h < 3)
        throw std::invalid_argument("G3 needs h >= 3");
    if (q < 1)
        throw std::invalid_argument("G3 needs q >= 1");
    if (r != 1 && r != 2)
        throw std::invalid_argument("G3 needs r in {1, 2}");
}

auto g3_construction(const G3Params & params, std::uint64_t seed, SidonSearchBudget budget) -> G3Instance
{
    params.validate();
    const auto sizes = params.column_sizes();
    const auto degrees = params.column_degrees();
    const int n = params.n();

    G3Instance result;
    result.params = params;
    std::array<int, 3> start{0, sizes[0], sizes[0] + sizes[1]};
    for (int c = 0; c < num_classes; ++c)
        for (int col = 0; col < 3; ++col)
            result.column_of[c].insert(result.column_of[c].end(), static_cast<std::size_t>(sizes[col]), col);

    GraphBuilder builder(n);
    for (int col = 0; col < 3; ++col) {
        if (col == 0 && params.r * params.h + params.h - 4 < 0)
            continue;
        QGraph q;
        try {
            q = q_graph(sizes[col], degrees[col], derive_seed(seed, static_cast<std::uint64_t>(col)), budget);
        }
        catch (Infeasible & e) {
            e.column = col + 1;
            throw;
        }
        for (const auto & [a, b] : q.graph.edges())
            builder.add_edge({a.cls, a.offset + start[col]}, {b.cls, b.offset + start[col]});
    }

    for (int i = 0; i < num_classes; ++i)
        for (int j = i + 1; j < num_classes; ++j)
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v)
                    if (result.column_of[i][u] != result.column_of[j][v])
                        builder.add_edge({i, u}, {j, v});

    result.graph = std::move(builder).build();
    if (bar_min_degree(result.graph) != params.expected_bar_min_degree())
        throw std::logic_error("G3 self-check failed: bar min degree " + std::to_string(bar_min_degree(result.graph)) +
            " != " + std::to_string(params.expected_bar_min_degree()));
    return result;
}

auto random_graph_with_min_degree(int n, int target, std::uint64_t seed) -> TripartiteGraph
{
    if (n < 1)
        throw std::invalid_argument("random graph needs N >= 1");
    target = std::clamp(target, 0, n);
    Rng rng(seed);

    GraphBuilder builder(n);
    // degree[i][j][u] = |N((i,u)) ∩ V^(j)|
    std::array<std::array<std::vector<int>, num_classes>, num_classes> degree;
    for (int i = 0; i < num_classes; ++i)
        for (int j = 0; j < num_classes; ++j)
            degree[i][j].assign(static_cast<std::size_t>(n), 0);

    auto add = [&](VertexRef a, VertexRef b) {
        if (builder.has_edge(a, b))
            return;
        builder.add_edge(a, b);
        ++degree[a.cls][b.cls][a.offset];
        ++degree[b.cls][a.cls][b.offset];
    };

    const double base = static_cast<double>(target) / n;
    const double p = base + (1.0 - base) * std::uniform_real_distribution<double>(0.0, 0.5)(rng);
    for (int i = 0; i < num_classes; ++i)
        for (int j = i + 1; j < num_classes; ++j)
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v)
                    if (bernoulli(rng, p))
                        add({i, u}, {j, v});

    std::vector<VertexRef> order;
    for (int c = 0; c < num_classes; ++c)
        for (int u = 0; u < n; ++u)
            order.push_back({c, u});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> candidates;
    for (auto v : order)
        for (int j = 0; j < num_classes; ++j) {
            if (j == v.cls || degree[v.cls][j][v.offset] >= target)
                continue;
            candidates.clear();
            for (int w = 0; w < n; ++w)
                if (! builder.has_edge(v, {j, w}))
                    candidates.push_back(w);
            std::shuffle(candidates.begin(), candidates.end(), rng);
            for (int w : candidates) {
                if (degree[v.cls][j][v.offset] >= target)
                    break;
                add(v, {j, w});
            }
        }

    auto at_target = [&] {
        for (int i = 0; i < num_classes; ++i)
            for (int j = 0; j < num_classes; ++j)
                if (i != j)
                    for (int u = 0; u < n; ++u)
                        if (degree[i][j][u] == target)
                            return true;
        return false;
    };

    if (! at_target()) {
        auto edges = builder.build().edges();
        std::shuffle(edges.begin(), edges.end(), rng);
        for (const auto & [a, b] : edges) {
            if (degree[a.cls][b.cls][a.offset] > target && degree[b.cls][a.cls][b.offset] > target) {
                builder.remove_edge(a, b);
                --degree[a.cls][b.cls][a.offset];
                --degree[b.cls][a.cls][b.offset];
                if (degree[a.cls][b.cls][a.offset] == target || degree[b.cls][a.cls][b.offset] == target)
                    break;
            }
        }
    }

    return std::move(builder).build();
}

auto planted_factor_graph(int n, int h, double extra_edge_prob, std::uint64_t seed) -> PlantedFactor
{
    if (h < 1 || n < 1 || n % h != 0)
        throw std::invalid_argument("planted factor needs h | N");
    Rng rng(seed);

    std::array<std::vector<int>, num_classes> perm;
    for (auto & p : perm) {
        p.resize(static_cast<std::size_t>(n));
        std::iota(p.begin(), p.end(), 0);
        std::shuffle(p.begin(), p.end(), rng);
    }

    PlantedFactor result;
    std::array<std::vector<int>, num_classes> copy_of;
    for (auto & c : copy_of)
        c.assign(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < n / h; ++k) {
        KhhhCopy copy;
        for (int c = 0; c < num_classes; ++c) {
            copy.parts[c].assign(perm[c].begin() + k * h, perm[c].begin() + (k + 1) * h);
            for (int u : copy.parts[c])
                copy_of[c][u] = k;
        }
        result.factor.copies.push_back(std::move(copy));
    }

    GraphBuilder builder(n);
    for (int i = 0; i < num_classes; ++i)
        for (int j = i + 1; j < num_classes; ++j)
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v)
                    if (copy_of[i][u] == copy_of[j][v] || bernoulli(rng, extra_edge_prob))
                        builder.add_edge({i, u}, {j, v});

    result.graph = std::move(builder).build();
    canonicalize(result.factor);
    return result;
}

}
