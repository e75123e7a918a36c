#include <tiling/random.hh>
#include <tiling/structure.hh>

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>

namespace tiling {

namespace
{
    auto block_name(BlockId b) -> std::string
    {
        return "(" + std::to_string(b.part + 1) + "," + std::to_string(b.block + 1) + ")";
    }

    auto rational_text(Rational r) -> std::string
    {
        return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
    }

    // All m-subsets of [0, n) as bitmaps, lexicographic.
    auto all_subsets(int n, int m) -> std::vector<Bits>
    {
        std::vector<Bits> out;
        std::vector<int> pick(static_cast<std::size_t>(m));
        std::iota(pick.begin(), pick.end(), 0);
        if (m > n)
            return out;
        while (true) {
            Bits b(static_cast<std::size_t>(n));
            for (int x : pick)
                b.set(static_cast<std::size_t>(x));
            out.push_back(b);
            int i = m - 1;
            while (i >= 0 && pick[i] == n - m + i)
                --i;
            if (i < 0)
                break;
            ++pick[i];
            for (int k = i + 1; k < m; ++k)
                pick[k] = pick[k - 1] + 1;
        }
        return out;
    }

    auto pair_edges(const TripartiteGraph & g, int i, const Bits & a, int j, const Bits & b) -> std::int64_t
    {
        std::int64_t e = 0;
        for (auto u = a.find_first(); u != Bits::npos; u = a.find_next(u))
            e += static_cast<std::int64_t>((g.row({i, static_cast<int>(u)}, j) & b).count());
        return e;
    }

    constexpr std::array<std::pair<int, int>, 3> class_pairs{{{0, 1}, {0, 2}, {1, 2}}};

    auto extreme_witness_if_sparse(const TripartiteGraph & g, const std::array<Bits, num_classes> & sets, int m, Rational gamma)
        -> std::optional<ExtremeWitness>
    {
        ExtremeWitness w;
        for (int k = 0; k < 3; ++k) {
            auto [i, j] = class_pairs[k];
            w.densities[k] = Rational(pair_edges(g, i, sets[i], j, sets[j]), static_cast<std::int64_t>(m) * m);
            if (w.densities[k] > gamma)
                return std::nullopt;
        }
        for (int c = 0; c < num_classes; ++c)
            w.sets[c] = VertexSet(c, sets[c]);
        return w;
    }

    // Local search for the extreme case from one starting triple.
    class ExtremeRefiner
    {
    public:
        ExtremeRefiner(const TripartiteGraph & g, int m) : g_(g), n_(g.n()), m_(m) {}

        auto start(Rng * rng) -> std::array<Bits, num_classes>
        {
            std::array<Bits, num_classes> sets;
            for (auto & s : sets)
                s = Bits(static_cast<std::size_t>(n_));

            std::vector<int> order(static_cast<std::size_t>(n_));
            std::iota(order.begin(), order.end(), 0);
            if (rng) {
                std::shuffle(order.begin(), order.end(), *rng);
                for (int k = 0; k < m_; ++k)
                    sets[0].set(static_cast<std::size_t>(order[k]));
            }
            else {
                auto key = [&](int u) { return g_.cross_degree({0, u}, 1) + g_.cross_degree({0, u}, 2); };
                std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
                for (int k = 0; k < m_; ++k)
                    sets[0].set(static_cast<std::size_t>(order[k]));
            }

            for (int c = 1; c < num_classes; ++c) {
                std::iota(order.begin(), order.end(), 0);
                if (rng)
                    std::shuffle(order.begin(), order.end(), *rng);
                std::vector<int> key(static_cast<std::size_t>(n_));
                for (int u = 0; u < n_; ++u)
                    for (int prev = 0; prev < c; ++prev)
                        key[u] += static_cast<int>((g_.row({c, u}, prev) & sets[prev]).count());
                std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });
                for (int k = 0; k < m_; ++k)
                    sets[c].set(static_cast<std::size_t>(order[k]));
            }
            return sets;
        }

        // Best-improvement swaps, one class at a time, lowest offsets on ties.
        void refine(std::array<Bits, num_classes> & sets)
        {
            const long cap = static_cast<long>(n_) * n_;
            for (long step = 0; step < cap; ++step) {
                int best_gain = 0, best_class = -1, best_out = -1, best_in = -1;
                for (int c = 0; c < num_classes; ++c) {
                    int in_vertex = -1, in_score = -1, out_vertex = -1, out_score = std::numeric_limits<int>::max();
                    for (int u = 0; u < n_; ++u) {
                        int score = 0;
                        for (int j = 0; j < num_classes; ++j)
                            if (j != c)
                                score += static_cast<int>((g_.row({c, u}, j) & sets[j]).count());
                        if (sets[c].test(static_cast<std::size_t>(u))) {
                            if (score > in_score)
                                in_score = score, in_vertex = u;
                        }
                        else if (score < out_score)
                            out_score = score, out_vertex = u;
                    }
                    if (in_vertex >= 0 && out_vertex >= 0 && in_score - out_score > best_gain) {
                        best_gain = in_score - out_score;
                        best_class = c;
                        best_out = in_vertex;
                        best_in = out_vertex;
                    }
                }
                if (best_class < 0)
                    return;
                sets[best_class].reset(static_cast<std::size_t>(best_out));
                sets[best_class].set(static_cast<std::size_t>(best_in));
            }
        }

    private:
        const TripartiteGraph & g_;
        int n_, m_;
    };
}

auto detect_extreme(const TripartiteGraph & g, Rational gamma, std::uint64_t seed, const DetectOptions & options)
    -> std::variant<ExtremeWitness, NotFound>
{
    if (gamma < Rational(0) || gamma >= Rational(1))
        throw std::invalid_argument("gamma must lie in [0, 1)");
    const int m = g.n() / 3;
    if (m == 0)
        return NotFound{"floor(N/3) is zero", true};

    if (m <= options.exhaustive_set_size) {
        auto subsets = all_subsets(g.n(), m);
        const std::int64_t limit = static_cast<std::int64_t>(m) * m;
        for (const auto & a : subsets)
            for (const auto & b : subsets) {
                if (Rational(pair_edges(g, 0, a, 1, b), limit) > gamma)
                    continue;
                for (const auto & c : subsets)
                    if (auto w = extreme_witness_if_sparse(g, {a, b, c}, m, gamma))
                        return *w;
            }
        return NotFound{"no triple of floor(N/3)-sets is sparse enough", true};
    }

    ExtremeRefiner refiner(g, m);
    for (int r = 0; r < std::max(options.restarts, 1); ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        auto sets = refiner.start(r == 0 ? nullptr : &rng);
        refiner.refine(sets);
        if (auto w = extreme_witness_if_sparse(g, sets, m, gamma))
            return *w;
    }
    return NotFound{"local search found no sparse triple", false};
}

auto check_extreme(const TripartiteGraph & g, const ExtremeWitness & w, Rational gamma) -> bool
{
    const int m = g.n() / 3;
    for (int c = 0; c < num_classes; ++c)
        if (w.sets[c].cls() != c || w.sets[c].universe() != g.n() || w.sets[c].size() != m)
            return false;
    if (m == 0)
        return false;
    for (int k = 0; k < 3; ++k) {
        auto [i, j] = class_pairs[k];
        auto d = density(w.sets[i], w.sets[j], g);
        if (d != w.densities[k] || d > gamma)
            return false;
    }
    return true;
}

auto whole_classes(const TripartiteGraph & g, int parts) -> PatternParts
{
    PatternParts out;
    for (int p = 0; p < parts; ++p)
        out.push_back(VertexSet::full(p, g.n()));
    return out;
}

auto assignment_from_blocks(const BlockAssignment & blocks, int parts) -> PatternAssignment
{
    PatternAssignment out;
    for (int p = 0; p < parts; ++p)
        out.push_back(blocks[p]);
    return out;
}

namespace
{
    void validate_parts(const TripartiteGraph & g, const PatternGraph & pattern, const PatternParts & parts)
    {
        if (static_cast<int>(parts.size()) != pattern.parts())
            throw MalformedAssignment("pattern has " + std::to_string(pattern.parts()) + " parts but " + std::to_string(parts.size()) +
                " vertex sets were given");
        for (std::size_t p = 0; p < parts.size(); ++p) {
            if (parts[p].universe() != g.n())
                throw MalformedAssignment("part " + std::to_string(p + 1) + " has the wrong universe");
            if (parts[p].size() != parts[0].size())
                throw MalformedAssignment("pattern parts differ in size");
            for (std::size_t q = 0; q < p; ++q)
                if (parts[p].cls() == parts[q].cls())
                    throw MalformedAssignment("two pattern parts lie in one class");
        }
        if (parts[0].size() < pattern.blocks_per_part())
            throw MalformedAssignment("parts are smaller than the number of blocks");
    }

    auto block_members(const PatternParts & parts, const PatternAssignment & block_of, int p, int b) -> Bits
    {
        Bits out(static_cast<std::size_t>(parts[p].universe()));
        for (int u : parts[p].offsets())
            if (block_of[p][u] == b)
                out.set(static_cast<std::size_t>(u));
        return out;
    }
}

auto check_approx(const TripartiteGraph & g, const PatternGraph & pattern, const PatternParts & parts,
    const PatternAssignment & block_of, Rational delta) -> std::variant<ApproxWitness, Violation>
{
    validate_parts(g, pattern, parts);
    const int k = pattern.blocks_per_part();
    const int m = parts[0].size() / k;

    if (static_cast<int>(block_of.size()) != pattern.parts())
        throw MalformedAssignment("assignment has the wrong number of parts");
    for (int p = 0; p < pattern.parts(); ++p) {
        if (static_cast<int>(block_of[p].size()) != g.n())
            throw MalformedAssignment("assignment of part " + std::to_string(p + 1) + " has the wrong length");
        std::vector<int> size(static_cast<std::size_t>(k), 0);
        for (int u = 0; u < g.n(); ++u) {
            const int b = block_of[p][u];
            if (! parts[p].contains(u)) {
                if (b != -1)
                    throw MalformedAssignment("vertex outside part " + std::to_string(p + 1) + " carries a block label");
                continue;
            }
            if (b < 0 || b >= k)
                throw MalformedAssignment("block label out of range in part " + std::to_string(p + 1));
            ++size[b];
        }
        for (int b = 0; b < k; ++b)
            if (size[b] != m && size[b] != m + 1)
                throw MalformedAssignment("block " + block_name({p, b}) + " has size " + std::to_string(size[b]) + ", expected " +
                    std::to_string(m) + " or " + std::to_string(m + 1));
    }

    ApproxWitness w;
    w.pattern = pattern.name();
    w.m = m;
    w.parts = parts;
    w.block_of = block_of;
    for (auto [a, b] : pattern.nonedges()) {
        VertexSet x(parts[a.part].cls(), block_members(parts, block_of, a.part, a.block));
        VertexSet y(parts[b.part].cls(), block_members(parts, block_of, b.part, b.block));
        auto d = density(x, y, g);
        if (d >= delta)
            return Violation{"nonedge " + block_name(a) + "-" + block_name(b) + " has density " + rational_text(d) + " >= " + rational_text(delta)};
        w.densities.push_back({a, b, d});
    }
    return w;
}

auto check_approx(const TripartiteGraph & g, const PatternGraph & pattern, const PatternAssignment & block_of, Rational delta)
    -> std::variant<ApproxWitness, Violation>
{
    return check_approx(g, pattern, whole_classes(g, pattern.parts()), block_of, delta);
}

namespace
{
    // Swap/move refinement over member indices of each part. cost_[p][x][b] is
    // the number of neighbours of member x that would sit on a pattern nonedge
    // if x were in block b.
    class PatternFitter
    {
    public:
        PatternFitter(const TripartiteGraph & g, const PatternGraph & pattern, const PatternParts & parts) :
            g_(g), pattern_(pattern), parts_(parts), np_(pattern.parts()), k_(pattern.blocks_per_part())
        {
            for (const auto & part : parts_)
                members_.push_back(part.offsets());
            s_ = static_cast<int>(members_[0].size());
            m_ = s_ / k_;
            extra_ = s_ % k_;

            neighbours_.resize(static_cast<std::size_t>(np_));
            for (int p = 0; p < np_; ++p) {
                neighbours_[p].resize(static_cast<std::size_t>(s_));
                for (int x = 0; x < s_; ++x)
                    for (int q = 0; q < np_; ++q) {
                        if (q == p)
                            continue;
                        for (int y = 0; y < s_; ++y)
                            if (g_.has_edge({parts_[p].cls(), members_[p][x]}, {parts_[q].cls(), members_[q][y]}))
                                neighbours_[p][x].push_back({q, y});
                    }
            }
            nonadjacent_.assign(static_cast<std::size_t>(np_ * k_ * np_ * k_), false);
            for (auto [a, b] : pattern_.nonedges()) {
                nonadjacent_[index(a.part, a.block, b.part, b.block)] = true;
                nonadjacent_[index(b.part, b.block, a.part, a.block)] = true;
            }
        }

        auto part_size() const -> int { return s_; }
        auto m() const -> int { return m_; }

        // Greedy neighbourhood clustering of every part, then the label
        // permutation per part with the least nonedge mass.
        auto initial(Rng * rng) -> std::vector<std::vector<int>>
        {
            std::vector<std::vector<int>> clusters(static_cast<std::size_t>(np_));
            for (int p = 0; p < np_; ++p)
                clusters[p] = cluster_part(p, rng);
            return align(clusters);
        }

        auto objective(const std::vector<std::vector<int>> & label) const -> std::int64_t
        {
            std::int64_t total = 0;
            for (int p = 0; p < np_; ++p)
                for (int x = 0; x < s_; ++x)
                    for (auto [q, y] : neighbours_[p][x])
                        if (q > p && nonadjacent_[index(p, label[p][x], q, label[q][y])])
                            ++total;
            return total;
        }

        void refine(std::vector<std::vector<int>> & label)
        {
            build_costs(label);
            std::vector<std::vector<int>> size(static_cast<std::size_t>(np_), std::vector<int>(static_cast<std::size_t>(k_), 0));
            for (int p = 0; p < np_; ++p)
                for (int x = 0; x < s_; ++x)
                    ++size[p][label[p][x]];

            const long cap = static_cast<long>(np_ * s_) * (np_ * s_);
            long steps = 0;
            bool improved = true;
            while (improved && steps < cap) {
                improved = false;
                for (int p = 0; p < np_ && steps < cap; ++p)
                    for (int x = 0; x < s_ && steps < cap; ++x) {
                        const int bx = label[p][x];
                        // Moves keep block sizes in {m, m + 1}.
                        for (int b = 0; b < k_; ++b)
                            if (b != bx && size[p][bx] == m_ + 1 && size[p][b] == m_ && cost_[p][x][b] < cost_[p][x][bx]) {
                                relabel(label, p, x, b);
                                --size[p][bx];
                                ++size[p][b];
                                ++steps;
                                improved = true;
                                break;
                            }
                        if (label[p][x] != bx)
                            continue;
                        for (int y = x + 1; y < s_; ++y) {
                            const int by = label[p][y];
                            if (by == bx)
                                continue;
                            const int delta = cost_[p][x][by] + cost_[p][y][bx] - cost_[p][x][bx] - cost_[p][y][by];
                            if (delta < 0) {
                                relabel(label, p, x, by);
                                relabel(label, p, y, bx);
                                ++steps;
                                improved = true;
                                break;
                            }
                        }
                    }
            }
        }

        auto to_assignment(const std::vector<std::vector<int>> & label) const -> PatternAssignment
        {
            PatternAssignment out(static_cast<std::size_t>(np_), std::vector<int>(static_cast<std::size_t>(g_.n()), -1));
            for (int p = 0; p < np_; ++p)
                for (int x = 0; x < s_; ++x)
                    out[p][members_[p][x]] = label[p][x];
            return out;
        }

        // Every labelling of one part with block sizes in {m, m + 1}.
        auto balanced_labellings() const -> std::vector<std::vector<int>>
        {
            std::vector<std::vector<int>> out;
            std::vector<int> label(static_cast<std::size_t>(s_), -1);
            std::vector<int> size(static_cast<std::size_t>(k_), 0);
            int big = 0;
            std::function<void(int)> rec = [&](int x) {
                if (x == s_) {
                    out.push_back(label);
                    return;
                }
                for (int b = 0; b < k_; ++b) {
                    const bool grows_big = size[b] == m_;
                    if (size[b] > m_ || (grows_big && big == extra_))
                        continue;
                    // Leave room for the blocks still below m.
                    label[x] = b;
                    ++size[b];
                    big += grows_big;
                    int short_of_m = 0;
                    for (int c = 0; c < k_; ++c)
                        short_of_m += std::max(0, m_ - size[c]);
                    if (short_of_m <= s_ - x - 1)
                        rec(x + 1);
                    big -= grows_big;
                    --size[b];
                }
            };
            rec(0);
            return out;
        }

    private:
        auto index(int p, int b, int q, int c) const -> std::size_t
        {
            return static_cast<std::size_t>(((p * k_ + b) * np_ + q) * k_ + c);
        }

        auto feature_distance(int p, int x, int y) const -> int
        {
            int d = 0;
            for (int q = 0; q < np_; ++q) {
                if (q == p)
                    continue;
                auto a = g_.row({parts_[p].cls(), members_[p][x]}, parts_[q].cls()) & parts_[q].bits();
                auto b = g_.row({parts_[p].cls(), members_[p][y]}, parts_[q].cls()) & parts_[q].bits();
                d += static_cast<int>((a ^ b).count());
            }
            return d;
        }

        auto cluster_part(int p, Rng * rng) -> std::vector<int>
        {
            std::vector<int> target(static_cast<std::size_t>(k_), m_);
            for (int b = 0; b < extra_; ++b)
                ++target[b];
            if (rng)
                std::shuffle(target.begin(), target.end(), *rng);

            std::vector<int> label(static_cast<std::size_t>(s_), -1);
            std::vector<int> order(static_cast<std::size_t>(s_));
            std::iota(order.begin(), order.end(), 0);
            if (rng)
                std::shuffle(order.begin(), order.end(), *rng);

            for (int b = 0; b < k_; ++b) {
                int seed_vertex = -1;
                for (int x : order)
                    if (label[x] < 0) {
                        seed_vertex = x;
                        break;
                    }
                std::vector<std::pair<int, int>> near;
                for (int y = 0; y < s_; ++y)
                    if (label[y] < 0)
                        near.push_back({y == seed_vertex ? -1 : feature_distance(p, seed_vertex, y), y});
                std::sort(near.begin(), near.end());
                for (int t = 0; t < target[b]; ++t)
                    label[near[t].second] = b;
            }
            return label;
        }

        auto align(const std::vector<std::vector<int>> & clusters) const -> std::vector<std::vector<int>>
        {
            // edges[p][c][q][d]: edges between cluster c of part p and cluster d of part q.
            std::vector<std::int64_t> edges(static_cast<std::size_t>(np_ * k_ * np_ * k_), 0);
            for (int p = 0; p < np_; ++p)
                for (int x = 0; x < s_; ++x)
                    for (auto [q, y] : neighbours_[p][x])
                        if (q > p)
                            ++edges[index(p, clusters[p][x], q, clusters[q][y])];

            std::vector<int> base(static_cast<std::size_t>(k_));
            std::iota(base.begin(), base.end(), 0);
            std::vector<std::vector<int>> perms;
            do
                perms.push_back(base);
            while (std::next_permutation(base.begin(), base.end()));

            std::vector<std::size_t> choice(static_cast<std::size_t>(np_), 0), best_choice = choice;
            std::int64_t best = std::numeric_limits<std::int64_t>::max();
            std::function<void(int)> rec = [&](int p) {
                if (p == np_) {
                    std::int64_t total = 0;
                    for (int a = 0; a < np_; ++a)
                        for (int b = a + 1; b < np_; ++b)
                            for (int c = 0; c < k_; ++c)
                                for (int d = 0; d < k_; ++d)
                                    if (nonadjacent_[index(a, perms[choice[a]][c], b, perms[choice[b]][d])])
                                        total += edges[index(a, c, b, d)];
                    if (total < best) {
                        best = total;
                        best_choice = choice;
                    }
                    return;
                }
                for (std::size_t t = 0; t < perms.size(); ++t) {
                    choice[p] = t;
                    rec(p + 1);
                }
            };
            rec(0);

            auto label = clusters;
            for (int p = 0; p < np_; ++p)
                for (int x = 0; x < s_; ++x)
                    label[p][x] = perms[best_choice[p]][clusters[p][x]];
            return label;
        }

        void build_costs(const std::vector<std::vector<int>> & label)
        {
            cost_.assign(static_cast<std::size_t>(np_),
                std::vector<std::vector<int>>(static_cast<std::size_t>(s_), std::vector<int>(static_cast<std::size_t>(k_), 0)));
            for (int p = 0; p < np_; ++p)
                for (int x = 0; x < s_; ++x)
                    for (auto [q, y] : neighbours_[p][x])
                        for (int b = 0; b < k_; ++b)
                            if (nonadjacent_[index(p, b, q, label[q][y])])
                                ++cost_[p][x][b];
        }

        void relabel(std::vector<std::vector<int>> & label, int p, int x, int b)
        {
            const int old = label[p][x];
            for (auto [q, y] : neighbours_[p][x])
                for (int c = 0; c < k_; ++c) {
                    if (nonadjacent_[index(q, c, p, old)])
                        --cost_[q][y][c];
                    if (nonadjacent_[index(q, c, p, b)])
                        ++cost_[q][y][c];
                }
            label[p][x] = b;
        }

        const TripartiteGraph & g_;
        const PatternGraph & pattern_;
        const PatternParts & parts_;
        int np_, k_, s_ = 0, m_ = 0, extra_ = 0;
        std::vector<std::vector<int>> members_;
        std::vector<std::vector<std::vector<std::pair<int, int>>>> neighbours_;
        std::vector<bool> nonadjacent_;
        std::vector<std::vector<std::vector<int>>> cost_;
    };

    auto balanced_count(int s, int k, std::uint64_t cap) -> std::uint64_t
    {
        // Number of labellings of s items into k blocks of sizes m or m + 1,
        // saturating at cap.
        const int m = s / k, extra = s % k;
        long double count = 1;
        for (int i = 1; i <= extra; ++i)
            count = count * (k - extra + i) / i;
        for (int i = 1; i <= s; ++i)
            count *= i;
        for (int b = 0; b < k; ++b)
            for (int i = 1; i <= m + (b < extra ? 1 : 0); ++i)
                count /= i;
        return count >= static_cast<long double>(cap) ? cap : static_cast<std::uint64_t>(count + 0.5L);
    }
}

auto fit_approx(const TripartiteGraph & g, const PatternGraph & pattern, const PatternParts & parts, Rational delta,
    std::uint64_t seed, const FitOptions & options) -> std::variant<ApproxWitness, NotFound>
{
    validate_parts(g, pattern, parts);
    PatternFitter fitter(g, pattern, parts);

    std::uint64_t total = 1;
    const auto per_part = balanced_count(fitter.part_size(), pattern.blocks_per_part(), options.exhaustive_limit + 1);
    for (int p = 0; p < pattern.parts() && total <= options.exhaustive_limit; ++p)
        total = per_part > (options.exhaustive_limit + 1) / total ? options.exhaustive_limit + 1 : total * per_part;

    std::optional<ApproxWitness> best;
    std::int64_t best_objective = std::numeric_limits<std::int64_t>::max();
    auto consider = [&](const std::vector<std::vector<int>> & label) {
        auto objective = fitter.objective(label);
        if (objective >= best_objective)
            return;
        auto r = check_approx(g, pattern, parts, fitter.to_assignment(label), delta);
        if (auto * w = std::get_if<ApproxWitness>(&r)) {
            best = std::move(*w);
            best_objective = objective;
        }
    };

    if (total <= options.exhaustive_limit) {
        auto labellings = fitter.balanced_labellings();
        std::vector<std::vector<int>> label(static_cast<std::size_t>(pattern.parts()));
        std::function<void(int)> rec = [&](int p) {
            if (p == pattern.parts()) {
                consider(label);
                return;
            }
            for (const auto & l : labellings) {
                label[p] = l;
                rec(p + 1);
            }
        };
        rec(0);
        if (best)
            return *best;
        return NotFound{"no balanced assignment keeps every nonedge below delta", true};
    }

    for (int r = 0; r < std::max(options.restarts, 1) && best_objective > 0; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        auto label = fitter.initial(r == 0 ? nullptr : &rng);
        fitter.refine(label);
        consider(label);
    }
    if (best)
        return *best;
    return NotFound{"refinement found no assignment with every nonedge below delta", false};
}

auto fit_approx(const TripartiteGraph & g, const PatternGraph & pattern, Rational delta, std::uint64_t seed, const FitOptions & options)
    -> std::variant<ApproxWitness, NotFound>
{
    return fit_approx(g, pattern, whole_classes(g, pattern.parts()), delta, seed, options);
}

auto check_very_extreme(const TripartiteGraph & g, int h, const NineSets & sets, const PatternGraph & pattern)
    -> std::variant<VeryExtremeWitness, Violation>
{
    if (pattern.parts() != 3 || pattern.blocks_per_part() != 3)
        throw std::invalid_argument("the very extreme case needs a 3x3 pattern");
    const int n = g.n();
    if (h < 1 || n % h != 0 || (n / h) % 6 != 3)
        throw WrongDivisibility("N = " + std::to_string(n) + " is not (6q + 3) h for h = " + std::to_string(h));
    const int q = (n / h - 3) / 6;

    for (int i = 0; i < num_classes; ++i) {
        for (int j = 0; j < 3; ++j)
            if (sets[i][j].cls() != i || sets[i][j].universe() != n)
                throw MalformedAssignment("set " + block_name({i, j}) + " is not a subset of class " + std::to_string(i + 1));
        for (int j = 0; j < 3; ++j)
            for (int j2 = j + 1; j2 < 3; ++j2)
                if (! (sets[i][j] & sets[i][j2]).empty())
                    throw MalformedAssignment("sets " + block_name({i, j}) + " and " + block_name({i, j2}) + " overlap");
    }

    VeryExtremeWitness w;
    w.q = q;
    w.sets = sets;
    for (int i = 0; i < num_classes; ++i)
        for (int j = 0; j < 3; ++j)
            if (sets[i][j].size() < 2 * q * h + 1)
                return Violation{"set " + block_name({i, j}) + " has " + std::to_string(sets[i][j].size()) + " vertices, fewer than 2qh+1 = " +
                    std::to_string(2 * q * h + 1)};

    for (int i = 0; i < num_classes; ++i)
        for (int j = 0; j < 3; ++j)
            for (int v : sets[i][j].offsets())
                for (int i2 = 0; i2 < num_classes; ++i2)
                    for (int j2 = 0; j2 < 3; ++j2) {
                        if (! pattern.adjacent({i, j}, {i2, j2}))
                            continue;
                        const int miss = sets[i2][j2].size() - static_cast<int>((g.row({i, v}, i2) & sets[i2][j2].bits()).count());
                        w.worst[i][j] = std::max(w.worst[i][j], miss);
                        if (miss > 3 * h - 3)
                            return Violation{"vertex (" + std::to_string(i + 1) + ", " + std::to_string(v) + ") of " + block_name({i, j}) +
                                " misses " + std::to_string(miss) + " vertices of " + block_name({i2, j2}) + ", more than 3h-3 = " +
                                std::to_string(3 * h - 3)};
                    }
    return w;
}

auto nine_sets_from_assignment(const TripartiteGraph & g, const PatternAssignment & block_of) -> NineSets
{
    if (block_of.size() != num_classes)
        throw MalformedAssignment("nine sets need a three-part assignment");
    NineSets sets;
    for (int i = 0; i < num_classes; ++i)
        for (int j = 0; j < 3; ++j) {
            sets[i][j] = VertexSet(i, g.n());
            for (int u = 0; u < g.n(); ++u)
                if (block_of[i][u] == j)
                    sets[i][j].insert(u);
        }
    return sets;
}

}
