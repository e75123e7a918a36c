#include <tiling/matching.hh>
#include <tiling/random.hh>
#include <tiling/tiler.hh>
#include <tiling/tiling_search.hh>

#include <algorithm>
#include <numeric>
#include <set>

namespace tiling {

namespace
{
    using Parts = std::array<std::vector<int>, num_classes>;

    auto rational_text(Rational r) -> std::string
    {
        return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
    }

    auto vertex_name(VertexRef v) -> std::string
    {
        return "(" + std::to_string(v.cls + 1) + ", " + std::to_string(v.offset) + ")";
    }

    auto count_in(const TripartiteGraph & g, VertexRef v, const VertexSet & s) -> int
    {
        return static_cast<int>((g.row(v, s.cls()) & s.bits()).count());
    }

    auto bit_offsets(const Bits & b) -> std::vector<int>
    {
        std::vector<int> out;
        for (auto u = b.find_first(); u != Bits::npos; u = b.find_next(u))
            out.push_back(static_cast<int>(u));
        return out;
    }

    auto quota_of(int d, int h) -> int
    {
        return std::max(0, d - h + 1);
    }

    auto third_class(int a, int b) -> int
    {
        return num_classes - a - b;
    }

    // Lexicographic k-subsets of items, one budget unit each. Returns true when
    // fn asked to stop.
    template <typename F>
    auto for_each_subset(const std::vector<int> & items, int k, std::uint64_t & budget, F && fn) -> bool
    {
        const int n = static_cast<int>(items.size());
        if (k > n)
            return false;
        std::vector<int> idx(static_cast<std::size_t>(k));
        std::iota(idx.begin(), idx.end(), 0);
        std::vector<int> pick(static_cast<std::size_t>(k));
        while (true) {
            if (budget == 0)
                return false;
            --budget;
            for (int r = 0; r < k; ++r)
                pick[r] = items[idx[r]];
            if (fn(pick))
                return true;
            int i = k - 1;
            while (i >= 0 && idx[i] == n - k + i)
                --i;
            if (i < 0)
                return false;
            ++idx[i];
            for (int j = i + 1; j < k; ++j)
                idx[j] = idx[j - 1] + 1;
        }
    }

    // Adds need[c] vertices of pool[c] to each class so that the result is
    // complete multipartite.
    auto complete_copy(const TripartiteGraph & g, Parts chosen, std::array<int, num_classes> need, const std::array<Bits, num_classes> & pool,
        std::uint64_t & budget) -> std::optional<Parts>
    {
        int c = 0;
        while (c < num_classes && need[c] == 0)
            ++c;
        if (c == num_classes) {
            for (auto & p : chosen)
                std::sort(p.begin(), p.end());
            return chosen;
        }
        Bits cand = pool[c];
        for (int o = 0; o < num_classes; ++o)
            if (o != c)
                for (int u : chosen[o])
                    cand &= g.row({o, u}, c);
        for (int u : chosen[c])
            cand.reset(static_cast<std::size_t>(u));
        if (static_cast<int>(cand.count()) < need[c])
            return std::nullopt;

        const int k = need[c];
        need[c] = 0;
        std::optional<Parts> found;
        for_each_subset(bit_offsets(cand), k, budget, [&](const std::vector<int> & pick) {
            Parts next = chosen;
            next[c].insert(next[c].end(), pick.begin(), pick.end());
            found = complete_copy(g, std::move(next), need, pool, budget);
            return found.has_value();
        });
        return found;
    }

    // ---- stars ----

    struct Greedy
    {
        std::vector<Star> stars;
        bool complete = true;
        VertexSet s;
        VertexSet t;
    };

    // Lowest-offset centre with h unused neighbours, its h lowest such neighbours as leaves.
    auto greedy_stars(const TripartiteGraph & g, int h, const VertexSet & a1, const VertexSet & a2, int quota) -> Greedy
    {
        Greedy r{{}, true, VertexSet(a1.cls(), g.n()), VertexSet(a2.cls(), g.n())};
        Bits free = a2.bits();
        while (static_cast<int>(r.stars.size()) < quota) {
            bool placed = false;
            for (int u : a1.offsets()) {
                if (r.s.contains(u))
                    continue;
                Bits nb = g.row({a1.cls(), u}, a2.cls()) & free;
                if (static_cast<int>(nb.count()) < h)
                    continue;
                Star st{{a1.cls(), u}, {}, a2.cls()};
                for (auto v = nb.find_first(); static_cast<int>(st.leaves.size()) < h; v = nb.find_next(v)) {
                    st.leaves.push_back(static_cast<int>(v));
                    free.reset(v);
                    r.t.insert(static_cast<int>(v));
                }
                r.s.insert(u);
                r.stars.push_back(std::move(st));
                placed = true;
                break;
            }
            if (! placed) {
                r.complete = false;
                break;
            }
        }
        return r;
    }

    auto near_m(Rational eps, int m, int size) -> bool
    {
        return Rational(std::abs(size - m)) < eps * Rational(m);
    }

    auto min_degree_into(const TripartiteGraph & g, const VertexSet & from, const VertexSet & into, int d) -> bool
    {
        for (int v : from.offsets())
            if (count_in(g, {from.cls(), v}, into) < d)
                return false;
        return true;
    }

    auto bipartite_hypotheses(const TripartiteGraph & g, int h, const VertexSet & a1, const VertexSet & a2, int d1, Rational eps, int m)
        -> StarHypotheses
    {
        StarHypotheses hy;
        hy.epsilon = eps;
        hy.m = m;
        hy.epsilon_small = eps * Rational((h + 1) * h) < Rational(1);
        hy.sizes_near_m = m > 0 && near_m(eps, m, a1.size()) && near_m(eps, m, a2.size());
        hy.degrees_small = Rational(d1) < eps * Rational(m);
        hy.min_degrees_met = min_degree_into(g, a2, a1, d1);
        return hy;
    }

    auto fill_chain(StarCertificate & c, const TripartiteGraph & g)
    {
        const auto rest1 = c.centers_side - c.s;
        const auto rest2 = c.leaves_side - c.t;
        c.lower = static_cast<std::int64_t>(c.d1 - c.s.size()) * rest2.size();
        c.edges = g.edge_count(rest1, rest2);
        c.upper = static_cast<std::int64_t>(c.h - 1) * rest1.size();
        c.s_lower_bound = rest2.size() == 0
            ? Rational(0)
            : Rational(c.d1 - c.h + 1) - Rational(static_cast<std::int64_t>(c.h - 1) * (rest1.size() - rest2.size()), rest2.size());
    }

    auto make_certificate(const TripartiteGraph & g, int h, const VertexSet & a1, const VertexSet & a2, int d1, const Greedy & run,
        Rational eps, int m) -> StarCertificate
    {
        StarCertificate c;
        c.centers_side = a1;
        c.leaves_side = a2;
        c.s = run.s;
        c.t = run.t;
        c.d1 = d1;
        c.h = h;
        c.quota = quota_of(d1, h);
        fill_chain(c, g);
        c.hypotheses = bipartite_hypotheses(g, h, a1, a2, d1, eps, m);
        return c;
    }

    auto sort_stars(std::vector<Star> & stars)
    {
        std::sort(stars.begin(), stars.end(), [](const Star & a, const Star & b) { return a.center < b.center; });
    }

    // ---- clustering ----

    void check_pair(const VertexSet & b1, const VertexSet & b2, int h)
    {
        if (b1.cls() == b2.cls())
            throw SameClass("both sides lie in class " + std::to_string(b1.cls() + 1));
        if (h < 1)
            throw UnbalancedOrIndivisible("h must be positive");
        if (b1.size() != b2.size())
            throw UnbalancedOrIndivisible("sides have " + std::to_string(b1.size()) + " and " + std::to_string(b2.size()) + " vertices");
        if (b1.size() % h != 0)
            throw UnbalancedOrIndivisible(std::to_string(b1.size()) + " is not divisible by h = " + std::to_string(h));
    }

    auto cut_clusters(const TripartiteGraph & g, int h, const VertexSet & side, const VertexSet & other, const ClusterOptions & options)
        -> std::vector<std::vector<int>>
    {
        auto order = side.offsets();
        if (options.shuffle_seed) {
            Rng rng(*options.shuffle_seed);
            std::shuffle(order.begin(), order.end(), rng);
        }
        std::vector<std::vector<int>> clusters;
        if (! options.by_common_neighbourhood) {
            for (std::size_t k = 0; k < order.size(); k += static_cast<std::size_t>(h)) {
                std::vector<int> c(order.begin() + static_cast<long>(k), order.begin() + static_cast<long>(k) + h);
                std::sort(c.begin(), c.end());
                clusters.push_back(std::move(c));
            }
            return clusters;
        }

        // Best-first: grow a cluster from every free vertex, keep the one with
        // the largest common neighbourhood, repeat.
        const int third = third_class(side.cls(), other.cls());
        std::vector<bool> used(static_cast<std::size_t>(g.n()), false);
        auto grow = [&](int u, std::size_t & score) {
            std::vector<int> c{u};
            Bits common = g.row({side.cls(), u}, other.cls()) & other.bits();
            Bits common3 = g.row({side.cls(), u}, third);
            auto value = [&](const Bits & a, const Bits & b) { return a.count() + (options.count_third_class ? b.count() : 0); };
            while (static_cast<int>(c.size()) < h) {
                int best = -1;
                std::size_t best_score = 0;
                for (int w : order) {
                    if (used[w] || std::find(c.begin(), c.end(), w) != c.end())
                        continue;
                    const auto v = value(common & g.row({side.cls(), w}, other.cls()), common3 & g.row({side.cls(), w}, third));
                    if (best < 0 || v > best_score)
                        best = w, best_score = v;
                }
                c.push_back(best);
                common &= g.row({side.cls(), best}, other.cls());
                common3 &= g.row({side.cls(), best}, third);
            }
            score = value(common, common3);
            return c;
        };
        for (std::size_t done = 0; done < order.size(); done += static_cast<std::size_t>(h)) {
            std::vector<int> best;
            std::size_t best_score = 0;
            for (int u : order) {
                if (used[u])
                    continue;
                std::size_t score = 0;
                auto c = grow(u, score);
                if (best.empty() || score > best_score)
                    best = std::move(c), best_score = score;
            }
            for (int u : best)
                used[u] = true;
            std::sort(best.begin(), best.end());
            clusters.push_back(std::move(best));
        }
        return clusters;
    }

    auto common_neighbourhood(const TripartiteGraph & g, int cls, const std::vector<int> & members, const VertexSet & into) -> Bits
    {
        Bits b = into.bits();
        for (int u : members)
            b &= g.row({cls, u}, into.cls());
        return b;
    }

    // Every item needs `need` vertices of `side` among its candidates; items
    // are replicated and matched against side vertices.
    struct Assignment
    {
        std::vector<std::vector<int>> taken;
        int matched = 0;
        std::vector<int> deficient;
        std::vector<int> partners;
    };

    auto assign_vertices(const std::vector<Bits> & candidates, int need, const VertexSet & side) -> Assignment
    {
        const auto members = side.offsets();
        std::vector<int> index_of(static_cast<std::size_t>(side.universe()), -1);
        for (std::size_t k = 0; k < members.size(); ++k)
            index_of[members[k]] = static_cast<int>(k);

        BipartiteAdjacency b;
        b.left = static_cast<int>(candidates.size()) * need;
        b.right = static_cast<int>(members.size());
        b.adj.resize(static_cast<std::size_t>(b.left));
        for (std::size_t item = 0; item < candidates.size(); ++item) {
            std::vector<int> adj;
            for (int v : bit_offsets(candidates[item]))
                if (index_of[v] >= 0)
                    adj.push_back(index_of[v]);
            for (int r = 0; r < need; ++r)
                b.adj[item * need + r] = adj;
        }
        const auto m = maximum_matching(b);

        Assignment a;
        a.matched = m.size;
        a.taken.resize(candidates.size());
        if (m.size == b.left) {
            for (int slot = 0; slot < b.left; ++slot)
                a.taken[slot / need].push_back(members[m.mate_left[slot]]);
            for (auto & t : a.taken)
                std::sort(t.begin(), t.end());
            return a;
        }
        const auto hv = hall_violator(b, m);
        std::set<int> items;
        for (int slot : hv.left)
            items.insert(slot / need);
        a.deficient.assign(items.begin(), items.end());
        for (int r : hv.neighbours)
            a.partners.push_back(members[r]);
        std::sort(a.partners.begin(), a.partners.end());
        return a;
    }

    // Every vertex of each side misses fewer than bound of the other side.
    auto misses_below(const TripartiteGraph & g, const std::vector<VertexSet> & sides, Rational bound) -> bool
    {
        for (const auto & a : sides)
            for (const auto & b : sides) {
                if (a.cls() == b.cls())
                    continue;
                for (int u : a.offsets())
                    if (Rational(b.size() - count_in(g, {a.cls(), u}, b)) >= bound)
                        return false;
            }
        return true;
    }

    void validate_khh_factor(const TripartiteGraph & g, int h, const KhhFactor & f, const VertexSet & first)
    {
        if (f.first_class == f.second_class || f.first_class < 0 || f.first_class >= num_classes || f.second_class < 0 ||
            f.second_class >= num_classes)
            throw InvalidInputFactor("factor classes must be two distinct classes");
        if (first.cls() == f.first_class || first.cls() == f.second_class)
            throw InvalidInputFactor("the set to extend with lies in a class of the factor");
        std::vector<bool> seen1(static_cast<std::size_t>(g.n()), false), seen2(static_cast<std::size_t>(g.n()), false);
        for (std::size_t k = 0; k < f.copies.size(); ++k) {
            const auto & c = f.copies[k];
            if (static_cast<int>(c.first.size()) != h || static_cast<int>(c.second.size()) != h)
                throw InvalidInputFactor("copy " + std::to_string(k) + " does not have h vertices per side");
            for (int u : c.first) {
                if (u < 0 || u >= g.n() || seen1[u])
                    throw InvalidInputFactor("copy " + std::to_string(k) + " reuses or misplaces " + vertex_name({f.first_class, u}));
                seen1[u] = true;
            }
            for (int v : c.second) {
                if (v < 0 || v >= g.n() || seen2[v])
                    throw InvalidInputFactor("copy " + std::to_string(k) + " reuses or misplaces " + vertex_name({f.second_class, v}));
                seen2[v] = true;
            }
            for (int u : c.first)
                for (int v : c.second)
                    if (! g.has_edge({f.first_class, u}, {f.second_class, v}))
                        throw InvalidInputFactor("copy " + std::to_string(k) + " misses the edge " + vertex_name({f.first_class, u}) + " " +
                            vertex_name({f.second_class, v}));
        }
        if (static_cast<int>(f.copies.size()) * h != first.size())
            throw InvalidInputFactor(std::to_string(f.copies.size()) + " copies cannot be extended by " + std::to_string(first.size()) + " vertices");
    }

    auto factor_sides(const TripartiteGraph & g, const KhhFactor & f) -> std::pair<VertexSet, VertexSet>
    {
        VertexSet a(f.first_class, g.n()), b(f.second_class, g.n());
        for (const auto & c : f.copies) {
            for (int u : c.first)
                a.insert(u);
            for (int v : c.second)
                b.insert(v);
        }
        return {a, b};
    }

    auto khh_from_tiles(const TileCopies & tiles, int cls_a, int cls_b) -> KhhFactor
    {
        KhhFactor f{cls_a, cls_b, {}};
        const bool swapped = cls_a > cls_b;
        for (const auto & t : tiles)
            f.copies.push_back(swapped ? KhhCopy{t[1], t[0]} : KhhCopy{t[0], t[1]});
        std::sort(f.copies.begin(), f.copies.end(), [](const KhhCopy & x, const KhhCopy & y) { return x.first < y.first; });
        return f;
    }

    auto theta_split(const TripartiteGraph & g, const VertexSet & b1, const VertexSet & b2, Rational epsilon, std::uint64_t seed,
        const FitOptions & fit) -> std::optional<ThetaSplitWitness>
    {
        if (b1.size() < 2)
            return std::nullopt;
        auto r = fit_approx(g, PatternGraph::theta(2, 2), PatternParts{b1, b2}, Rational(1), seed, fit);
        auto * w = std::get_if<ApproxWitness>(&r);
        if (! w)
            return std::nullopt;
        ThetaSplitWitness s{VertexSet(b1.cls(), g.n()), VertexSet(b1.cls(), g.n()), VertexSet(b2.cls(), g.n()), VertexSet(b2.cls(), g.n())};
        for (int u : b1.offsets())
            (w->block_of[0][u] == 0 ? s.a_sparse : s.a_rest).insert(u);
        for (int v : b2.offsets())
            (w->block_of[1][v] == 0 ? s.b_sparse : s.b_rest).insert(v);
        s.density = density(s.a_sparse, s.b_sparse, g);
        s.rest_density = density(s.a_rest, s.b_rest, g);
        if (s.density > epsilon || s.rest_density > epsilon)
            return std::nullopt;
        return s;
    }
}

// ---- stars -----------------------------------------------------------------

auto verify_star_certificate(const TripartiteGraph & g, const StarCertificate & c) -> Verdict
{
    const int n = g.n();
    for (const auto * s : {&c.centers_side, &c.leaves_side, &c.s, &c.t})
        if (s->universe() != n)
            return Verdict::fail("a set is not over the graph's vertex range");
    if (c.centers_side.cls() == c.leaves_side.cls())
        return Verdict::fail("centre and leaf sides lie in one class");
    if (c.s.cls() != c.centers_side.cls() || ! (c.s - c.centers_side).empty())
        return Verdict::fail("S is not inside the centre side");
    if (c.t.cls() != c.leaves_side.cls() || ! (c.t - c.leaves_side).empty())
        return Verdict::fail("T is not inside the leaf side");
    if (c.h < 1)
        return Verdict::fail("h must be positive");
    if (c.t.size() != c.h * c.s.size())
        return Verdict::fail("|T| = " + std::to_string(c.t.size()) + " is not h|S| = " + std::to_string(c.h * c.s.size()));
    if (c.quota != quota_of(c.d1, c.h))
        return Verdict::fail("quota does not match d1");
    if (c.s.size() >= c.quota)
        return Verdict::fail("|S| already reaches the quota");

    const auto rest1 = c.centers_side - c.s;
    const auto rest2 = c.leaves_side - c.t;
    for (int u : rest1.offsets())
        if (count_in(g, {rest1.cls(), u}, rest2) >= c.h)
            return Verdict::fail("vertex " + vertex_name({rest1.cls(), u}) + " has h neighbours outside T");

    StarCertificate fresh = c;
    fill_chain(fresh, g);
    if (fresh.lower != c.lower || fresh.edges != c.edges || fresh.upper != c.upper || fresh.s_lower_bound != c.s_lower_bound)
        return Verdict::fail("inequality values do not match the graph");
    if (c.edges > c.upper)
        return Verdict::fail("edge count exceeds (h - 1)|A1 \\ S|");
    const bool degrees = min_degree_into(g, c.leaves_side, c.centers_side, c.d1);
    if (degrees != c.hypotheses.min_degrees_met)
        return Verdict::fail("minimum-degree flag does not match the graph");
    if (degrees) {
        if (c.lower > c.edges)
            return Verdict::fail("lower bound exceeds the edge count despite the degree hypothesis");
        if (Rational(c.s.size()) < c.s_lower_bound)
            return Verdict::fail("|S| is below the derived bound");
    }
    return Verdict::pass();
}

auto verify_star_family(const TripartiteGraph & g, int h, const std::vector<VertexSet> & sets, const std::vector<int> & quotas,
    const StarFamily & f) -> Verdict
{
    const auto k = sets.size();
    if (quotas.size() != k || f.counts.size() != k)
        return Verdict::fail("counts do not match the number of sets");
    std::vector<int> counts(k, 0);
    std::set<VertexRef> used;
    for (const auto & st : f.stars) {
        std::size_t i = 0;
        while (i < k && sets[i].cls() != st.center.cls)
            ++i;
        if (i == k || ! sets[i].contains(st.center.offset))
            return Verdict::fail("centre " + vertex_name(st.center) + " lies outside the centre sets");
        const auto & leaf_side = sets[(i + 1) % k];
        if (st.leaf_class != leaf_side.cls())
            return Verdict::fail("star at " + vertex_name(st.center) + " has leaves in the wrong class");
        if (static_cast<int>(st.leaves.size()) != h)
            return Verdict::fail("star at " + vertex_name(st.center) + " does not have h leaves");
        if (! used.insert(st.center).second)
            return Verdict::fail("vertex " + vertex_name(st.center) + " is used twice");
        for (int v : st.leaves) {
            if (v < 0 || v >= g.n() || ! leaf_side.contains(v))
                return Verdict::fail("leaf " + vertex_name({st.leaf_class, v}) + " lies outside its set");
            if (! g.has_edge(st.center, {st.leaf_class, v}))
                return Verdict::fail("missing edge " + vertex_name(st.center) + " " + vertex_name({st.leaf_class, v}));
            if (! used.insert({st.leaf_class, v}).second)
                return Verdict::fail("vertex " + vertex_name({st.leaf_class, v}) + " is used twice");
        }
        ++counts[i];
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (counts[i] != f.counts[i])
            return Verdict::fail("reported count for set " + std::to_string(i + 1) + " is wrong");
        if (counts[i] != quotas[i])
            return Verdict::fail("set " + std::to_string(i + 1) + " has " + std::to_string(counts[i]) + " stars, quota " + std::to_string(quotas[i]));
    }
    return Verdict::pass();
}

auto star_family_bipartite(const VertexSet & a1, const VertexSet & a2, const TripartiteGraph & g, int h, int d1, Rational epsilon, int m)
    -> std::variant<StarFamily, StarCertificate>
{
    if (a1.cls() == a2.cls())
        throw SameClass("both sides lie in class " + std::to_string(a1.cls() + 1));
    const int quota = quota_of(d1, h);
    auto run = greedy_stars(g, h, a1, a2, quota);
    if (! run.complete)
        return make_certificate(g, h, a1, a2, d1, run, epsilon, m);
    StarFamily f;
    f.stars = std::move(run.stars);
    f.counts = {quota, 0};
    f.hypotheses = bipartite_hypotheses(g, h, a1, a2, d1, epsilon, m);
    return f;
}

auto star_family_tripartite(const std::array<VertexSet, 3> & sets, const TripartiteGraph & g, int h, const std::array<int, 3> & d,
    Rational epsilon, int m) -> std::variant<StarFamily, StarCertificate>
{
    for (int i = 0; i < 3; ++i)
        if (sets[i].cls() == sets[(i + 1) % 3].cls())
            throw SameClass("sets " + std::to_string(i + 1) + " and " + std::to_string((i + 1) % 3 + 1) + " share a class");

    std::array<int, 3> quota{};
    for (int i = 0; i < 3; ++i)
        quota[i] = quota_of(d[i], h);

    StarFamily f;
    f.counts = {0, 0, 0};
    f.hypotheses.epsilon = epsilon;
    f.hypotheses.m = m;
    f.hypotheses.epsilon_small = epsilon * Rational(2 * (h + 2) * (h + 1) * h) < Rational(1);
    f.hypotheses.sizes_near_m = m > 0;
    f.hypotheses.degrees_small = true;
    f.hypotheses.min_degrees_met = true;
    for (int i = 0; i < 3; ++i) {
        f.hypotheses.sizes_near_m = f.hypotheses.sizes_near_m && near_m(epsilon, m, sets[i].size());
        f.hypotheses.degrees_small = f.hypotheses.degrees_small && Rational(d[i]) < epsilon * Rational(m);
        for (int j = 0; j < 3; ++j)
            if (j != i)
                f.hypotheses.min_degrees_met = f.hypotheses.min_degrees_met && min_degree_into(g, sets[j], sets[i], d[i]);
    }

    std::array<std::vector<Star>, 3> z;
    std::optional<StarCertificate> failure;
    // Stars centred in set i with leaves in set i + 1, drawn from the given subsets.
    auto call = [&](int i, const VertexSet & centers, const VertexSet & leaves, int q) -> bool {
        auto run = greedy_stars(g, h, centers, leaves, q);
        if (! run.complete) {
            failure = make_certificate(g, h, centers, leaves, q + h - 1, run, epsilon, m);
            return false;
        }
        z[i] = std::move(run.stars);
        return true;
    };
    auto centres_of = [&](const std::vector<Star> & stars, int cls) {
        VertexSet s(cls, g.n());
        for (const auto & st : stars)
            s.insert(st.center.offset);
        return s;
    };
    auto leaves_of = [&](const std::vector<Star> & stars, int cls) {
        VertexSet s(cls, g.n());
        for (const auto & st : stars)
            for (int v : st.leaves)
                s.insert(v);
        return s;
    };

    const auto zero = std::find(quota.begin(), quota.end(), 0);
    if (zero != quota.end()) {
        const int k = static_cast<int>(zero - quota.begin());
        const int a = (k + 1) % 3, b = (k + 2) % 3;
        if (! call(b, sets[b], sets[k], quota[b]) || ! call(a, sets[a], sets[b] - centres_of(z[b], sets[b].cls()), quota[a]))
            return *failure;
    }
    else {
        auto first = greedy_stars(g, h, sets[0], sets[1], quota[0] + quota[1]);
        if (first.complete) {
            if (! call(2, sets[2], sets[0] - first.s, quota[2]) || ! call(1, sets[1], sets[2] - centres_of(z[2], sets[2].cls()), quota[1]))
                return *failure;
            // Each centre in set 2 spoils at most one of the first stars.
            const auto spoiled = centres_of(z[1], sets[1].cls());
            for (auto & st : first.stars) {
                if (static_cast<int>(z[0].size()) == quota[0])
                    break;
                if (std::none_of(st.leaves.begin(), st.leaves.end(), [&](int v) { return spoiled.contains(v); }))
                    z[0].push_back(std::move(st));
            }
        }
        else if (! call(2, sets[2], sets[0] - first.s, quota[2]) || ! call(1, sets[1], sets[2] - centres_of(z[2], sets[2].cls()), quota[1]) ||
            ! call(0, sets[0] - leaves_of(z[2], sets[0].cls()), sets[1] - centres_of(z[1], sets[1].cls()), quota[0]))
            return *failure;
    }

    for (int i = 0; i < 3; ++i) {
        f.counts[i] = static_cast<int>(z[i].size());
        for (auto & st : z[i])
            f.stars.push_back(std::move(st));
    }
    sort_stars(f.stars);
    return f;
}

// ---- K_{h,h} factors -----------------------------------------------------------

auto verify_khh_factor(const TripartiteGraph & g, int h, const VertexSet & b1, const VertexSet & b2, const KhhFactor & f) -> Verdict
{
    if (f.first_class != b1.cls() || f.second_class != b2.cls())
        return Verdict::fail("factor classes do not match the sides");
    VertexSet cover1(b1.cls(), g.n()), cover2(b2.cls(), g.n());
    for (std::size_t k = 0; k < f.copies.size(); ++k) {
        const auto & c = f.copies[k];
        if (static_cast<int>(c.first.size()) != h || static_cast<int>(c.second.size()) != h)
            return Verdict::fail("copy " + std::to_string(k) + " does not have h vertices per side");
        for (int u : c.first) {
            if (u < 0 || u >= g.n() || ! b1.contains(u) || cover1.contains(u))
                return Verdict::fail("vertex " + vertex_name({b1.cls(), u}) + " is outside the side or used twice");
            cover1.insert(u);
        }
        for (int v : c.second) {
            if (v < 0 || v >= g.n() || ! b2.contains(v) || cover2.contains(v))
                return Verdict::fail("vertex " + vertex_name({b2.cls(), v}) + " is outside the side or used twice");
            cover2.insert(v);
        }
        for (int u : c.first)
            for (int v : c.second)
                if (! g.has_edge({b1.cls(), u}, {b2.cls(), v}))
                    return Verdict::fail("missing edge " + vertex_name({b1.cls(), u}) + " " + vertex_name({b2.cls(), v}));
    }
    if (cover1 != b1 || cover2 != b2)
        return Verdict::fail("the copies do not cover both sides");
    return Verdict::pass();
}

auto cluster_khh_factor(const VertexSet & b1, const VertexSet & b2, const TripartiteGraph & g, int h, const ClusterOptions & options)
    -> std::variant<KhhFactor, MatchingFailure>
{
    check_pair(b1, b2, h);
    const auto clusters = cut_clusters(g, h, b1, b2, options);
    const int third = third_class(b1.cls(), b2.cls());
    std::vector<Bits> candidates;
    for (const auto & c : clusters) {
        auto cand = common_neighbourhood(g, b1.cls(), c, b2);
        if (options.count_third_class) {
            const auto common3 = common_neighbourhood(g, b1.cls(), c, VertexSet::full(third, g.n()));
            for (int w : bit_offsets(cand))
                if (static_cast<int>((common3 & g.row({b2.cls(), w}, third)).count()) < h)
                    cand.reset(static_cast<std::size_t>(w));
        }
        candidates.push_back(std::move(cand));
    }

    auto a = assign_vertices(candidates, h, b2);
    if (a.deficient.empty()) {
        KhhFactor f{b1.cls(), b2.cls(), {}};
        for (std::size_t k = 0; k < clusters.size(); ++k)
            f.copies.push_back({clusters[k], a.taken[k]});
        std::sort(f.copies.begin(), f.copies.end(), [](const KhhCopy & x, const KhhCopy & y) { return x.first < y.first; });
        return f;
    }
    MatchingFailure fail;
    fail.matched = a.matched;
    fail.needed = b2.size();
    fail.clusters = clusters;
    fail.deficient = std::move(a.deficient);
    fail.partners = std::move(a.partners);
    fail.degree_hypothesis = misses_below(g, {b1, b2}, Rational(b1.size(), 2 * h * h));
    return fail;
}

auto extend_to_khhh(const TripartiteGraph & g, int h, const VertexSet & first, const KhhFactor & factor,
    const std::vector<std::vector<int>> & preset_clusters) -> std::variant<std::vector<KhhhCopy>, MatchingFailure>
{
    if (h < 1)
        throw InvalidInputFactor("h must be positive");
    validate_khh_factor(g, h, factor, first);

    std::vector<Bits> candidates;
    for (const auto & c : factor.copies) {
        Bits b = common_neighbourhood(g, factor.first_class, c.first, first);
        for (int v : c.second)
            b &= g.row({factor.second_class, v}, first.cls());
        candidates.push_back(std::move(b));
    }

    Assignment a;
    if (preset_clusters.empty())
        a = assign_vertices(candidates, h, first);
    else {
        VertexSet seen(first.cls(), g.n());
        for (const auto & c : preset_clusters) {
            if (static_cast<int>(c.size()) != h)
                throw InvalidInputFactor("preset clusters must have h vertices");
            for (int u : c) {
                if (u < 0 || u >= g.n() || ! first.contains(u) || seen.contains(u))
                    throw InvalidInputFactor("preset clusters do not partition the set");
                seen.insert(u);
            }
        }
        if (seen != first)
            throw InvalidInputFactor("preset clusters do not partition the set");
        // One slot per copy; right side indexes clusters through their first vertex.
        VertexSet heads(first.cls(), g.n());
        std::vector<int> cluster_of(static_cast<std::size_t>(g.n()), -1);
        for (std::size_t k = 0; k < preset_clusters.size(); ++k) {
            heads.insert(preset_clusters[k][0]);
            cluster_of[preset_clusters[k][0]] = static_cast<int>(k);
        }
        std::vector<Bits> fits;
        for (const auto & cand : candidates) {
            Bits b(static_cast<std::size_t>(g.n()));
            for (const auto & c : preset_clusters)
                if (std::all_of(c.begin(), c.end(), [&](int u) { return cand.test(static_cast<std::size_t>(u)); }))
                    b.set(static_cast<std::size_t>(c[0]));
            fits.push_back(std::move(b));
        }
        a = assign_vertices(fits, 1, heads);
        if (a.deficient.empty())
            for (auto & t : a.taken)
                t = preset_clusters[cluster_of[t[0]]];
        else {
            std::vector<int> expanded;
            for (int head : a.partners)
                for (int u : preset_clusters[cluster_of[head]])
                    expanded.push_back(u);
            std::sort(expanded.begin(), expanded.end());
            a.partners = std::move(expanded);
        }
    }

    if (a.deficient.empty()) {
        std::vector<KhhhCopy> out;
        for (std::size_t k = 0; k < factor.copies.size(); ++k) {
            KhhhCopy c;
            c.parts[first.cls()] = a.taken[k];
            c.parts[factor.first_class] = factor.copies[k].first;
            c.parts[factor.second_class] = factor.copies[k].second;
            out.push_back(std::move(c));
        }
        return out;
    }
    auto [s1, s2] = factor_sides(g, factor);
    MatchingFailure fail;
    fail.matched = a.matched;
    fail.needed = static_cast<int>(candidates.size()) * (preset_clusters.empty() ? h : 1);
    fail.clusters = preset_clusters;
    fail.deficient = std::move(a.deficient);
    fail.partners = std::move(a.partners);
    fail.degree_hypothesis = misses_below(g, {first, s1, s2}, Rational(first.size(), 4 * h * h));
    return fail;
}

auto extend_to_khhh(const TripartiteGraph & g, int h, const KhhFactor & factor) -> std::variant<FactorCertificate, MatchingFailure>
{
    if (factor.first_class == factor.second_class || factor.first_class < 0 || factor.first_class >= num_classes ||
        factor.second_class < 0 || factor.second_class >= num_classes)
        throw InvalidInputFactor("factor classes must be two distinct classes");
    if (h < 1 || g.n() % h != 0)
        throw InvalidInputFactor("h must divide N");
    const auto first = VertexSet::full(third_class(factor.first_class, factor.second_class), g.n());
    validate_khh_factor(g, h, factor, first);
    auto [s1, s2] = factor_sides(g, factor);
    if (s1.size() != g.n() || s2.size() != g.n())
        throw InvalidInputFactor("the factor does not cover its two classes");

    auto r = extend_to_khhh(g, h, first, factor);
    if (auto * fail = std::get_if<MatchingFailure>(&r))
        return std::move(*fail);
    FactorCertificate cert{std::move(std::get<std::vector<KhhhCopy>>(r))};
    canonicalize(cert);
    return cert;
}


namespace
{
    struct SwapOutcome
    {
        std::optional<KhhFactor> factor;
        std::optional<std::vector<KhhhCopy>> copies;
    };

    // Hill climbing over swaps of b1 vertices between clusters. The score is the
    // number of matched slots of the K_{h,h} step, plus those of the extension
    // into `third` once the K_{h,h} step succeeds.
    class SwapSearch
    {
    public:
        SwapSearch(const TripartiteGraph & g, int h, const VertexSet & b1, const VertexSet & b2, const std::optional<VertexSet> & third)
            : g_(g), h_(h), b1_(b1), b2_(b2), third_(third)
        {
        }

        auto run(std::vector<std::vector<int>> clusters, std::uint64_t seed, std::uint64_t evaluations) -> SwapOutcome
        {
            Rng rng(seed);
            const int goal = b2_.size() + (third_ ? third_->size() : 0);
            SwapOutcome best_out;
            int current = evaluate(clusters, best_out);
            const int k = static_cast<int>(clusters.size());
            // Singleton clusters make every clustering equivalent.
            int plateaus = 0;
            while (current < goal && evaluations > 0 && k > 1 && h_ > 1 && plateaus < 32) {
                std::vector<std::array<int, 4>> moves;
                for (int c1 = 0; c1 < k; ++c1)
                    for (int c2 = c1 + 1; c2 < k; ++c2)
                        for (int x = 0; x < h_; ++x)
                            for (int y = 0; y < h_; ++y)
                                moves.push_back({c1, x, c2, y});
                std::shuffle(moves.begin(), moves.end(), rng);
                bool improved = false;
                for (const auto & m : moves) {
                    if (evaluations == 0)
                        break;
                    --evaluations;
                    std::swap(clusters[m[0]][m[1]], clusters[m[2]][m[3]]);
                    SwapOutcome out;
                    const int score = evaluate(clusters, out);
                    if (score > current) {
                        current = score;
                        best_out = std::move(out);
                        improved = true;
                        break;
                    }
                    std::swap(clusters[m[0]][m[1]], clusters[m[2]][m[3]]);
                }
                if (improved)
                    plateaus = 0;
                else {
                    ++plateaus;
                    // Plateau: take a random swap and continue.
                    const auto & m = moves[rng() % moves.size()];
                    std::swap(clusters[m[0]][m[1]], clusters[m[2]][m[3]]);
                    SwapOutcome out;
                    current = evaluate(clusters, out);
                    best_out = std::move(out);
                }
            }
            if (current < goal)
                return {};
            return best_out;
        }

    private:
        auto evaluate(std::vector<std::vector<int>> clusters, SwapOutcome & out) const -> int
        {
            for (auto & c : clusters)
                std::sort(c.begin(), c.end());
            std::vector<Bits> cand;
            for (const auto & c : clusters)
                cand.push_back(common_neighbourhood(g_, b1_.cls(), c, b2_));
            auto a = assign_vertices(cand, h_, b2_);
            if (! a.deficient.empty())
                return a.matched;
            KhhFactor f{b1_.cls(), b2_.cls(), {}};
            for (std::size_t k = 0; k < clusters.size(); ++k)
                f.copies.push_back({clusters[k], a.taken[k]});
            int score = a.matched;
            if (third_) {
                std::vector<Bits> ext;
                for (const auto & c : f.copies) {
                    Bits b = common_neighbourhood(g_, b1_.cls(), c.first, *third_);
                    for (int v : c.second)
                        b &= g_.row({b2_.cls(), v}, third_->cls());
                    ext.push_back(std::move(b));
                }
                auto e = assign_vertices(ext, h_, *third_);
                score += e.matched;
                if (e.deficient.empty()) {
                    std::vector<KhhhCopy> copies;
                    for (std::size_t k = 0; k < f.copies.size(); ++k) {
                        KhhhCopy c;
                        c.parts[b1_.cls()] = f.copies[k].first;
                        c.parts[b2_.cls()] = f.copies[k].second;
                        c.parts[third_->cls()] = e.taken[k];
                        copies.push_back(std::move(c));
                    }
                    out.copies = std::move(copies);
                }
            }
            std::sort(f.copies.begin(), f.copies.end(), [](const KhhCopy & x, const KhhCopy & y) { return x.first < y.first; });
            out.factor = std::move(f);
            return score;
        }

        const TripartiteGraph & g_;
        int h_;
        VertexSet b1_, b2_;
        std::optional<VertexSet> third_;
    };
}

auto khh_factor_or_theta(const VertexSet & b1, const VertexSet & b2, const TripartiteGraph & g, int h, Rational epsilon,
    const KhhSearchOptions & options) -> std::variant<KhhFactor, ThetaSplitWitness, Unknown>
{
    if (b1.cls() == b2.cls() || h < 1 || b1.size() != b2.size() || b1.size() % h != 0)
        return Unknown{0, "sides are not a balanced pair divisible by h"};

    std::vector<ClusterOptions> attempts{{std::nullopt, false}, {std::nullopt, true}};
    for (int s = 0; s < options.shuffles; ++s)
        attempts.push_back({derive_seed(options.seed, static_cast<std::uint64_t>(s)), s % 2 == 0});
    for (const auto & o : attempts) {
        auto r = cluster_khh_factor(b1, b2, g, h, o);
        if (auto * f = std::get_if<KhhFactor>(&r))
            return std::move(*f);
    }

    if (b1.size() > 0) {
        auto local = SwapSearch(g, h, b1, b2, std::nullopt)
                         .run(cut_clusters(g, h, b1, b2, {std::nullopt, true, false}), derive_seed(options.seed, 0x5A), options.swap_evaluations);
        if (local.factor)
            return std::move(*local.factor);
    }

    const int lo = std::min(b1.cls(), b2.cls()), hi = std::max(b1.cls(), b2.cls());
    TilingProblem problem{&g, {lo, hi}, {(lo == b1.cls() ? b1 : b2).bits(), (hi == b2.cls() ? b2 : b1).bits()}, h};
    const auto search = search_tiling(problem, {options.node_budget, 1});
    if (search.status == SearchStatus::found) {
        auto f = khh_from_tiles(search.copies, lo, hi);
        if (lo != b1.cls()) {
            for (auto & c : f.copies)
                std::swap(c.first, c.second);
            std::swap(f.first_class, f.second_class);
            std::sort(f.copies.begin(), f.copies.end(), [](const KhhCopy & x, const KhhCopy & y) { return x.first < y.first; });
        }
        return f;
    }

    if (auto split = theta_split(g, b1, b2, epsilon, derive_seed(options.seed, 0xF17), options.fit))
        return *split;
    const bool proven = search.status == SearchStatus::exhausted;
    return Unknown{search.nodes, proven ? "no K_{h,h}-factor exists and no sparse split was found"
                                        : "cluster matching and the bounded search failed and no sparse split was found"};
}

// ---- pipeline ----------------------------------------------------------------

auto threshold_report(const TripartiteGraph & g, int h) -> ThresholdReport
{
    if (h < 1)
        throw std::invalid_argument("h must be positive");
    const int n = g.n();
    ThresholdReport t;
    t.bar_min_degree = bar_min_degree(g);
    const int level = h * ((2 * n + 3 * h - 1) / (3 * h));
    t.construction_level = level + h - 3;
    t.extreme_level = level + h - 1;
    t.upper_level = level + 2 * h - 1;
    const int r = n % h == 0 ? (n / h) % 6 : -1;
    if (r == 0) {
        t.band_low = t.band_high = 2 * n / 3 + h - 1;
    }
    else if (r == 3) {
        t.band_low = 2 * n / 3 + h - 1;
        t.band_high = 2 * n / 3 + 2 * h - 1;
    }
    else {
        t.band_low = level + h - 2;
        t.band_high = level + h - 1;
    }
    return t;
}

auto branch_name(Branch b) -> std::string
{
    switch (b) {
    case Branch::none:
        return "none";
    case Branch::part1:
        return "part1";
    case Branch::part2:
        return "part2";
    case Branch::part3a:
        return "part3a";
    case Branch::part3b:
        return "part3b";
    case Branch::very_extreme:
        return "very_extreme";
    }
    return "none";
}

namespace
{
    struct Group
    {
        int triple = 0;
        Parts parts;
    };

    struct Part1Result
    {
        std::optional<FactorCertificate> factor;
        bool reached_pairs = false;
        std::optional<ThetaSplitWitness> split;
    };

    class Part1
    {
    public:
        Part1(const TripartiteGraph & g, int h, const ExtremeWitness & w, const SolveConfig & cfg, std::vector<StageRecord> & trace)
            : g_(g), h_(h), n_(g.n()), w_(w), cfg_(cfg), trace_(trace)
        {
        }

        auto run() -> Part1Result
        {
            classify();
            if (! step1() || ! step2())
                return {};
            Part1Result r;
            r.reached_pairs = true;
            const int attempts = std::max(1, cfg_.retries);
            int last_violations = 0;
            for (int attempt = 0; attempt < attempts; ++attempt) {
                if (! assign_triples(attempt)) {
                    trace_.push_back({"part1.step3", "fail", "reserved vertices exceed a triple's capacity"});
                    return r;
                }
                last_violations = proportion_violations();
                if (last_violations > 0 && attempt + 1 < attempts)
                    continue;
                std::vector<KhhhCopy> copies;
                bool ok = true;
                for (int k = 0; k < num_classes && ok; ++k)
                    ok = solve_triple(k, attempt, copies, r);
                if (ok) {
                    trace_.push_back({"part1.step4", "factor", "attempt " + std::to_string(attempt + 1)});
                    r.factor = FactorCertificate{std::move(copies)};
                    return r;
                }
            }
            trace_.push_back({"part1.step3", "fail",
                "no K_{h,h}-factor completed after " + std::to_string(attempts) + " partitions; last partition had " +
                    std::to_string(last_violations) + " proportion violations"});
            return r;
        }

    private:
        auto b_side(int i) const -> VertexSet
        {
            return VertexSet::full(i, n_) - at_[i];
        }

        void classify()
        {
            for (int i = 0; i < num_classes; ++i) {
                at_[i] = VertexSet(i, n_);
                bt_[i] = VertexSet(i, n_);
                ct_[i] = VertexSet(i, n_);
                home_[i].assign(static_cast<std::size_t>(n_), -1);
                for (int u = 0; u < n_; ++u) {
                    bool sparse = true, dense = true;
                    for (int j = 0; j < num_classes; ++j) {
                        if (j == i)
                            continue;
                        const Rational deg(count_in(g_, {i, u}, w_.sets[j]));
                        const Rational size(w_.sets[j].size());
                        sparse = sparse && deg <= cfg_.typical * size;
                        dense = dense && deg >= (Rational(1) - cfg_.typical) * size;
                    }
                    (sparse ? at_[i] : dense ? bt_[i] : ct_[i]).insert(u);
                }
            }
            const int t = h_ * (n_ / (3 * h_));
            const int r = (n_ / h_) % 3;
            std::array<int, 3> order{0, 1, 2};
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return at_[a].size() > at_[b].size(); });
            for (int p = 0; p < 3; ++p)
                target_[order[p]] = t + (p < r ? h_ : 0);
            std::string detail;
            for (int i = 0; i < num_classes; ++i)
                detail += "class " + std::to_string(i + 1) + ": typical-sparse " + std::to_string(at_[i].size()) + ", typical-dense " +
                    std::to_string(bt_[i].size()) + ", other " + std::to_string(ct_[i].size()) + ", target " + std::to_string(target_[i]) +
                    (i + 1 < num_classes ? "; " : "");
            trace_.push_back({"part1.typical", "ok", detail});
        }

        // Star centres leave oversized sets and are bound to the triple of their leaves.
        auto step1() -> bool
        {
            std::array<int, 3> d{};
            for (int i = 0; i < 3; ++i) {
                const int excess = at_[i].size() - target_[i];
                d[i] = excess > 0 ? excess + h_ - 1 : 0;
            }
            auto r = star_family_tripartite(at_, g_, h_, d, cfg_.epsilon, n_ / 3);
            if (auto * c = std::get_if<StarCertificate>(&r)) {
                trace_.push_back({"part1.step1", "fail",
                    "star greedy stalled with |S| = " + std::to_string(c->s.size()) + " below quota " + std::to_string(c->quota)});
                return false;
            }
            const auto & f = std::get<StarFamily>(r);
            for (const auto & st : f.stars) {
                at_[st.center.cls].erase(st.center.offset);
                home_[st.center.cls][st.center.offset] = st.leaf_class;
                Group grp{st.leaf_class, {}};
                grp.parts[st.center.cls] = {st.center.offset};
                grp.parts[st.leaf_class] = st.leaves;
                groups_.push_back(std::move(grp));
            }
            trace_.push_back({"part1.step1", "ok", std::to_string(f.stars.size()) + " stars"});
            return true;
        }

        // Undersized sets take a K_{1,h,h} centre from the B-side, or failing that
        // its most sparse free vertex.
        auto step2() -> bool
        {
            int superstars = 0, moved = 0;
            for (int i = 0; i < num_classes; ++i) {
                const int j = (i + 1) % 3, k = (i + 2) % 3;
                while (at_[i].size() < target_[i]) {
                    std::array<Bits, num_classes> pool;
                    pool[i] = Bits(static_cast<std::size_t>(n_));
                    for (int c : {j, k}) {
                        pool[c] = bt_[c].bits() - at_[c].bits();
                        for (int u = 0; u < n_; ++u)
                            if (home_[c][u] >= 0)
                                pool[c].reset(static_cast<std::size_t>(u));
                    }
                    std::vector<int> candidates;
                    for (const auto * s : {&ct_[i], &bt_[i]})
                        for (int u : s->offsets())
                            if (! at_[i].contains(u) && home_[i][u] < 0)
                                candidates.push_back(u);
                    if (candidates.empty()) {
                        trace_.push_back({"part1.step2", "fail", "class " + std::to_string(i + 1) + " has no free vertex to move"});
                        return false;
                    }

                    bool found = false;
                    for (int v : candidates) {
                        std::uint64_t budget = 2000;
                        Parts chosen;
                        chosen[i] = {v};
                        std::array<int, num_classes> need{};
                        need[j] = need[k] = h_;
                        if (auto copy = complete_copy(g_, chosen, need, pool, budget)) {
                            at_[i].insert(v);
                            for (int c : {j, k})
                                for (int u : (*copy)[c])
                                    home_[c][u] = i;
                            groups_.push_back({i, *copy});
                            ++superstars;
                            found = true;
                            break;
                        }
                    }
                    if (found)
                        continue;
                    auto sparse_key = [&](int u) {
                        return count_in(g_, {i, u}, w_.sets[j]) + count_in(g_, {i, u}, w_.sets[k]);
                    };
                    const int v = *std::min_element(candidates.begin(), candidates.end(), [&](int a, int b) { return sparse_key(a) < sparse_key(b); });
                    at_[i].insert(v);
                    ++moved;
                }
            }
            trace_.push_back({"part1.step2", "ok", std::to_string(superstars) + " K_{1,h,h} centres, " + std::to_string(moved) + " plain moves"});
            return true;
        }

        // assign_[i][u] = triple of a B-side vertex: the class whose A-set it is completed with.
        auto assign_triples(int attempt) -> bool
        {
            Rng rng(derive_seed(cfg_.seed, 0x3000 + static_cast<std::uint64_t>(attempt)));
            for (int i = 0; i < num_classes; ++i) {
                assign_[i].assign(static_cast<std::size_t>(n_), -1);
                std::array<int, num_classes> room{};
                for (int k = 0; k < num_classes; ++k)
                    room[k] = k == i ? 0 : target_[k];
                std::vector<int> atypical, typical;
                for (int u : b_side(i).offsets()) {
                    if (home_[i][u] >= 0) {
                        assign_[i][u] = home_[i][u];
                        if (--room[home_[i][u]] < 0)
                            return false;
                    }
                    else if (ct_[i].contains(u))
                        atypical.push_back(u);
                    else
                        typical.push_back(u);
                }
                const int j = (i + 1) % 3, k = (i + 2) % 3;
                auto score = [&](int u, int c) { return Rational(count_in(g_, {i, u}, at_[c]), std::max(1, at_[c].size())); };
                auto strength = [&](int u) {
                    const auto d = score(u, j) - score(u, k);
                    return d < Rational(0) ? -d : d;
                };
                std::stable_sort(atypical.begin(), atypical.end(), [&](int a, int b) { return strength(a) > strength(b); });
                for (int u : atypical) {
                    int pick = score(u, j) >= score(u, k) ? j : k;
                    if (room[pick] == 0)
                        pick = pick == j ? k : j;
                    assign_[i][u] = pick;
                    --room[pick];
                }
                std::shuffle(typical.begin(), typical.end(), rng);
                for (int u : typical) {
                    const int pick = room[j] > 0 ? j : k;
                    assign_[i][u] = pick;
                    --room[pick];
                }
            }
            return true;
        }

        auto triple_part(int cls, int triple) const -> VertexSet
        {
            if (cls == triple)
                return at_[cls];
            VertexSet s(cls, n_);
            for (int u = 0; u < n_; ++u)
                if (assign_[cls][u] == triple)
                    s.insert(u);
            return s;
        }

        // A B-vertex may miss its half of another B-side at most `typical` more
        // often than it misses that side as a whole.
        auto proportion_violations() const -> int
        {
            int bad = 0;
            for (int i = 0; i < num_classes; ++i)
                for (int u = 0; u < n_; ++u) {
                    const int k = assign_[i][u];
                    if (k < 0)
                        continue;
                    const int j = third_class(i, k);
                    const auto half = triple_part(j, k);
                    const auto whole = b_side(j);
                    if (half.size() == 0 || whole.size() == 0)
                        continue;
                    const Rational miss_half(half.size() - count_in(g_, {i, u}, half), half.size());
                    const Rational miss_whole(whole.size() - count_in(g_, {i, u}, whole), whole.size());
                    if (miss_half > miss_whole + cfg_.typical)
                        ++bad;
                }
            return bad;
        }

        auto solve_triple(int k, int attempt, std::vector<KhhhCopy> & copies, Part1Result & r) -> bool
        {
            std::array<VertexSet, num_classes> part;
            for (int c = 0; c < num_classes; ++c)
                part[c] = triple_part(c, k);

            for (const auto & grp : groups_) {
                if (grp.triple != k)
                    continue;
                bool inside = true;
                std::array<int, num_classes> need{};
                for (int c = 0; c < num_classes; ++c) {
                    for (int u : grp.parts[c])
                        inside = inside && part[c].contains(u);
                    need[c] = h_ - static_cast<int>(grp.parts[c].size());
                }
                if (! inside)
                    continue;
                std::array<Bits, num_classes> pool;
                for (int c = 0; c < num_classes; ++c)
                    pool[c] = part[c].bits();
                std::uint64_t budget = 2000;
                if (auto copy = complete_copy(g_, grp.parts, need, pool, budget)) {
                    for (int c = 0; c < num_classes; ++c)
                        for (int u : (*copy)[c])
                            part[c].erase(u);
                    copies.push_back(KhhhCopy{*copy});
                }
            }

            const int i = (k + 1) % 3, j = (k + 2) % 3;
            KhhSearchOptions opts;
            opts.seed = derive_seed(cfg_.seed, 0x4000 + static_cast<std::uint64_t>(attempt) * 3 + static_cast<std::uint64_t>(k));
            opts.shuffles = cfg_.effort;
            opts.node_budget = cfg_.local_node_budget / static_cast<std::uint64_t>(std::max(1, cfg_.retries));
            opts.swap_evaluations = cfg_.swap_evaluations / static_cast<std::uint64_t>(std::max(1, cfg_.retries));
            auto pair = khh_factor_or_theta(part[i], part[j], g_, h_, cfg_.epsilon, opts);
            if (auto * split = std::get_if<ThetaSplitWitness>(&pair)) {
                r.split = *split;
                return false;
            }
            auto * f = std::get_if<KhhFactor>(&pair);
            if (! f)
                return false;
            auto ext = extend_to_khhh(g_, h_, part[k], *f);
            auto * done = std::get_if<std::vector<KhhhCopy>>(&ext);
            if (! done)
                return false;
            copies.insert(copies.end(), done->begin(), done->end());
            return true;
        }

        const TripartiteGraph & g_;
        int h_, n_;
        const ExtremeWitness & w_;
        const SolveConfig & cfg_;
        std::vector<StageRecord> & trace_;
        std::array<VertexSet, num_classes> at_, bt_, ct_;
        std::array<int, num_classes> target_{};
        std::array<std::vector<int>, num_classes> home_;
        std::array<std::vector<int>, num_classes> assign_;
        std::vector<Group> groups_;
    };

    auto density_summary(const ApproxWitness & w) -> std::string
    {
        Rational worst(0);
        for (const auto & d : w.densities)
            worst = std::max(worst, d.density);
        return "largest nonedge-block density " + rational_text(worst);
    }

    auto structure_stage(const TripartiteGraph & g, int h, const SolveConfig & cfg, std::optional<ExtremeWitness> extreme, bool reached_pairs,
        std::vector<StageRecord> & trace) -> StructureReport
    {
        StructureReport s;
        s.extreme = std::move(extreme);
        const int n = g.n();
        FitOptions fit;
        fit.restarts = cfg.effort;
        if (n >= 3) {
            auto theta = fit_approx(g, PatternGraph::theta(3, 3), cfg.delta, derive_seed(cfg.seed, 0x5001), fit);
            if (auto * w = std::get_if<ApproxWitness>(&theta)) {
                trace.push_back({"structure.theta33", "fit", density_summary(*w)});
                s.theta33 = std::move(*w);
            }
            else
                trace.push_back({"structure.theta33", "none", std::get<NotFound>(theta).reason});

            auto gamma = fit_approx(g, PatternGraph::gamma3(), cfg.delta, derive_seed(cfg.seed, 0x5002), fit);
            if (auto * w = std::get_if<ApproxWitness>(&gamma)) {
                trace.push_back({"structure.gamma3", "fit", density_summary(*w)});
                s.gamma3 = std::move(*w);
            }
            else
                trace.push_back({"structure.gamma3", "none", std::get<NotFound>(gamma).reason});
        }

        if (s.gamma3) {
            if ((n / h) % 6 == 3) {
                auto v = check_very_extreme(g, h, nine_sets_from_assignment(g, s.gamma3->block_of));
                if (auto * w = std::get_if<VeryExtremeWitness>(&v)) {
                    s.very_extreme = std::move(*w);
                    s.very_extreme_note = "every vertex misses at most 3h-3 vertices of each adjacent block";
                }
                else
                    s.very_extreme_note = std::get<Violation>(v).message;
            }
            else
                s.very_extreme_note = "N is not an odd multiple of 3h";
            trace.push_back({"structure.very_extreme", s.very_extreme ? "yes" : "no", s.very_extreme_note});
        }

        if (s.very_extreme)
            s.branch = Branch::very_extreme;
        else if (s.gamma3)
            s.branch = Branch::part3b;
        else if (s.theta33)
            s.branch = Branch::part3a;
        else if (s.extreme)
            s.branch = reached_pairs ? Branch::part2 : Branch::part1;
        trace.push_back({"structure", branch_name(s.branch), ""});
        return s;
    }
}

auto solve(const TripartiteGraph & g, int h, const SolveConfig & config) -> SolveResult
{
    if (h < 1)
        throw std::invalid_argument("h must be positive");
    const int n = g.n();
    if (n % h != 0)
        throw IndivisibleN("N = " + std::to_string(n) + " is not divisible by h = " + std::to_string(h));

    SolveResult res;
    res.thresholds = threshold_report(g, h);
    const auto & t = res.thresholds;
    res.trace.push_back({"thresholds", t.bar_min_degree >= t.upper_level ? "above" : t.bar_min_degree >= t.extreme_level ? "extreme" : "below",
        "bar_min_degree " + std::to_string(t.bar_min_degree) + ", levels " + std::to_string(t.construction_level) + " / " +
            std::to_string(t.extreme_level) + " / " + std::to_string(t.upper_level)});

    auto accept = [&](FactorCertificate f, const std::string & stage) {
        canonicalize(f);
        if (auto v = verify_factor(g, h, f); ! v)
            throw std::logic_error(stage + " produced an invalid factor: " + v.first_violation);
        res.outcome = SolveOutcome::factor;
        res.factor = std::move(f);
        res.factor_stage = stage;
    };

    auto cross_check = [&] {
        if (! config.columns)
            return;
        auto c = g3_no_factor_certificate(g, *config.columns, h);
        if (auto * cert = std::get_if<NoFactorCertificate>(&c)) {
            if (res.factor)
                throw std::logic_error("column argument applies to a graph with a factor");
            res.column_check = std::move(*cert);
            res.trace.push_back({"columns", "applies", "copies needed " + std::to_string(res.column_check->premises.copies_needed) +
                                                           " > available " + std::to_string(res.column_check->premises.copies_available)});
        }
        else
            res.trace.push_back({"columns", "not applicable", std::get<NotApplicable>(c).reason});
    };

    if (! config.exact_only && n > 0) {
        const auto v2 = VertexSet::full(1, n), v3 = VertexSet::full(2, n);
        const int attempts = config.direct ? std::max(1, config.retries) : 0;
        for (int a = 0; a < attempts && ! res.factor; ++a) {
            ClusterOptions o;
            o.by_common_neighbourhood = a % 3 != 0;
            o.count_third_class = a % 3 == 2;
            if (a >= 3)
                o.shuffle_seed = derive_seed(config.seed, static_cast<std::uint64_t>(a));
            auto khh = cluster_khh_factor(v2, v3, g, h, o);
            auto * f = std::get_if<KhhFactor>(&khh);
            if (! f)
                continue;
            auto ext = extend_to_khhh(g, h, *f);
            if (auto * cert = std::get_if<FactorCertificate>(&ext)) {
                res.trace.push_back({"direct", "factor", "attempt " + std::to_string(a + 1)});
                accept(std::move(*cert), "direct");
            }
        }
        if (! res.factor && config.direct) {
            const auto v1 = VertexSet::full(0, n);
            auto local = SwapSearch(g, h, v2, v3, v1)
                             .run(cut_clusters(g, h, v2, v3, {std::nullopt, true, true}), derive_seed(config.seed, 0x1000), config.swap_evaluations);
            if (local.copies) {
                res.trace.push_back({"direct", "factor", "cluster swap search"});
                accept(FactorCertificate{std::move(*local.copies)}, "direct");
            }
        }
        if (res.factor) {
            cross_check();
            return res;
        }
        res.trace.push_back({"direct", "fail", std::to_string(attempts) + " clusterings and a swap search"});

        std::optional<ExtremeWitness> extreme;
        bool reached_pairs = false;
        if (n >= 3) {
            DetectOptions d;
            d.restarts = config.effort;
            auto e = detect_extreme(g, config.gamma, derive_seed(config.seed, 0x2000), d);
            if (auto * w = std::get_if<ExtremeWitness>(&e)) {
                extreme = *w;
                res.trace.push_back({"extreme", "found", "densities " + rational_text(w->densities[0]) + ", " + rational_text(w->densities[1]) +
                                                             ", " + rational_text(w->densities[2])});
                if (n >= 3 * h) {
                    auto p = Part1(g, h, *w, config, res.trace).run();
                    reached_pairs = p.reached_pairs;
                    if (p.factor)
                        accept(std::move(*p.factor), "part1");
                }
            }
            else
                res.trace.push_back({"extreme", "none", std::get<NotFound>(e).reason});
        }
        if (res.factor) {
            cross_check();
            return res;
        }
        res.structure = structure_stage(g, h, config, std::move(extreme), reached_pairs, res.trace);
    }

    auto exact = find_factor_exact(g, h, {config.node_budget, config.threads});
    if (auto * f = std::get_if<FactorCertificate>(&exact)) {
        res.trace.push_back({"exact", "factor", ""});
        accept(std::move(*f), "exact");
    }
    else if (auto * c = std::get_if<NoFactorCertificate>(&exact)) {
        if (auto v = check_no_factor(g, h, *c, {config.node_budget, config.threads}); ! v)
            throw std::logic_error("exact search produced an unverifiable no-factor certificate: " + v.first_violation);
        res.trace.push_back({"exact", "no factor", std::to_string(c->nodes) + " nodes"});
        res.outcome = SolveOutcome::no_factor;
        res.no_factor = std::move(*c);
    }
    else {
        auto & u = std::get<Unknown>(exact);
        res.trace.push_back({"exact", "unknown", u.reason});
        res.unknown = std::move(u);
    }
    cross_check();
    if (! res.factor && ! res.no_factor) {
        if (res.column_check && check_no_factor(g, h, *res.column_check)) {
            res.outcome = SolveOutcome::no_factor;
            res.no_factor = res.column_check;
        }
        else
            res.outcome = res.structure && res.structure->branch != Branch::none ? SolveOutcome::structure_only : SolveOutcome::unknown;
    }
    return res;
}

}
