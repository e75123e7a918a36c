// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <tiling/constructions.hh>
#include <tiling/exact_solver.hh>
#include <tiling/random.hh>
#include <tiling/scan.hh>
#include <tiling/structure.hh>
#include <tiling/tiler.hh>

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "oracles.hh"

using namespace tiling;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    auto ceil_div(int a, int b) -> int { return (a + b - 1) / b; }

    // ---- 1 ----

    auto gamma3_no_factor() -> Outcome
    {
        const auto start = std::chrono::steady_clock::now();
        std::ostringstream detail;
        bool pass = true;
        for (int m : {1, 3}) {
            auto g = blowup(PatternGraph::gamma3(), uniform_block_sizes(PatternGraph::gamma3(), m)).graph;
            auto r = find_factor_exact(g, 1);
            const auto * c = std::get_if<NoFactorCertificate>(&r);
            const bool exhausted = c && c->kind == NoFactorKind::exhausted_search;
            const int expected = 2 * m;
            pass = pass && exhausted && bar_min_degree(g) == expected && oracle::slow_bar_min_degree(g) == expected;
            detail << "N=" << g.n() << ": " << (exhausted ? "exhausted" : "NOT exhausted") << ", bar_min_degree " << bar_min_degree(g) << "; ";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        pass = pass && secs < 1.0;
        detail << "total " << secs << " s (limit 1 s)";
        return {pass, detail.str()};
    }

    // ---- 2 ----

    auto g3_lower_bound() -> Outcome
    {
        std::ostringstream detail;
        bool pass = true;
        int built = 0;
        for (auto [h, q, r] : std::vector<std::array<int, 3>>{{3, 1, 1}, {3, 1, 2}, {4, 1, 1}}) {
            std::optional<G3Instance> inst;
            G3Params p{h, q, r};
            for (int attempt = 0; attempt < 2 && ! inst; ++attempt, ++p.q) {
                try {
                    inst = g3_construction(p, 0);
                } catch (const Infeasible & e) {
                    detail << "G3(" << p.h << "," << p.q << "," << p.r << ") skipped: Q(" << e.n << "," << e.d << ") infeasible; ";
                }
            }
            if (! inst)
                continue;
            ++built;
            const auto start = std::chrono::steady_clock::now();
            const int n = inst->params.n(), hh = inst->params.h;
            const int expected = hh * ceil_div(2 * n, 3 * hh) + hh - 3;
            const int bar = oracle::slow_bar_min_degree(inst->graph);
            auto cert = g3_no_factor_certificate(inst->graph, inst->column_of, hh);
            const bool column_ok = std::holds_alternative<NoFactorCertificate>(cert)
                && check_no_factor(inst->graph, hh, std::get<NoFactorCertificate>(cert));
            ExactOptions eo;
            eo.node_budget = 100'000'000;
            auto exact = find_factor_exact(inst->graph, hh, eo);
            const bool exact_ok = std::holds_alternative<NoFactorCertificate>(exact);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            const bool ok = bar == expected && column_ok && exact_ok && secs < 600;
            pass = pass && ok;
            detail << "G3(" << inst->params.h << "," << inst->params.q << "," << inst->params.r << "): N=" << n << " bar_min_degree " << bar
                   << " (expected " << expected << "), column certificate " << (column_ok ? "valid" : "INVALID") << ", exact search "
                   << (exact_ok ? "no factor" : "NOT settled") << ", " << secs << " s; ";
        }
        if (built == 0)
            pass = false;
        detail << built << " instance(s) built";
        return {pass, detail.str()};
    }

    // ---- 3 ----

    // Exhaustive C4 scan of pair (i, j): some two vertices of class i share two
    // neighbours in class j. Uses neighbour lists read edge by edge.
    auto has_c4(const TripartiteGraph & g, int i, int j) -> bool
    {
        const int n = g.n();
        std::set<std::pair<int, int>> seen;
        for (int v = 0; v < n; ++v) {
            std::vector<int> nb;
            for (int u = 0; u < n; ++u)
                if (g.has_edge({i, u}, {j, v}))
                    nb.push_back(u);
            for (std::size_t a = 0; a < nb.size(); ++a)
                for (std::size_t b = a + 1; b < nb.size(); ++b)
                    if (! seen.insert({nb[a], nb[b]}).second)
                        return true;
        }
        return false;
    }

    auto regular(const TripartiteGraph & g, int d) -> bool
    {
        for (int i = 0; i < num_classes; ++i)
            for (int j = 0; j < num_classes; ++j)
                for (int u = 0; i != j && u < g.n(); ++u) {
                    int deg = 0;
                    for (int v = 0; v < g.n(); ++v)
                        deg += g.has_edge({i, u}, {j, v});
                    if (deg != d)
                        return false;
                }
        return true;
    }

    auto q_graph_properties() -> Outcome
    {
        int generated = 0, infeasible = 0, violations = 0;
        std::string first;
        for (int n = 1; n <= 200; ++n)
            for (int d = 0; d <= 6; ++d) {
                QGraph q;
                try {
                    q = q_graph(n, d, static_cast<std::uint64_t>(n * 7 + d));
                } catch (const Infeasible &) {
                    ++infeasible;
                    continue;
                }
                ++generated;
                bool ok = oracle::count_triangles(q.graph) == 0 && regular(q.graph, d);
                for (int i = 0; i < 3 && ok; ++i)
                    for (int j = i + 1; j < 3 && ok; ++j)
                        ok = ! has_c4(q.graph, i, j);
                if (! ok) {
                    ++violations;
                    if (first.empty())
                        first = " first violation at Q(" + std::to_string(n) + "," + std::to_string(d) + ")";
                }
            }
        return {violations == 0 && generated > 0,
            std::to_string(generated) + " generated, " + std::to_string(infeasible) + " infeasible, " + std::to_string(violations)
                + " violations" + first};
    }

    // ---- 4 ----

    auto oracle_equivalence() -> Outcome
    {
        int disagreements = 0, exhaustive = 0, sampled = 0, with_factor = 0;
        for (std::uint64_t code = 0; code < 4096; ++code) {
            auto g = oracle::graph_from_code(2, code);
            const bool exact = std::holds_alternative<FactorCertificate>(find_factor_exact(g, 1));
            disagreements += exact != brute_force_oracle(g, 1);
            ++exhaustive;
        }
        const std::vector<std::pair<int, int>> shapes{{3, 1}, {4, 1}, {5, 1}, {4, 2}};
        const int per_shape = 25'000;
        for (std::size_t s = 0; s < shapes.size(); ++s) {
            auto [n, h] = shapes[s];
            Rng rng(derive_seed(4, s));
            for (int k = 0; k < per_shape; ++k) {
                const double p = std::uniform_real_distribution<double>(0.4, 0.95)(rng);
                auto g = oracle::random_graph(n, p, rng);
                auto e = find_factor_exact(g, h);
                if (std::holds_alternative<Unknown>(e)) {
                    ++disagreements;
                    continue;
                }
                const bool exact = std::holds_alternative<FactorCertificate>(e);
                with_factor += exact;
                disagreements += exact != brute_force_oracle(g, h);
                ++sampled;
            }
        }
        return {disagreements == 0 && exhaustive == 4096 && sampled == 100'000,
            std::to_string(exhaustive) + " exhaustive graphs at N=2, " + std::to_string(sampled) + " random samples (" + std::to_string(with_factor)
                + " with a factor), " + std::to_string(disagreements) + " disagreements"};
    }

    // ---- 5 ----

    struct StarInstance
    {
        TripartiteGraph graph;
        std::array<VertexSet, 3> sets;
        std::array<int, 3> d{};
        int m = 0;
    };

    // Every vertex of the other two sets gets at least d_i neighbours in A_i;
    // concentrated instances draw them from a small pool.
    auto star_instance(int h, Rational eps, Rng & rng) -> StarInstance
    {
        StarInstance s;
        const int need = h * static_cast<int>(boost::rational_cast<double>(1 / eps)) + 1;
        s.m = need + static_cast<int>(rng() % 40);
        const int slack = std::max(0, static_cast<int>(boost::rational_cast<double>(eps * Rational(s.m))) - 1);
        const int n = s.m + slack + 2;
        std::array<std::vector<int>, 3> members;
        for (int c = 0; c < 3; ++c) {
            const int size = s.m - slack + static_cast<int>(rng() % static_cast<unsigned>(2 * slack + 1));
            std::vector<int> all(static_cast<std::size_t>(n));
            std::iota(all.begin(), all.end(), 0);
            std::shuffle(all.begin(), all.end(), rng);
            all.resize(static_cast<std::size_t>(size));
            std::sort(all.begin(), all.end());
            members[c] = all;
            s.sets[c] = VertexSet::of(c, n, all);
        }
        int dmax = 0;
        while (Rational(dmax + 1) < eps * Rational(s.m))
            ++dmax;
        for (int c = 0; c < 3; ++c)
            s.d[c] = static_cast<int>(rng() % static_cast<unsigned>(dmax + 1));

        GraphBuilder b(n);
        const bool concentrated = rng() % 2 == 0;
        for (int c = 0; c < 3; ++c)
            for (int leaf : {(c + 1) % 3, (c + 2) % 3}) {
                auto pool = members[c];
                std::shuffle(pool.begin(), pool.end(), rng);
                if (concentrated)
                    pool.resize(std::min(pool.size(), static_cast<std::size_t>(s.d[c] + h)));
                for (int v : members[leaf]) {
                    std::shuffle(pool.begin(), pool.end(), rng);
                    const int k = std::min(static_cast<int>(pool.size()), s.d[c] + static_cast<int>(rng() % 3));
                    for (int t = 0; t < k; ++t)
                        b.add_edge({c, pool[static_cast<std::size_t>(t)]}, {leaf, v});
                }
            }
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                for (int t = 0; t < n; ++t)
                    b.add_edge({i, static_cast<int>(rng() % n)}, {j, static_cast<int>(rng() % n)});
        s.graph = std::move(b).build();
        return s;
    }

    auto star_lemma() -> Outcome
    {
        int instances = 0, met = 0, certificates = 0, hypotheses_failed = 0;
        for (int h : {2, 3}) {
            const Rational eps(1, 2 * (h + 2) * (h + 1) * h + 1);
            Rng rng(derive_seed(5, static_cast<std::uint64_t>(h)));
            for (int trial = 0; trial < 1000; ++trial) {
                auto s = star_instance(h, eps, rng);
                ++instances;
                auto r = star_family_tripartite(s.sets, s.graph, h, s.d, eps, s.m);
                if (auto * f = std::get_if<StarFamily>(&r)) {
                    std::vector<int> quotas;
                    for (int x : s.d)
                        quotas.push_back(std::max(0, x - h + 1));
                    if (! f->hypotheses.all())
                        ++hypotheses_failed;
                    else if (verify_star_family(s.graph, h, {s.sets[0], s.sets[1], s.sets[2]}, quotas, *f))
                        ++met;
                } else {
                    ++certificates;
                }
            }
        }

        // Hypotheses violated on purpose: leaf-side neighbourhoods squeezed into
        // h - 1 centres, or d above epsilon m.
        int adversarial = 0, adversarial_certs = 0, bad_certs = 0;
        Rng rng(55);
        for (int trial = 0; trial < 300; ++trial) {
            const int h = 2 + trial % 2, n = 12 + static_cast<int>(rng() % 20);
            GraphBuilder b(n);
            const int pool = trial % 3 == 0 ? h - 1 : 1 + static_cast<int>(rng() % (2 * h));
            for (int c = 0; c < 3; ++c)
                for (int v = 0; v < n; ++v)
                    for (int k = 0; k < pool; ++k)
                        if (bernoulli(rng, 0.8))
                            b.add_edge({c, static_cast<int>(rng() % n)}, {(c + 1) % 3, v});
            auto g = std::move(b).build();
            const std::array<VertexSet, 3> sets{VertexSet::full(0, n), VertexSet::full(1, n), VertexSet::full(2, n)};
            const std::array<int, 3> d{h + static_cast<int>(rng() % n / 2), h + static_cast<int>(rng() % n / 2), static_cast<int>(rng() % n)};
            ++adversarial;
            auto check = [&](const std::variant<StarFamily, StarCertificate> & r, const std::vector<VertexSet> & ss, const std::vector<int> & qs) {
                if (auto * c = std::get_if<StarCertificate>(&r)) {
                    ++adversarial_certs;
                    bad_certs += ! verify_star_certificate(g, *c);
                } else if (! verify_star_family(g, h, ss, qs, std::get<StarFamily>(r))) {
                    ++bad_certs;
                }
            };
            std::vector<int> qs;
            for (int x : d)
                qs.push_back(std::max(0, x - h + 1));
            check(star_family_tripartite(sets, g, h, d), {sets[0], sets[1], sets[2]}, qs);
            check(star_family_bipartite(sets[0], sets[1], g, h, d[0]), {sets[0], sets[1]}, {qs[0], 0});
        }
        const bool pass = met == instances && certificates == 0 && hypotheses_failed == 0 && bad_certs == 0 && adversarial_certs > 0;
        return {pass, std::to_string(met) + "/" + std::to_string(instances) + " hypothesis instances met every quota, " + std::to_string(certificates)
                + " certificates, " + std::to_string(hypotheses_failed) + " generator misses; adversarial: " + std::to_string(adversarial_certs)
                + " certificates from " + std::to_string(adversarial) + " instances, " + std::to_string(bad_certs) + " failed to re-verify"};
    }

    // ---- 6 ----

    // Random deletions while every vertex misses at most `limit` vertices of
    // each other class.
    auto near_complete(int n, int limit, Rng & rng) -> TripartiteGraph
    {
        auto b = oracle::complete_graph(n).to_builder();
        std::array<std::array<std::vector<int>, 3>, 3> miss;
        for (auto & row : miss)
            for (auto & v : row)
                v.assign(static_cast<std::size_t>(n), 0);
        const int tries = 3 * n * n;
        for (int t = 0; t < tries; ++t) {
            const int i = static_cast<int>(rng() % 3), j = (i + 1 + static_cast<int>(rng() % 2)) % 3;
            const int u = static_cast<int>(rng() % n), v = static_cast<int>(rng() % n);
            if (! b.has_edge({i, u}, {j, v}) || miss[i][j][u] >= limit || miss[j][i][v] >= limit)
                continue;
            b.remove_edge({i, u}, {j, v});
            ++miss[i][j][u];
            ++miss[j][i][v];
        }
        return std::move(b).build();
    }

    auto factor_completion() -> Outcome
    {
        int trials = 0, bipartite_ok = 0, tripartite_ok = 0;
        Rng rng(6);
        for (int t = 0; t < 1000; ++t) {
            const int h = 1 + t % 3;
            const int n = h * (1 + static_cast<int>(rng() % static_cast<unsigned>(60 / h)));
            ++trials;
            // The pair bound (1 - 1/2h^2)M, checked on the (2,3) pair alone.
            {
                const int limit = n / (2 * h * h);
                auto g = near_complete(n, limit, rng);
                auto r = cluster_khh_factor(VertexSet::full(1, n), VertexSet::full(2, n), g, h);
                if (auto * f = std::get_if<KhhFactor>(&r))
                    bipartite_ok += static_cast<bool>(verify_khh_factor(g, h, VertexSet::full(1, n), VertexSet::full(2, n), *f));
            }
            // The tripartite bound (1 - 1/4h^2)M: factor on (2,3), then extend.
            {
                const int limit = n / (4 * h * h);
                auto g = near_complete(n, limit, rng);
                auto r = cluster_khh_factor(VertexSet::full(1, n), VertexSet::full(2, n), g, h);
                if (auto * f = std::get_if<KhhFactor>(&r)) {
                    auto e = extend_to_khhh(g, h, *f);
                    if (auto * c = std::get_if<FactorCertificate>(&e))
                        tripartite_ok += static_cast<bool>(verify_factor(g, h, *c));
                }
            }
        }
        return {bipartite_ok == trials && tripartite_ok == trials,
            "pair bound " + std::to_string(bipartite_ok) + "/" + std::to_string(trials) + ", tripartite bound " + std::to_string(tripartite_ok) + "/"
                + std::to_string(trials)};
    }

    // ---- 7, 8 ----

    auto threshold_scan() -> Outcome
    {
        std::ostringstream detail;
        bool pass = true;
        for (int n : {3, 6}) {
            ScanOptions o;
            o.h = 1;
            o.n = n;
            o.levels = {2 * n / 3 + 1};
            o.samples = 10'000;
            o.exhaustive = true;
            o.config.seed = 7;
            auto r = run_scan(o);
            const auto & lv = r.levels[0];
            const bool ok = lv.no_factor == 0 && lv.unknown == 0 && lv.factor == o.samples && lv.oracle_checked == o.samples;
            pass = pass && ok;
            detail << "N=" << n << " level " << lv.level << ": " << lv.factor << "/" << lv.samples << " factor (" << lv.oracle_checked
                   << " oracle-checked); ";
        }
        ScanOptions o;
        o.h = 1;
        o.n = 3;
        o.levels = {1};
        o.samples = 10'000;
        o.exhaustive = true;
        o.max_exemplars = 200;
        o.config.seed = 7;
        auto r = run_scan(o);
        const auto & lv = r.levels[0];
        int within = 0;
        for (const auto & e : lv.exemplars)
            within += e.within_gamma3;
        pass = pass && within > 0;
        detail << "N=3 level 1: " << lv.no_factor << " without factor, " << within << " of " << lv.exemplars.size()
               << " kept exemplars lie inside the Gamma_3 pattern";
        return {pass, detail.str()};
    }

    auto upper_bound_scan() -> Outcome
    {
        ScanOptions o;
        o.h = 2;
        o.n = 12;
        o.levels = {11};
        o.samples = 1000;
        o.config.seed = 8;
        auto r = run_scan(o);
        const auto & lv = r.levels[0];
        return {r.theorem_contradictions == 0 && lv.no_factor == 0 && lv.unknown == 0,
            "level " + std::to_string(lv.level) + " (upper level " + std::to_string(r.upper_level) + "): " + std::to_string(lv.factor) + " factor, "
                + std::to_string(lv.no_factor) + " no factor, " + std::to_string(lv.unknown) + " unknown, " + std::to_string(r.theorem_contradictions)
                + " contradiction exemplars"};
    }

    // ---- 9 ----

    // Same partition of every part up to renaming blocks.
    auto same_partition(const BlockAssignment & planted, const ApproxWitness & w) -> bool
    {
        for (std::size_t p = 0; p < w.parts.size(); ++p) {
            const int c = w.parts[p].cls();
            std::map<int, int> forward, backward;
            for (int u = 0; u < static_cast<int>(planted[c].size()); ++u) {
                const int a = planted[c][static_cast<std::size_t>(u)], b = w.block_of[p][static_cast<std::size_t>(u)];
                if (forward.emplace(a, b).first->second != b || backward.emplace(b, a).first->second != a)
                    return false;
            }
        }
        return true;
    }

    auto structure_detectors() -> Outcome
    {
        std::ostringstream detail;
        bool pass = true;
        for (const auto & pattern : {PatternGraph::theta(3, 3), PatternGraph::gamma3()}) {
            int recovered = 0;
            for (int t = 0; t < 100; ++t) {
                const auto seed = derive_seed(9, static_cast<std::uint64_t>(t));
                auto b = noisy_blowup(pattern, uniform_block_sizes(pattern, 10), 0.01, seed);
                auto fit = fit_approx(b.graph, pattern, Rational(1, 20), seed);
                if (auto * w = std::get_if<ApproxWitness>(&fit))
                    recovered += same_partition(b.block_of, *w);
            }
            pass = pass && recovered >= 95;
            detail << pattern.name() << " recovered " << recovered << "/100; ";
        }

        int accepted = 0, accept_trials = 0, rejected = 0, reject_trials = 0;
        Rng rng(99);
        const auto gamma3 = PatternGraph::gamma3();
        for (int h = 1; h <= 3; ++h)
            for (int mult : {9, 21}) {
                const int n = mult * h;
                auto b = blowup(gamma3, uniform_block_sizes(gamma3, n / 3));
                auto sets = nine_sets_from_assignment(b.graph, assignment_from_blocks(b.block_of, 3));
                ++accept_trials;
                accepted += std::holds_alternative<VeryExtremeWitness>(check_very_extreme(b.graph, h, sets));
                for (int t = 0; t < 20; ++t) {
                    // One vertex loses 3h - 2 neighbours inside one adjacent block.
                    const int c = static_cast<int>(rng() % 3), u = static_cast<int>(rng() % n);
                    const int own = b.block_of[c][static_cast<std::size_t>(u)];
                    std::vector<std::pair<int, int>> adjacent;
                    for (int c2 = 0; c2 < 3; ++c2)
                        for (int j = 0; c2 != c && j < 3; ++j)
                            if (gamma3.adjacent({c, own}, {c2, j}))
                                adjacent.push_back({c2, j});
                    auto [c2, j] = adjacent[rng() % adjacent.size()];
                    auto targets = sets[c2][j].offsets();
                    std::shuffle(targets.begin(), targets.end(), rng);
                    auto builder = b.graph.to_builder();
                    for (int k = 0; k < 3 * h - 2; ++k)
                        builder.remove_edge({c, u}, {c2, targets[static_cast<std::size_t>(k)]});
                    ++reject_trials;
                    rejected += std::holds_alternative<Violation>(check_very_extreme(std::move(builder).build(), h, sets));
                }
            }
        pass = pass && accepted == accept_trials && rejected == reject_trials;
        detail << "very-extreme check accepted " << accepted << "/" << accept_trials << " exact blow-ups, rejected " << rejected << "/"
               << reject_trials << " perturbations";
        return {pass, detail.str()};
    }
}

auto main() -> int
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 Gamma_3 has no triangle factor", gamma3_no_factor},
        {"2 G3 lower-bound construction", g3_lower_bound},
        {"3 Q(n,d) properties", q_graph_properties},
        {"4 exact search agrees with brute force", oracle_equivalence},
        {"5 star families", star_lemma},
        {"6 factor completion", factor_completion},
        {"7 threshold scan, h=1", threshold_scan},
        {"8 upper-bound scan, h=2 N=12", upper_bound_scan},
        {"9 structure detectors", structure_detectors},
    };
    int failed = 0;
    for (const auto & [name, run] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception & e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %s: %s [%.1f s] %s\n", name.c_str(), o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
        std::fflush(stdout);
        failed += ! o.pass;
    }
    return failed == 0 ? 0 : 1;
}
