#include <tiling/constructions.hh>
#include <tiling/random.hh>
#include <tiling/scan.hh>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

namespace tiling {

namespace
{
    struct SampleResult
    {
        SolveOutcome outcome = SolveOutcome::unknown;
        bool oracle_checked = false;
        std::optional<NoFactorCertificate> certificate;
        TripartiteGraph graph;
    };

    auto run_sample(const ScanOptions & o, int level, std::uint64_t seed) -> SampleResult
    {
        SampleResult r;
        auto g = random_graph_with_min_degree(o.n, level, seed);
        const bool tiny = 3 * o.n <= o.config.tiny_bound;
        if (tiny) {
            ExactOptions eo;
            eo.node_budget = o.config.node_budget;
            auto e = find_factor_exact(g, o.h, eo);
            if (std::holds_alternative<FactorCertificate>(e))
                r.outcome = SolveOutcome::factor;
            else if (auto * c = std::get_if<NoFactorCertificate>(&e)) {
                r.outcome = SolveOutcome::no_factor;
                r.certificate = *c;
            }
            if (o.exhaustive && r.outcome != SolveOutcome::unknown) {
                if (brute_force_oracle(g, o.h, o.config.tiny_bound) != (r.outcome == SolveOutcome::factor))
                    throw std::logic_error("exact search and brute force disagree");
                r.oracle_checked = true;
            }
        } else {
            auto s = solve(g, o.h, o.config.solve_config(1));
            r.outcome = s.outcome;
            if (s.no_factor)
                r.certificate = *s.no_factor;
        }
        if (r.outcome == SolveOutcome::no_factor)
            r.graph = std::move(g);
        return r;
    }

    auto within_gamma3(const TripartiteGraph & g) -> bool
    {
        if (g.n() % 3 != 0)
            return false;
        const int m = g.n() / 3;
        FitOptions fo;
        fo.restarts = 16;
        auto fit = fit_approx(g, PatternGraph::gamma3(), Rational(1, m * m + 1), 0, fo);
        return std::holds_alternative<ApproxWitness>(fit);
    }

    auto exemplar_name(const ScanOptions & o, const ScanLevel & level, const ScanExemplar & e) -> std::string
    {
        std::string name = e.theorem_contradiction ? "THEOREM-CONTRADICTION_" : "no_factor_";
        return name + "h" + std::to_string(o.h) + "_N" + std::to_string(o.n) + "_level" + std::to_string(level.level) + "_sample"
            + std::to_string(e.sample);
    }

    void save_exemplar(const ScanOptions & o, const ScanLevel & level, ScanExemplar & e)
    {
        namespace fs = std::filesystem;
        fs::create_directories(o.exemplar_dir);
        const auto base = fs::path(o.exemplar_dir) / exemplar_name(o, level, e);
        e.path = base.string() + ".graph";
        std::ofstream(e.path) << write_graph(e.graph, o.h);
        std::ofstream(base.string() + ".cert.json") << to_json(e.certificate).dump(2) << "\n";
    }
}

auto run_scan(const ScanOptions & o) -> ScanReport
{
    if (o.h < 1 || o.n < 1 || o.n % o.h != 0)
        throw IndivisibleN("h = " + std::to_string(o.h) + " does not divide N = " + std::to_string(o.n));
    if (o.samples < 0)
        throw std::invalid_argument("samples must be non-negative");

    ScanReport report;
    report.h = o.h;
    report.n = o.n;
    report.upper_level = o.h * ((2 * o.n + 3 * o.h - 1) / (3 * o.h)) + 2 * o.h - 1;

    struct Task
    {
        std::size_t level;
        int sample;
        int effective;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t li = 0; li < o.levels.size(); ++li) {
        const int level = o.levels[li];
        if (level < 0)
            throw std::invalid_argument("levels must be non-negative");
        const auto level_seed = derive_seed(o.config.seed, static_cast<std::uint64_t>(level));
        for (int k = 0; k < o.samples; ++k)
            tasks.push_back({li, k, std::min(level, o.n), derive_seed(level_seed, static_cast<std::uint64_t>(k))});
    }

    std::vector<SampleResult> results(tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t t; ! failed && (t = next++) < tasks.size();) {
            try {
                results[t] = run_sample(o, tasks[t].effective, tasks[t].seed);
            } catch (...) {
                if (! failed.exchange(true))
                    failure = std::current_exception();
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(o.workers, static_cast<unsigned>(std::max<std::size_t>(tasks.size(), 1))));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w)
        pool.emplace_back(worker);
    worker();
    for (auto & t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);

    for (int level : o.levels) {
        ScanLevel lv;
        lv.level = level;
        lv.effective_level = std::min(level, o.n);
        report.levels.push_back(std::move(lv));
    }
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        auto & lv = report.levels[tasks[t].level];
        auto & r = results[t];
        ++lv.samples;
        lv.oracle_checked += r.oracle_checked;
        switch (r.outcome) {
        case SolveOutcome::factor:
            ++lv.factor;
            break;
        case SolveOutcome::structure_only:
            ++lv.structure_only;
            break;
        case SolveOutcome::unknown:
            ++lv.unknown;
            break;
        case SolveOutcome::no_factor: {
            ++lv.no_factor;
            ScanExemplar e;
            e.sample = tasks[t].sample;
            e.seed = tasks[t].seed;
            e.bar_min_degree = bar_min_degree(r.graph);
            e.theorem_contradiction = e.bar_min_degree >= report.upper_level;
            report.theorem_contradictions += e.theorem_contradiction;
            if (! e.theorem_contradiction && static_cast<int>(lv.exemplars.size()) >= o.max_exemplars)
                break;
            e.within_gamma3 = within_gamma3(r.graph);
            e.certificate = *r.certificate;
            e.graph = std::move(r.graph);
            if (! o.exemplar_dir.empty())
                save_exemplar(o, lv, e);
            lv.exemplars.push_back(std::move(e));
            break;
        }
        }
    }
    return report;
}

auto to_json(const ScanReport & r) -> Json
{
    Json levels = Json::array();
    for (const auto & lv : r.levels) {
        Json ex = Json::array();
        for (const auto & e : lv.exemplars)
            ex.push_back({{"sample", e.sample},
                {"seed", e.seed},
                {"bar_min_degree", e.bar_min_degree},
                {"theorem_contradiction", e.theorem_contradiction},
                {"within_gamma3", e.within_gamma3},
                {"path", e.path.empty() ? Json() : Json(e.path)},
                {"certificate", to_json(e.certificate)}});
        levels.push_back({{"level", lv.level},
            {"effective_level", lv.effective_level},
            {"samples", lv.samples},
            {"factor", lv.factor},
            {"no_factor", lv.no_factor},
            {"structure_only", lv.structure_only},
            {"unknown", lv.unknown},
            {"oracle_checked", lv.oracle_checked},
            {"exemplars", ex}});
    }
    return {{"h", r.h}, {"N", r.n}, {"upper_level", r.upper_level}, {"theorem_contradictions", r.theorem_contradictions}, {"levels", levels}};
}

}
