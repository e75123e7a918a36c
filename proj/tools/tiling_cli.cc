// Command-line front end: generate, solve, verify, detect, scan.
//
// Exit codes:
//   0   success (solve: factor found; verify: certificate valid; detect: witness found)
//   1   verify: certificate invalid; detect: no witness found
//   2   generate: parameters infeasible for the Sidon search
//   3   solve: no factor, certified
//   4   solve: unknown within the budgets
//   5   solve: structure report only
//   6   scan: a theorem-contradiction exemplar was saved
//   64  usage, graph, config or JSON parse error
//   65  input rejected (h does not divide N, bad generator parameters, ...)
//   66  input file missing
//   70  internal error

#include <tiling/constructions.hh>
#include <tiling/exact_solver.hh>
#include <tiling/random.hh>
#include <tiling/report.hh>
#include <tiling/run_config.hh>
#include <tiling/scan.hh>
#include <tiling/structure.hh>
#include <tiling/tiler.hh>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace tiling;

namespace
{
    enum Exit
    {
        ok = 0,
        negative = 1,
        infeasible = 2,
        no_factor = 3,
        unknown = 4,
        structure_only = 5,
        contradiction = 6,
        usage = 64,
        rejected = 65,
        no_input = 66,
        internal = 70
    };

    struct UsageError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct MissingInput : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    auto workers_from_env() -> unsigned
    {
        const char * v = std::getenv("TILING_WORKERS");
        if (! v || ! *v)
            return 1;
        char * end = nullptr;
        const long n = std::strtol(v, &end, 10);
        if (*end != '\0' || n < 1 || n > 1024)
            throw UsageError(std::string("TILING_WORKERS must be a positive integer, got \"") + v + "\"");
        return static_cast<unsigned>(n);
    }

    auto read_text(const std::string & path) -> std::string
    {
        if (! std::filesystem::exists(path))
            throw MissingInput("no such file: " + path);
        std::ifstream in(path, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    auto read_json(const std::string & path) -> Json
    {
        const auto text = read_text(path);
        try {
            return Json::parse(text);
        } catch (const nlohmann::json::parse_error & e) {
            throw MalformedJson(path + ": " + e.what());
        }
    }

    auto load_graph(const std::string & path) -> ParsedGraph
    {
        return read_graph(read_text(path));
    }

    void write_json(const Json & j, const std::string & out_path)
    {
        if (out_path.empty()) {
            std::cout << j.dump(2) << "\n";
            return;
        }
        std::ofstream out(out_path);
        if (! out)
            throw MissingInput("cannot write " + out_path);
        out << j.dump(2) << "\n";
    }

    auto choose_h(int flag, int header) -> int
    {
        const int h = flag > 0 ? flag : header;
        if (h < 1)
            throw UsageError("h is 0 in the graph header; pass --h");
        return h;
    }

    // Config file, then --set overrides, then dedicated flags; later wins.
    struct ConfigFlags
    {
        std::string file;
        std::vector<std::string> sets;
        std::map<std::string, std::string> flags;

        void attach(CLI::App & app)
        {
            app.add_option("--config", file, "key = value config file");
            app.add_option("--set", sets, "config override key=value (repeatable)");
            for (const char * key : {"seed", "gamma", "delta", "epsilon", "typical", "node-budget", "effort", "restarts", "tiny-bound"})
                app.add_option_function<std::string>(std::string("--") + key, [this, key](const std::string & v) { flags[key] = v; },
                    std::string("config ") + key);
        }

        auto resolve() const -> RunConfig
        {
            RunConfig c = file.empty() ? RunConfig{} : read_config_file(file);
            for (const auto & kv : sets) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw ConfigError("--set expects key=value, got \"" + kv + "\"");
                c.set(kv.substr(0, eq), kv.substr(eq + 1));
            }
            for (const auto & [key, value] : flags) {
                std::string k = key;
                std::replace(k.begin(), k.end(), '-', '_');
                c.set(k, value);
            }
            c.validate();
            return c;
        }
    };

    auto provenance(const RunConfig & c, const std::string & graph_path) -> Json
    {
        Json j = {{"seed", c.seed}, {"config_hash", c.hash()}, {"config", c.canonical_text()}};
        if (! graph_path.empty())
            j["graph_sha256"] = file_sha256(graph_path);
        return j;
    }

    // ---- generate ----

    struct GenerateArgs
    {
        std::string family;
        std::string out;
        std::uint64_t seed = 0;
        int h = 0;
        int q = 1;
        int r = 1;
        int n = 0;
        int d = 0;
        int big_n = 0;
        int m = 1;
        double p = 0.0;
        int min_degree = -1;
    };

    auto labels_json(const BlockAssignment & a) -> Json
    {
        Json out = Json::array();
        for (const auto & row : a) {
            std::vector<int> one_based;
            for (int b : row)
                one_based.push_back(b + 1);
            out.push_back(one_based);
        }
        return out;
    }

    auto cmd_generate(const GenerateArgs & a) -> int
    {
        TripartiteGraph g;
        int h = a.h;
        Json meta = {{"family", a.family}, {"seed", a.seed}};
        Json params = Json::object();

        auto blowup_family = [&](const PatternGraph & pattern) {
            if (a.m < 1)
                throw std::invalid_argument("--m must be positive");
            params = {{"m", a.m}, {"p", a.p}};
            auto b = noisy_blowup(pattern, uniform_block_sizes(pattern, a.m), a.p, a.seed);
            g = std::move(b.graph);
            meta["labels"] = {{"kind", "blocks"}, {"pattern", pattern.name()}, {"block_of", labels_json(b.block_of)}};
        };

        if (a.family == "gamma3")
            blowup_family(PatternGraph::gamma3());
        else if (a.family == "theta33")
            blowup_family(PatternGraph::theta(3, 3));
        else if (a.family == "theta32")
            blowup_family(PatternGraph::theta(3, 2));
        else if (a.family == "theta22")
            blowup_family(PatternGraph::theta22_with_apex_part());
        else if (a.family == "qgraph") {
            params = {{"n", a.n}, {"d", a.d}};
            auto q = q_graph(a.n, a.d, a.seed);
            g = std::move(q.graph);
            meta["sidon_pair"] = {{"modulus", q.pair.modulus}, {"s", q.pair.s_set}, {"t", q.pair.t_set}};
        } else if (a.family == "g3") {
            params = {{"h", a.h}, {"q", a.q}, {"r", a.r}};
            auto inst = g3_construction({a.h, a.q, a.r}, a.seed);
            g = std::move(inst.graph);
            meta["labels"] = {{"kind", "columns"}, {"column_of", labels_json(inst.column_of)}};
            meta["expected_bar_min_degree"] = inst.params.expected_bar_min_degree();
        } else if (a.family == "random") {
            if (a.big_n < 1)
                throw std::invalid_argument("--N must be positive");
            params = {{"N", a.big_n}};
            if (a.min_degree >= 0) {
                params["min_degree"] = a.min_degree;
                g = random_graph_with_min_degree(a.big_n, a.min_degree, a.seed);
            } else {
                params["p"] = a.p;
                Rng rng(a.seed);
                GraphBuilder b(a.big_n);
                for (int i = 0; i < num_classes; ++i)
                    for (int j = i + 1; j < num_classes; ++j)
                        for (int u = 0; u < a.big_n; ++u)
                            for (int v = 0; v < a.big_n; ++v)
                                if (bernoulli(rng, a.p))
                                    b.add_edge({i, u}, {j, v});
                g = std::move(b).build();
            }
        } else if (a.family == "planted") {
            if (a.h < 1 || a.big_n < 1)
                throw std::invalid_argument("planted needs --N and --h");
            params = {{"N", a.big_n}, {"h", a.h}, {"p", a.p}};
            auto pf = planted_factor_graph(a.big_n, a.h, a.p, a.seed);
            g = std::move(pf.graph);
            meta["certificate"] = to_json(pf.factor);
        } else {
            throw UsageError("unknown family \"" + a.family + "\"");
        }

        const auto text = write_graph(g, h);
        {
            std::ofstream out(a.out, std::ios::binary);
            if (! out)
                throw MissingInput("cannot write " + a.out);
            out << text;
        }
        meta["params"] = params;
        meta["N"] = g.n();
        meta["h"] = h;
        meta["bar_min_degree"] = bar_min_degree(g);
        meta["graph_sha256"] = sha256_hex(text);
        write_json(meta, a.out + ".json");
        std::cout << a.out << ": N=" << g.n() << " bar_min_degree=" << bar_min_degree(g) << "\n";
        return ok;
    }

    // ---- solve ----

    auto columns_from_sidecar(const std::string & path, int n) -> BlockAssignment
    {
        const auto j = read_json(path);
        if (! j.contains("labels") || j["labels"].value("kind", "") != "columns")
            throw MalformedJson(path + ": no column labels");
        BlockAssignment out;
        const auto & rows = j["labels"]["column_of"];
        if (! rows.is_array() || rows.size() != num_classes)
            throw MalformedJson(path + ": column_of must list three classes");
        for (int c = 0; c < num_classes; ++c) {
            for (const auto & v : rows[static_cast<std::size_t>(c)])
                out[c].push_back(v.get<int>() - 1);
            if (static_cast<int>(out[c].size()) != n)
                throw MalformedJson(path + ": column_of has the wrong length");
        }
        return out;
    }

    auto cmd_solve(const std::string & in, int h_flag, const std::string & columns, const std::string & out, const RunConfig & c,
        unsigned workers) -> int
    {
        auto parsed = load_graph(in);
        const int h = choose_h(h_flag, parsed.h);
        auto sc = c.solve_config(workers);
        if (! columns.empty())
            sc.columns = columns_from_sidecar(columns, parsed.graph.n());
        auto r = solve(parsed.graph, h, sc);
        Json j = {{"command", "solve"}, {"graph", in}, {"h", h}, {"N", parsed.graph.n()}};
        j["provenance"] = provenance(c, in);
        j.update(to_json(r));
        write_json(j, out);
        switch (r.outcome) {
        case SolveOutcome::factor:
            return ok;
        case SolveOutcome::no_factor:
            return no_factor;
        case SolveOutcome::structure_only:
            return structure_only;
        case SolveOutcome::unknown:
            return unknown;
        }
        return unknown;
    }

    // ---- verify ----

    auto cmd_verify(const std::string & in, const std::string & cert_path, int h_flag, const RunConfig & c, unsigned workers) -> int
    {
        auto parsed = load_graph(in);
        const auto cert = certificate_from_json(read_json(cert_path));
        Verdict v;
        if (auto * f = std::get_if<FactorCertificate>(&cert)) {
            int h = h_flag > 0 ? h_flag : parsed.h;
            if (h < 1 && ! f->copies.empty())
                h = static_cast<int>(f->copies.front().parts[0].size());
            v = verify_factor(parsed.graph, std::max(h, 1), *f);
        } else {
            ExactOptions eo;
            eo.node_budget = c.node_budget;
            eo.threads = workers;
            v = check_no_factor(parsed.graph, choose_h(h_flag, parsed.h), std::get<NoFactorCertificate>(cert), eo);
        }
        if (v)
            std::cout << "valid\n";
        else
            std::cout << "invalid: " << v.first_violation << "\n";
        return v ? ok : negative;
    }

    // ---- detect ----

    auto cmd_detect(const std::string & in, const std::string & pattern, const std::string & tolerance, int h_flag, const std::string & out,
        const RunConfig & c) -> int
    {
        auto parsed = load_graph(in);
        const auto & g = parsed.graph;
        Rational tol = c.delta;
        if (! tolerance.empty())
            tol = parse_rational(tolerance);
        if (tol <= Rational(0) || tol >= Rational(1))
            throw ConfigError("--tolerance must lie strictly between 0 and 1");

        Json j = {{"command", "detect"}, {"graph", in}, {"pattern", pattern}, {"tolerance", rational_to_string(tol)}};
        j["provenance"] = provenance(c, in);
        FitOptions fo;
        fo.restarts = c.effort;
        bool found = false;
        if (pattern == "extreme") {
            DetectOptions d;
            d.restarts = c.effort;
            auto r = detect_extreme(g, tol, c.seed, d);
            found = std::holds_alternative<ExtremeWitness>(r);
            j["witness"] = found ? to_json(std::get<ExtremeWitness>(r)) : to_json(std::get<NotFound>(r));
        } else if (pattern == "theta33" || pattern == "theta32" || pattern == "theta22" || pattern == "gamma3") {
            const auto p = pattern == "theta33" ? PatternGraph::theta(3, 3)
                : pattern == "theta32"          ? PatternGraph::theta(3, 2)
                : pattern == "theta22"          ? PatternGraph::theta22_with_apex_part()
                                                : PatternGraph::gamma3();
            auto r = fit_approx(g, p, tol, c.seed, fo);
            found = std::holds_alternative<ApproxWitness>(r);
            j["witness"] = found ? to_json(std::get<ApproxWitness>(r)) : to_json(std::get<NotFound>(r));
        } else if (pattern == "very_extreme") {
            const int h = choose_h(h_flag, parsed.h);
            auto fit = fit_approx(g, PatternGraph::gamma3(), tol, c.seed, fo);
            if (auto * w = std::get_if<ApproxWitness>(&fit)) {
                auto r = check_very_extreme(g, h, nine_sets_from_assignment(g, w->block_of));
                found = std::holds_alternative<VeryExtremeWitness>(r);
                j["witness"] = found ? to_json(std::get<VeryExtremeWitness>(r))
                                     : Json{{"kind", "violation"}, {"message", std::get<Violation>(r).message}};
                j["gamma3_fit"] = to_json(*w);
            } else {
                j["witness"] = to_json(std::get<NotFound>(fit));
            }
        } else {
            throw UsageError("unknown pattern \"" + pattern + "\"");
        }
        j["found"] = found;
        write_json(j, out);
        return found ? ok : negative;
    }

    // ---- scan ----

    auto cmd_scan(ScanOptions o, const std::string & out) -> int
    {
        auto r = run_scan(o);
        Json j = {{"command", "scan"}, {"samples_per_level", o.samples}, {"exhaustive", o.exhaustive}, {"workers", o.workers}};
        j["provenance"] = provenance(o.config, "");
        j.update(to_json(r));
        write_json(j, out);
        return r.theorem_contradictions > 0 ? contradiction : ok;
    }
}

auto main(int argc, char ** argv) -> int
{
    CLI::App app{"Perfect K_{h,h,h}-tilings of balanced tripartite graphs"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);
    ConfigFlags config;

    GenerateArgs gen;
    auto * generate = app.add_subcommand("generate", "write a graph file and a JSON sidecar");
    generate->add_option("family", gen.family, "gamma3 | theta33 | theta32 | theta22 | qgraph | g3 | random | planted")->required();
    generate->add_option("-o,--out", gen.out, "graph file to write")->required();
    generate->add_option("--seed", gen.seed);
    generate->add_option("--h", gen.h);
    generate->add_option("--q", gen.q);
    generate->add_option("--r", gen.r);
    generate->add_option("--n", gen.n, "Sidon modulus");
    generate->add_option("--d", gen.d, "Sidon set size");
    generate->add_option("--N", gen.big_n, "vertices per class");
    generate->add_option("--m", gen.m, "block size of a blow-up");
    generate->add_option("--p", gen.p, "edge or noise probability");
    generate->add_option("--min-degree", gen.min_degree, "exact bar-minimum degree for random graphs");

    std::string in, cert, columns, out, pattern, tolerance;
    int h = 0;
    auto * solve_cmd = app.add_subcommand("solve", "find a factor or certify that none exists");
    solve_cmd->add_option("graph", in)->required();
    solve_cmd->add_option("--h", h);
    solve_cmd->add_option("--columns", columns, "generator sidecar with column labels for the column cross-check");
    solve_cmd->add_option("-o,--out", out, "report path (stdout when omitted)");
    config.attach(*solve_cmd);

    auto * verify = app.add_subcommand("verify", "re-check a certificate against a graph");
    verify->add_option("graph", in)->required();
    verify->add_option("certificate", cert, "certificate, solve report or generator sidecar")->required();
    verify->add_option("--h", h);
    config.attach(*verify);

    auto * detect = app.add_subcommand("detect", "look for extreme-case or pattern structure");
    detect->add_option("graph", in)->required();
    detect->add_option("--pattern", pattern, "extreme | theta33 | theta32 | theta22 | gamma3 | very_extreme")->required();
    detect->add_option("--tolerance", tolerance, "density tolerance (gamma for extreme, delta otherwise)");
    detect->add_option("--h", h);
    detect->add_option("-o,--out", out);
    config.attach(*detect);

    ScanOptions scan;
    std::string levels;
    auto * scan_cmd = app.add_subcommand("scan", "tabulate solver outcomes on random graphs with a fixed bar-minimum degree");
    scan_cmd->add_option("--h", scan.h)->required();
    scan_cmd->add_option("--N", scan.n)->required();
    scan_cmd->add_option("--levels", levels, "comma-separated bar-minimum degrees")->required();
    scan_cmd->add_option("--samples", scan.samples);
    scan_cmd->add_option("--exemplars", scan.exemplar_dir, "directory for failure exemplars");
    scan_cmd->add_option("--max-exemplars", scan.max_exemplars);
    scan_cmd->add_flag("--exhaustive", scan.exhaustive, "cross-check small samples with the brute-force oracle");
    scan_cmd->add_option("-o,--out", out);
    config.attach(*scan_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError & e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        const unsigned workers = workers_from_env();
        if (*generate)
            return cmd_generate(gen);
        const auto c = config.resolve();
        if (*solve_cmd)
            return cmd_solve(in, h, columns, out, c, workers);
        if (*verify)
            return cmd_verify(in, cert, h, c, workers);
        if (*detect)
            return cmd_detect(in, pattern, tolerance, h, out, c);
        scan.config = c;
        scan.workers = workers;
        std::stringstream ls(levels);
        for (std::string item; std::getline(ls, item, ',');) {
            try {
                scan.levels.push_back(std::stoi(item));
            } catch (const std::exception &) {
                throw UsageError("--levels expects integers, got \"" + item + "\"");
            }
        }
        return cmd_scan(scan, out);
    } catch (const Infeasible & e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return infeasible;
    } catch (const MissingInput & e) {
        std::cerr << "error: " << e.what() << "\n";
        return no_input;
    } catch (const UsageError & e) {
        std::cerr << "usage: " << e.what() << "\n";
        return usage;
    } catch (const ParseError & e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return usage;
    } catch (const MalformedJson & e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return usage;
    } catch (const ConfigError & e) {
        std::cerr << "config error: " << e.what() << "\n";
        return usage;
    } catch (const std::invalid_argument & e) {
        std::cerr << "rejected: " << e.what() << "\n";
        return rejected;
    } catch (const std::out_of_range & e) {
        std::cerr << "rejected: " << e.what() << "\n";
        return rejected;
    } catch (const std::exception & e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return internal;
    }
}
