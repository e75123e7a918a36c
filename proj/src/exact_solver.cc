#include <tiling/exact_solver.hh>
#include <tiling/tiling_search.hh>

#include <algorithm>
#include <functional>

namespace tiling {

namespace
{
    void require_divisible(const TripartiteGraph & g, int h)
    {
        if (h < 1 || g.n() % h != 0)
            throw IndivisibleN("h = " + std::to_string(h) + " does not divide N = " + std::to_string(g.n()));
    }

    using Blocks = std::vector<std::vector<int>>;

    // All partitions of {0..n-1} into blocks of size h; each block sorted, blocks
    // ordered by their smallest element.
    auto h_partitions(int n, int h) -> std::vector<Blocks>
    {
        std::vector<Blocks> out;
        std::vector<bool> used(static_cast<std::size_t>(n), false);
        Blocks current;
        std::vector<int> block;

        std::function<void()> open_block;
        std::function<void(int)> extend_block = [&](int from) {
            if (static_cast<int>(block.size()) == h) {
                current.push_back(block);
                open_block();
                current.pop_back();
                return;
            }
            for (int x = from; x < n; ++x) {
                if (used[x])
                    continue;
                used[x] = true;
                block.push_back(x);
                extend_block(x + 1);
                block.pop_back();
                used[x] = false;
            }
        };
        open_block = [&] {
            int first = 0;
            while (first < n && used[first])
                ++first;
            if (first == n) {
                out.push_back(current);
                return;
            }
            auto saved = block;
            block = {first};
            used[first] = true;
            extend_block(first + 1);
            used[first] = false;
            block = saved;
        };
        open_block();
        return out;
    }

    auto blocks_complete(const TripartiteGraph & g, int ci, const std::vector<int> & a, int cj, const std::vector<int> & b) -> bool
    {
        for (int u : a)
            for (int v : b)
                if (! g.has_edge({ci, u}, {cj, v}))
                    return false;
        return true;
    }

    auto blocks_match(const TripartiteGraph & g, const Blocks & p1, const Blocks & p2, const Blocks & p3) -> bool
    {
        const std::size_t m = p1.size();
        std::vector<bool> used2(m, false), used3(m, false);
        std::function<bool(std::size_t)> place = [&](std::size_t i) -> bool {
            if (i == m)
                return true;
            for (std::size_t j = 0; j < m; ++j) {
                if (used2[j] || ! blocks_complete(g, 0, p1[i], 1, p2[j]))
                    continue;
                for (std::size_t k = 0; k < m; ++k) {
                    if (used3[k] || ! blocks_complete(g, 0, p1[i], 2, p3[k]) || ! blocks_complete(g, 1, p2[j], 2, p3[k]))
                        continue;
                    used2[j] = used3[k] = true;
                    bool ok = place(i + 1);
                    used2[j] = used3[k] = false;
                    if (ok)
                        return true;
                }
            }
            return false;
        };
        return place(0);
    }

    auto column_mask(const BlockAssignment & columns, int cls, int col, int n) -> Bits
    {
        Bits mask(static_cast<std::size_t>(n));
        for (int u = 0; u < n; ++u)
            if (columns[cls][u] == col)
                mask.set(static_cast<std::size_t>(u));
        return mask;
    }

    auto same_premises(const ColumnPremises & a, const ColumnPremises & b) -> bool
    {
        return a.params.h == b.params.h && a.params.q == b.params.q && a.params.r == b.params.r && a.column_sizes == b.column_sizes &&
            a.max_column_degree == b.max_column_degree && a.columns_triangle_free == b.columns_triangle_free &&
            a.columns_c4_free == b.columns_c4_free && a.copies_needed == b.copies_needed && a.copies_available == b.copies_available;
    }
}

auto to_factor_certificate(const std::vector<std::vector<std::vector<int>>> & copies) -> FactorCertificate
{
    FactorCertificate cert;
    for (const auto & c : copies) {
        KhhhCopy copy;
        for (int p = 0; p < num_classes; ++p)
            copy.parts[p] = c[p];
        cert.copies.push_back(std::move(copy));
    }
    canonicalize(cert);
    return cert;
}

auto find_factor_exact(const TripartiteGraph & g, int h, const ExactOptions & options) -> ExactOutcome
{
    require_divisible(g, h);

    TilingProblem problem;
    problem.graph = &g;
    problem.classes = {0, 1, 2};
    problem.h = h;
    for (int c = 0; c < num_classes; ++c)
        problem.allowed.push_back(Bits(static_cast<std::size_t>(g.n())).set());

    auto result = search_tiling(problem, {options.node_budget, options.threads});
    switch (result.status) {
    case SearchStatus::found:
        return to_factor_certificate(result.copies);
    case SearchStatus::exhausted: {
        NoFactorCertificate cert;
        cert.kind = NoFactorKind::exhausted_search;
        cert.nodes = result.nodes;
        return cert;
    }
    case SearchStatus::budget_exceeded:
        break;
    }
    return Unknown{result.nodes, "node budget of " + std::to_string(options.node_budget) + " exhausted"};
}

auto brute_force_oracle(const TripartiteGraph & g, int h, int max_vertices) -> bool
{
    require_divisible(g, h);
    if (3 * g.n() > max_vertices)
        throw TooLarge("brute force oracle is limited to " + std::to_string(max_vertices) + " vertices, graph has " +
            std::to_string(3 * g.n()));

    const auto partitions = h_partitions(g.n(), h);
    for (const auto & p1 : partitions)
        for (const auto & p2 : partitions)
            for (const auto & p3 : partitions)
                if (blocks_match(g, p1, p2, p3))
                    return true;
    return false;
}

auto g3_no_factor_certificate(const TripartiteGraph & g, const BlockAssignment & columns, int h)
    -> std::variant<NoFactorCertificate, NotApplicable>
{
    const int n = g.n();
    if (h < 2)
        return NotApplicable{"the column argument needs h >= 2"};
    for (int c = 0; c < num_classes; ++c) {
        if (static_cast<int>(columns[c].size()) != n)
            return NotApplicable{"column labelling of class " + std::to_string(c + 1) + " has the wrong length"};
        for (int col : columns[c])
            if (col < 0 || col > 2)
                return NotApplicable{"column labels must be 1, 2 or 3"};
    }

    ColumnPremises premises;
    std::array<std::array<Bits, num_classes>, 3> mask;
    for (int col = 0; col < 3; ++col)
        for (int c = 0; c < num_classes; ++c) {
            mask[col][c] = column_mask(columns, c, col, n);
            const int size = static_cast<int>(mask[col][c].count());
            if (c == 0)
                premises.column_sizes[col] = size;
            else if (size != premises.column_sizes[col])
                return NotApplicable{"column " + std::to_string(col + 1) + " has different sizes in different classes"};
        }

    const auto [c1, c2, c3] = premises.column_sizes;
    if (c2 % h != 0 || c2 / h < 1)
        return NotApplicable{"column 2 size is not a positive multiple of h"};
    const int q = c2 / h;
    if (c3 != q * h + 1)
        return NotApplicable{"column 3 size is not qh + 1"};
    if ((c1 + 1) % h != 0 || (c1 + 1) / h - q < 1 || (c1 + 1) / h - q > 2)
        return NotApplicable{"column 1 size is not qh + rh - 1 with r in {1, 2}"};
    premises.params = {h, q, (c1 + 1) / h - q};

    premises.columns_triangle_free = true;
    premises.columns_c4_free = true;
    Bits scratch(static_cast<std::size_t>(n));
    for (int col = 0; col < 3; ++col) {
        const auto & m = mask[col];
        for (int i = 0; i < num_classes; ++i)
            for (auto u = m[i].find_first(); u != Bits::npos; u = m[i].find_next(u)) {
                const VertexRef vu{i, static_cast<int>(u)};
                for (int j = 0; j < num_classes; ++j) {
                    if (j == i)
                        continue;
                    scratch = g.row(vu, j);
                    scratch &= m[j];
                    premises.max_column_degree[col] = std::max(premises.max_column_degree[col], static_cast<int>(scratch.count()));
                    if (j < i)
                        continue;
                    // C4 inside the pair (i, j): two vertices of column i sharing two neighbours.
                    for (auto u2 = m[i].find_next(u); u2 != Bits::npos; u2 = m[i].find_next(u2)) {
                        auto common = scratch & g.row({i, static_cast<int>(u2)}, j);
                        if (common.count() >= 2)
                            premises.columns_c4_free = false;
                    }
                    // Triangles: an in-column edge (u, v) with a common in-column neighbour in the third class.
                    const int k = num_classes - i - j;
                    if (i == 0 && j == 1)
                        for (auto v = scratch.find_first(); v != Bits::npos; v = scratch.find_next(v)) {
                            auto common = g.row(vu, k) & g.row({j, static_cast<int>(v)}, k) & m[k];
                            if (common.any())
                                premises.columns_triangle_free = false;
                        }
                }
            }
    }

    premises.copies_needed = 3 * ((q * h + 1 + h - 1) / h);
    premises.copies_available = n / h;

    if (! premises.columns_triangle_free)
        return NotApplicable{"some column contains a triangle"};
    if (! premises.columns_c4_free)
        return NotApplicable{"some column contains a 4-cycle inside a class pair"};
    // A star inside column 2 or 3 has at most 1 + (max degree) vertices; the
    // counting needs that to stay below h.
    if (premises.max_column_degree[1] > h - 2 || premises.max_column_degree[2] > h - 2)
        return NotApplicable{"columns 2 and 3 need in-column degrees at most h - 2"};
    if (premises.copies_needed <= premises.copies_available)
        return NotApplicable{"the copy count gives no contradiction"};

    NoFactorCertificate cert;
    cert.kind = NoFactorKind::column_argument;
    cert.columns = columns;
    cert.premises = premises;
    return cert;
}

auto check_no_factor(const TripartiteGraph & g, int h, const NoFactorCertificate & cert, const ExactOptions & options) -> Verdict
{
    if (cert.kind == NoFactorKind::column_argument) {
        auto redo = g3_no_factor_certificate(g, cert.columns, h);
        if (auto * na = std::get_if<NotApplicable>(&redo))
            return Verdict::fail("column argument premises fail: " + na->reason);
        if (! same_premises(std::get<NoFactorCertificate>(redo).premises, cert.premises))
            return Verdict::fail("recorded column premises differ from the graph");
        return Verdict::pass();
    }

    if (h < 1 || g.n() % h != 0)
        return Verdict::fail("h does not divide N");
    if (3 * g.n() <= default_oracle_vertex_bound)
        return brute_force_oracle(g, h) ? Verdict::fail("brute force finds a factor") : Verdict::pass();
    auto redo = find_factor_exact(g, h, options);
    if (std::holds_alternative<FactorCertificate>(redo))
        return Verdict::fail("exact search finds a factor");
    if (std::holds_alternative<Unknown>(redo))
        return Verdict::fail("exact search did not finish within the budget");
    return Verdict::pass();
}

}
