#include <tiling/tiling_search.hh>

#include <algorithm>
#include <atomic>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace tiling {

namespace
{
    // Copy counts used for branching saturate here; beyond it every vertex is
    // equally unconstrained.
    constexpr std::uint64_t count_cap = 64;
    constexpr std::size_t no_index = std::numeric_limits<std::size_t>::max();

    using Copy = std::vector<std::vector<int>>;
    using Visitor = std::function<bool(const Copy &)>;

    auto binomial(std::uint64_t m, int k) -> std::uint64_t
    {
        if (k < 0 || static_cast<std::uint64_t>(k) > m)
            return 0;
        std::uint64_t r = 1;
        for (int i = 0; i < k; ++i)
            r = r * (m - static_cast<std::uint64_t>(i)) / static_cast<std::uint64_t>(i + 1);
        return r;
    }

    struct Shared
    {
        std::atomic<std::uint64_t> nodes{0};
        std::uint64_t budget = 0;
        std::atomic<std::size_t> found_index{no_index};
    };

    class Searcher
    {
    public:
        Searcher(const TilingProblem & problem, Shared & shared, std::vector<Bits> uncovered, std::size_t branch_index = 0) :
            g_(*problem.graph),
            classes_(problem.classes),
            k_(static_cast<int>(problem.classes.size())),
            h_(problem.h),
            n_(problem.graph->n()),
            uncovered_(std::move(uncovered)),
            shared_(shared),
            branch_index_(branch_index),
            count_buf_(make_buffers())
        {
        }

        auto solve() -> SearchStatus
        {
            if (shared_.found_index.load(std::memory_order_relaxed) < branch_index_)
                return SearchStatus::budget_exceeded;
            if (shared_.nodes.fetch_add(1, std::memory_order_relaxed) + 1 > shared_.budget)
                return SearchStatus::budget_exceeded;
            if (all_covered())
                return SearchStatus::found;
            if (some_vertex_starved())
                return SearchStatus::exhausted;

            auto [p, v, best] = select_branch_vertex();
            if (best == 0)
                return SearchStatus::exhausted;

            SearchStatus status = SearchStatus::exhausted;
            for_each_copy(p, v, [&](const Copy & copy) {
                cover(copy, false);
                chosen_.push_back(copy);
                auto s = solve();
                if (s == SearchStatus::found) {
                    status = s;
                    return false;
                }
                chosen_.pop_back();
                cover(copy, true);
                if (s == SearchStatus::budget_exceeded) {
                    status = s;
                    return false;
                }
                return true;
            });
            return status;
        }

        auto all_covered() const -> bool
        {
            return std::all_of(uncovered_.begin(), uncovered_.end(), [](const Bits & b) { return b.none(); });
        }

        // True if some uncovered vertex has fewer than h uncovered neighbours
        // in another part.
        auto some_vertex_starved() -> bool
        {
            Bits & scratch = count_buf_[0][0];
            for (int p = 0; p < k_; ++p)
                for (auto v = uncovered_[p].find_first(); v != Bits::npos; v = uncovered_[p].find_next(v))
                    for (int q = 0; q < k_; ++q) {
                        if (q == p)
                            continue;
                        scratch = g_.row({classes_[p], static_cast<int>(v)}, classes_[q]);
                        scratch &= uncovered_[q];
                        if (static_cast<int>(scratch.count()) < h_)
                            return true;
                    }
            return false;
        }

        struct Branch
        {
            int part;
            int vertex;
            std::uint64_t copies;
        };

        auto select_branch_vertex() -> Branch
        {
            Branch best{-1, -1, std::numeric_limits<std::uint64_t>::max()};
            for (int p = 0; p < k_; ++p)
                for (auto v = uncovered_[p].find_first(); v != Bits::npos; v = uncovered_[p].find_next(v)) {
                    auto c = count_copies(p, static_cast<int>(v), std::min(best.copies, count_cap));
                    if (c < best.copies) {
                        best = {p, static_cast<int>(v), c};
                        if (c == 0)
                            return best;
                    }
                }
            return best;
        }

        void for_each_copy(int p, int v, const Visitor & visit)
        {
            Enumeration e(*this, p, v, make_buffers());
            if (! e.init())
                return;
            e.visit = &visit;
            e.walk(0, h_ - 1, 0, 0);
        }

        auto count_copies(int p, int v, std::uint64_t cap) -> std::uint64_t
        {
            Enumeration e(*this, p, v, std::move(count_buf_));
            std::uint64_t result = 0;
            if (e.init()) {
                e.cap = cap;
                e.walk(0, h_ - 1, 0, 0);
                result = std::min(e.count, cap);
            }
            count_buf_ = std::move(e.buf);
            return result;
        }

        void cover(const Copy & copy, bool restore)
        {
            for (int p = 0; p < k_; ++p)
                for (int x : copy[p])
                    uncovered_[p][static_cast<std::size_t>(x)] = restore;
        }

        auto to_result_copies() const -> TileCopies
        {
            TileCopies out;
            for (const auto & c : chosen_) {
                auto copy = c;
                for (auto & part : copy)
                    std::sort(part.begin(), part.end());
                out.push_back(std::move(copy));
            }
            return out;
        }

        auto uncovered() const -> const std::vector<Bits> & { return uncovered_; }
        auto chosen() -> TileCopies & { return chosen_; }

    private:
        using Buffers = std::vector<std::vector<Bits>>;

        auto make_buffers() const -> Buffers
        {
            return Buffers(static_cast<std::size_t>(h_ * k_ + 1), std::vector<Bits>(static_cast<std::size_t>(k_), Bits(static_cast<std::size_t>(n_))));
        }

        // Walks copies through a fixed vertex. Part order: the vertex's own part
        // first, then the others in increasing class order. buf[depth][q] holds
        // the candidates still available in part q after depth picks.
        struct Enumeration
        {
            Enumeration(Searcher & s, int p, int v, Buffers b) : s(s), p(p), v(v), buf(std::move(b))
            {
                order.push_back(p);
                for (int q = 0; q < s.k_; ++q)
                    if (q != p)
                        order.push_back(q);
                copy.assign(static_cast<std::size_t>(s.k_), {});
                copy[p].push_back(v);
            }

            auto init() -> bool
            {
                auto & first = buf[0];
                for (int q = 0; q < s.k_; ++q) {
                    if (q == p) {
                        first[q] = s.uncovered_[q];
                        first[q].reset(static_cast<std::size_t>(v));
                        if (static_cast<int>(first[q].count()) < s.h_ - 1)
                            return false;
                    }
                    else {
                        first[q] = s.g_.row({s.classes_[p], v}, s.classes_[q]);
                        first[q] &= s.uncovered_[q];
                        if (static_cast<int>(first[q].count()) < s.h_)
                            return false;
                    }
                }
                return true;
            }

            // Returns false to stop the whole walk.
            auto walk(int stage, int need, std::size_t from, int depth) -> bool
            {
                const int k = s.k_;
                if (need == 0) {
                    if (! visit && stage + 2 == k) {
                        count += binomial(buf[depth][order[k - 1]].count(), s.h_);
                        return count < cap;
                    }
                    if (stage + 1 == k)
                        return (*visit)(copy);
                    return walk(stage + 1, s.h_, 0, depth);
                }

                const int q = order[stage];
                const auto & cn = buf[depth];
                auto x = from == 0 ? cn[q].find_first() : cn[q].find_next(from - 1);
                for (; x != Bits::npos; x = cn[q].find_next(x)) {
                    auto & next = buf[depth + 1];
                    bool viable = true;
                    for (int t = stage + 1; t < k && viable; ++t) {
                        const int q2 = order[t];
                        next[q2] = cn[q2];
                        next[q2] &= s.g_.row({s.classes_[q], static_cast<int>(x)}, s.classes_[q2]);
                        viable = static_cast<int>(next[q2].count()) >= s.h_;
                    }
                    if (! viable)
                        continue;
                    next[q] = cn[q];
                    copy[q].push_back(static_cast<int>(x));
                    bool go_on = walk(stage, need - 1, x + 1, depth + 1);
                    copy[q].pop_back();
                    if (! go_on)
                        return false;
                }
                return true;
            }

            Searcher & s;
            int p, v;
            Buffers buf;
            std::vector<int> order;
            Copy copy;
            const Visitor * visit = nullptr;
            std::uint64_t count = 0;
            std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();
        };

        const TripartiteGraph & g_;
        const std::vector<int> & classes_;
        int k_, h_, n_;
        std::vector<Bits> uncovered_;
        Shared & shared_;
        std::size_t branch_index_;
        Buffers count_buf_;
        TileCopies chosen_;
    };

    void validate(const TilingProblem & problem)
    {
        if (! problem.graph)
            throw std::invalid_argument("tiling search needs a graph");
        if (problem.h < 1)
            throw std::invalid_argument("tiling search needs h >= 1");
        if (problem.classes.size() < 2 || problem.classes.size() > num_classes || problem.classes.size() != problem.allowed.size())
            throw std::invalid_argument("tiling search needs two or three classes with one mask each");
        for (std::size_t i = 0; i < problem.classes.size(); ++i) {
            if (problem.classes[i] < 0 || problem.classes[i] >= num_classes || (i > 0 && problem.classes[i] <= problem.classes[i - 1]))
                throw std::invalid_argument("tiling search classes must be distinct and increasing");
            if (static_cast<int>(problem.allowed[i].size()) != problem.graph->n())
                throw std::invalid_argument("tiling search mask has the wrong size");
        }
    }
}

auto search_tiling(const TilingProblem & problem, const TilingSearchOptions & options) -> TilingSearchResult
{
    validate(problem);

    TilingSearchResult result;
    const auto size = problem.allowed[0].count();
    for (const auto & mask : problem.allowed)
        if (mask.count() != size || size % static_cast<std::size_t>(problem.h) != 0)
            return result;

    Shared shared;
    shared.budget = options.node_budget;
    Searcher root(problem, shared, problem.allowed);

    if (options.threads <= 1) {
        result.status = root.solve();
        result.nodes = shared.nodes.load();
        if (result.status == SearchStatus::found)
            result.copies = root.to_result_copies();
        return result;
    }

    // Parallel root: the same checks as solve(), then each copy through the
    // branch vertex is an independent task. The lowest-index success wins so
    // the answer matches the sequential search.
    shared.nodes = 1;
    if (root.all_covered()) {
        result.status = SearchStatus::found;
        result.nodes = 1;
        return result;
    }
    auto branch = root.some_vertex_starved() ? decltype(root.select_branch_vertex()){-1, -1, 0} : root.select_branch_vertex();
    if (branch.copies == 0) {
        result.nodes = 1;
        return result;
    }
    if (branch.copies >= count_cap) {
        shared.nodes = 0;
        result.status = root.solve();
        result.nodes = shared.nodes.load();
        if (result.status == SearchStatus::found)
            result.copies = root.to_result_copies();
        return result;
    }

    std::vector<Copy> tasks;
    root.for_each_copy(branch.part, branch.vertex, [&](const Copy & c) {
        tasks.push_back(c);
        return true;
    });

    std::vector<SearchStatus> outcome(tasks.size(), SearchStatus::budget_exceeded);
    std::vector<TileCopies> found(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
            if (shared.found_index.load() < i)
                continue;
            auto uncovered = root.uncovered();
            for (std::size_t p = 0; p < tasks[i].size(); ++p)
                for (int x : tasks[i][p])
                    uncovered[p].reset(static_cast<std::size_t>(x));
            Searcher child(problem, shared, std::move(uncovered), i);
            child.chosen().push_back(tasks[i]);
            outcome[i] = child.solve();
            if (outcome[i] == SearchStatus::found) {
                found[i] = child.to_result_copies();
                auto current = shared.found_index.load();
                while (i < current && ! shared.found_index.compare_exchange_weak(current, i)) {
                }
            }
        }
    };

    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(options.threads, tasks.size()); ++t)
        pool.emplace_back(worker);
    for (auto & t : pool)
        t.join();

    result.nodes = shared.nodes.load();
    result.status = SearchStatus::exhausted;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (outcome[i] == SearchStatus::found) {
            result.status = SearchStatus::found;
            result.copies = std::move(found[i]);
            break;
        }
        if (outcome[i] == SearchStatus::budget_exceeded) {
            result.status = SearchStatus::budget_exceeded;
            break;
        }
    }
    return result;
}

}
