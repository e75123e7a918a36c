#include <tiling/matching.hh>

#include <algorithm>
#include <limits>
#include <queue>

namespace tiling {

namespace
{
    constexpr int infinity = std::numeric_limits<int>::max();

    class HopcroftKarp
    {
    public:
        explicit HopcroftKarp(const BipartiteAdjacency & g) :
            g_(g), m_{std::vector<int>(static_cast<std::size_t>(g.left), -1), std::vector<int>(static_cast<std::size_t>(g.right), -1), 0},
            dist_(static_cast<std::size_t>(g.left)), next_(static_cast<std::size_t>(g.left))
        {
        }

        auto run() -> Matching
        {
            while (layer()) {
            }
            return m_;
        }

    private:
        // BFS from free left vertices; returns true if some free right vertex is reachable.
        auto layer() -> bool
        {
            std::queue<int> q;
            for (int u = 0; u < g_.left; ++u) {
                if (m_.mate_left[u] < 0) {
                    dist_[u] = 0;
                    q.push(u);
                }
                else
                    dist_[u] = infinity;
            }
            bool found = false;
            while (! q.empty()) {
                int u = q.front();
                q.pop();
                for (int v : g_.adj[u]) {
                    int w = m_.mate_right[v];
                    if (w < 0)
                        found = true;
                    else if (dist_[w] == infinity) {
                        dist_[w] = dist_[u] + 1;
                        q.push(w);
                    }
                }
            }
            if (! found)
                return false;

            std::fill(next_.begin(), next_.end(), 0);
            for (int u = 0; u < g_.left; ++u)
                if (m_.mate_left[u] < 0 && augment(u))
                    ++m_.size;
            return true;
        }

        auto augment(int u) -> bool
        {
            for (auto & i = next_[u]; i < g_.adj[u].size(); ++i) {
                int v = g_.adj[u][i];
                int w = m_.mate_right[v];
                if (w < 0 || (dist_[w] == dist_[u] + 1 && augment(w))) {
                    m_.mate_left[u] = v;
                    m_.mate_right[v] = u;
                    ++i;
                    return true;
                }
            }
            dist_[u] = infinity;
            return false;
        }

        const BipartiteAdjacency & g_;
        Matching m_;
        std::vector<int> dist_;
        std::vector<std::size_t> next_;
    };
}

auto maximum_matching(const BipartiteAdjacency & g) -> Matching
{
    return HopcroftKarp(g).run();
}

auto hall_violator(const BipartiteAdjacency & g, const Matching & m) -> HallViolator
{
    std::vector<bool> seen_left(static_cast<std::size_t>(g.left), false), seen_right(static_cast<std::size_t>(g.right), false);
    std::queue<int> q;
    for (int u = 0; u < g.left; ++u)
        if (m.mate_left[u] < 0) {
            seen_left[u] = true;
            q.push(u);
        }
    if (q.empty())
        return {};

    while (! q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : g.adj[u]) {
            if (seen_right[v])
                continue;
            seen_right[v] = true;
            int w = m.mate_right[v];
            if (w >= 0 && ! seen_left[w]) {
                seen_left[w] = true;
                q.push(w);
            }
        }
    }

    HallViolator out;
    for (int u = 0; u < g.left; ++u)
        if (seen_left[u])
            out.left.push_back(u);
    for (int v = 0; v < g.right; ++v)
        if (seen_right[v])
            out.neighbours.push_back(v);
    return out;
}

}
