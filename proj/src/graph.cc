#include <tiling/graph.hh>

#include <algorithm>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

namespace tiling {

namespace
{
    auto check_class(int cls) -> void
    {
        if (cls < 0 || cls >= num_classes)
            throw OutOfRange("class index " + std::to_string(cls) + " out of range");
    }

    auto describe(VertexRef v) -> std::string
    {
        return "(" + std::to_string(v.cls + 1) + ", " + std::to_string(v.offset) + ")";
    }

    const Bits empty_row;
}

auto VertexSet::full(int cls, int n) -> VertexSet
{
    VertexSet s(cls, n);
    s.members_.set();
    return s;
}

auto VertexSet::of(int cls, int n, const std::vector<int> & offsets) -> VertexSet
{
    VertexSet s(cls, n);
    for (int o : offsets) {
        if (o < 0 || o >= n)
            throw OutOfRange("offset " + std::to_string(o) + " out of range");
        s.insert(o);
    }
    return s;
}

auto VertexSet::offsets() const -> std::vector<int>
{
    std::vector<int> result;
    result.reserve(members_.count());
    for (auto i = members_.find_first(); i != Bits::npos; i = members_.find_next(i))
        result.push_back(static_cast<int>(i));
    return result;
}

auto VertexSet::operator-(const VertexSet & other) const -> VertexSet
{
    return VertexSet(cls_, members_ - other.members_);
}

auto VertexSet::operator&(const VertexSet & other) const -> VertexSet
{
    return VertexSet(cls_, members_ & other.members_);
}

auto VertexSet::operator|(const VertexSet & other) const -> VertexSet
{
    return VertexSet(cls_, members_ | other.members_);
}

GraphBuilder::GraphBuilder(int n_per_class) : n_(n_per_class)
{
    if (n_per_class < 0)
        throw OutOfRange("negative class size");
    for (int i = 0; i < num_classes; ++i)
        for (int j = 0; j < num_classes; ++j)
            if (i != j)
                rows_[i][j].assign(static_cast<std::size_t>(n_), Bits(static_cast<std::size_t>(n_)));
}

void GraphBuilder::check(VertexRef a, VertexRef b) const
{
    check_class(a.cls);
    check_class(b.cls);
    if (a.offset < 0 || a.offset >= n_)
        throw OutOfRange("vertex " + describe(a) + " out of range for N=" + std::to_string(n_));
    if (b.offset < 0 || b.offset >= n_)
        throw OutOfRange("vertex " + describe(b) + " out of range for N=" + std::to_string(n_));
    if (a.cls == b.cls)
        throw SameClassEdge("edge " + describe(a) + " -- " + describe(b) + " joins one class");
}

void GraphBuilder::add_edge(VertexRef a, VertexRef b)
{
    check(a, b);
    rows_[a.cls][b.cls][a.offset].set(b.offset);
    rows_[b.cls][a.cls][b.offset].set(a.offset);
}

void GraphBuilder::remove_edge(VertexRef a, VertexRef b)
{
    check(a, b);
    rows_[a.cls][b.cls][a.offset].reset(b.offset);
    rows_[b.cls][a.cls][b.offset].reset(a.offset);
}

auto GraphBuilder::has_edge(VertexRef a, VertexRef b) const -> bool
{
    check(a, b);
    return rows_[a.cls][b.cls][a.offset].test(b.offset);
}

auto GraphBuilder::build() && -> TripartiteGraph
{
    TripartiteGraph g;
    g.n_ = n_;
    g.rows_ = std::move(rows_);
    return g;
}

auto GraphBuilder::build() const & -> TripartiteGraph
{
    TripartiteGraph g;
    g.n_ = n_;
    g.rows_ = rows_;
    return g;
}

auto TripartiteGraph::has_edge(VertexRef a, VertexRef b) const -> bool
{
    if (a.cls == b.cls)
        return false;
    return rows_[a.cls][b.cls][a.offset].test(b.offset);
}

auto TripartiteGraph::row(VertexRef v, int j) const -> const Bits &
{
    if (v.cls == j)
        return empty_row;
    return rows_[v.cls][j][v.offset];
}

auto TripartiteGraph::cross_degree(VertexRef v, int j) const -> int
{
    check_class(v.cls);
    check_class(j);
    if (v.offset < 0 || v.offset >= n_)
        throw OutOfRange("vertex " + describe(v) + " out of range");
    if (v.cls == j)
        throw SameClass("cross degree into own class");
    return static_cast<int>(rows_[v.cls][j][v.offset].count());
}

auto TripartiteGraph::neighbors(VertexRef v, int j) const -> VertexSet
{
    check_class(v.cls);
    check_class(j);
    if (v.offset < 0 || v.offset >= n_)
        throw OutOfRange("vertex " + describe(v) + " out of range");
    if (v.cls == j)
        throw SameClass("neighbours inside own class");
    return VertexSet(j, rows_[v.cls][j][v.offset]);
}

auto TripartiteGraph::common_neighbors(const VertexSet & s, int j) const -> VertexSet
{
    check_class(j);
    auto result = VertexSet::full(j, n_);
    if (s.empty())
        return result;
    if (s.cls() == j)
        throw SameClass("common neighbours inside own class");
    Bits acc(static_cast<std::size_t>(n_));
    acc.set();
    for (int u : s.offsets())
        acc &= rows_[s.cls()][j][u];
    return VertexSet(j, std::move(acc));
}

auto TripartiteGraph::edge_count() const -> std::int64_t
{
    std::int64_t total = 0;
    for (int i = 0; i < num_classes; ++i)
        for (int j = i + 1; j < num_classes; ++j)
            for (const auto & r : rows_[i][j])
                total += static_cast<std::int64_t>(r.count());
    return total;
}

auto TripartiteGraph::edge_count(const VertexSet & a, const VertexSet & b) const -> std::int64_t
{
    if (a.cls() == b.cls())
        return 0;
    std::int64_t total = 0;
    Bits scratch;
    for (int u : a.offsets()) {
        scratch = rows_[a.cls()][b.cls()][u];
        scratch &= b.bits();
        total += static_cast<std::int64_t>(scratch.count());
    }
    return total;
}

auto TripartiteGraph::edges() const -> std::vector<std::pair<VertexRef, VertexRef>>
{
    std::vector<std::pair<VertexRef, VertexRef>> result;
    for (int i = 0; i < num_classes; ++i)
        for (int j = i + 1; j < num_classes; ++j)
            for (int u = 0; u < n_; ++u) {
                const auto & r = rows_[i][j][u];
                for (auto v = r.find_first(); v != Bits::npos; v = r.find_next(v))
                    result.emplace_back(VertexRef{i, u}, VertexRef{j, static_cast<int>(v)});
            }
    return result;
}

auto TripartiteGraph::to_builder() const -> GraphBuilder
{
    GraphBuilder b(n_);
    for (const auto & [x, y] : edges())
        b.add_edge(x, y);
    return b;
}

auto build(int n_per_class, const std::vector<std::pair<VertexRef, VertexRef>> & edges) -> TripartiteGraph
{
    GraphBuilder b(n_per_class);
    for (const auto & [x, y] : edges)
        b.add_edge(x, y);
    return std::move(b).build();
}

auto bar_min_degree(const TripartiteGraph & g) -> int
{
    int best = g.n();
    for (int i = 0; i < num_classes; ++i)
        for (int j = 0; j < num_classes; ++j)
            if (i != j)
                for (int u = 0; u < g.n(); ++u)
                    best = std::min(best, static_cast<int>(g.row({i, u}, j).count()));
    return best;
}

auto density(const VertexSet & a, const VertexSet & b, const TripartiteGraph & g) -> Rational
{
    if (a.cls() == b.cls())
        throw SameClass("density between sets of one class");
    if (a.empty() || b.empty())
        throw EmptySet("density of an empty set");
    return Rational(g.edge_count(a, b), static_cast<std::int64_t>(a.size()) * b.size());
}

auto induced(const TripartiteGraph & g, const VertexSet & s1, const VertexSet & s2, const VertexSet & s3) -> InducedGraph
{
    const std::array<const VertexSet *, num_classes> sets{&s1, &s2, &s3};
    for (int c = 0; c < num_classes; ++c)
        if (sets[c]->cls() != c)
            throw SameClass("induced: set " + std::to_string(c + 1) + " is not from class " + std::to_string(c + 1));
    if (s1.size() != s2.size() || s1.size() != s3.size())
        throw std::invalid_argument("induced: sets must have equal sizes");

    InducedGraph result;
    std::array<std::vector<int>, num_classes> to_new;
    for (int c = 0; c < num_classes; ++c) {
        result.to_original[c] = sets[c]->offsets();
        to_new[c].assign(static_cast<std::size_t>(g.n()), -1);
        for (std::size_t k = 0; k < result.to_original[c].size(); ++k)
            to_new[c][result.to_original[c][k]] = static_cast<int>(k);
    }

    GraphBuilder b(s1.size());
    for (int i = 0; i < num_classes; ++i)
        for (int j = i + 1; j < num_classes; ++j)
            for (int u : result.to_original[i]) {
                Bits r = g.row({i, u}, j) & sets[j]->bits();
                for (auto v = r.find_first(); v != Bits::npos; v = r.find_next(v))
                    b.add_edge({i, to_new[i][u]}, {j, to_new[j][v]});
            }
    result.graph = std::move(b).build();
    return result;
}

void write_graph(std::ostream & out, const TripartiteGraph & g, int h)
{
    out << "tripartite N=" << g.n() << " h=" << h << '\n';
    for (const auto & [a, b] : g.edges())
        out << "e " << a.cls + 1 << ' ' << a.offset << ' ' << b.cls + 1 << ' ' << b.offset << '\n';
}

auto write_graph(const TripartiteGraph & g, int h) -> std::string
{
    std::ostringstream out;
    write_graph(out, g, h);
    return out.str();
}

namespace
{
    auto parse_int(const std::string & token, const std::string & what, int line_no) -> int
    {
        std::size_t pos = 0;
        long value = 0;
        try {
            value = std::stol(token, &pos);
        }
        catch (const std::exception &) {
            throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " '" + token + "'");
        }
        if (pos != token.size() || value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max())
            throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " '" + token + "'");
        return static_cast<int>(value);
    }

    auto parse_key(const std::string & token, const std::string & key, int line_no) -> int
    {
        if (token.rfind(key + "=", 0) != 0)
            throw ParseError("line " + std::to_string(line_no) + ": expected " + key + "=<int>");
        return parse_int(token.substr(key.size() + 1), key, line_no);
    }
}

auto read_graph(std::istream & in) -> ParsedGraph
{
    std::string line;
    int line_no = 0;
    std::optional<GraphBuilder> builder;
    int h = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream tokens(line);
        std::vector<std::string> words;
        for (std::string w; tokens >> w;)
            words.push_back(w);
        if (words.empty())
            continue;

        if (! builder) {
            if (words.size() != 3 || words[0] != "tripartite")
                throw ParseError("line " + std::to_string(line_no) + ": expected header 'tripartite N=<int> h=<int>'");
            int n = parse_key(words[1], "N", line_no);
            h = parse_key(words[2], "h", line_no);
            if (n < 1 || h < 0)
                throw ParseError("line " + std::to_string(line_no) + ": N must be positive and h non-negative");
            builder.emplace(n);
            continue;
        }

        if (words.size() != 5 || words[0] != "e")
            throw ParseError("line " + std::to_string(line_no) + ": expected 'e <ci> <u> <cj> <v>'");
        VertexRef a{parse_int(words[1], "class", line_no) - 1, parse_int(words[2], "offset", line_no)};
        VertexRef b{parse_int(words[3], "class", line_no) - 1, parse_int(words[4], "offset", line_no)};
        try {
            builder->add_edge(a, b);
        }
        catch (const std::logic_error & e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }

    if (! builder)
        throw ParseError("missing header");
    return ParsedGraph{std::move(*builder).build(), h};
}

auto read_graph(const std::string & text) -> ParsedGraph
{
    std::istringstream in(text);
    return read_graph(in);
}

auto read_graph_file(const std::string & path) -> ParsedGraph
{
    std::ifstream in(path);
    if (! in)
        throw ParseError("cannot open " + path);
    return read_graph(in);
}

}
