#include <tiling/report.hh>

#include <charconv>
#include <cstdlib>

namespace tiling {

namespace
{
    auto classes_json(const BlockAssignment & a) -> Json
    {
        Json out = Json::array();
        for (const auto & row : a)
            out.push_back(row);
        return out;
    }

    auto nine_sets_json(const NineSets & sets) -> Json
    {
        Json out = Json::array();
        for (const auto & row : sets) {
            Json r = Json::array();
            for (const auto & s : row)
                r.push_back(s.offsets());
            out.push_back(r);
        }
        return out;
    }

    template <typename T>
    auto member(const Json & j, const char * key) -> T
    {
        if (! j.is_object() || ! j.contains(key))
            throw MalformedJson(std::string("missing member \"") + key + "\"");
        try {
            return j.at(key).get<T>();
        } catch (const nlohmann::json::exception &) {
            throw MalformedJson(std::string("member \"") + key + "\" has the wrong type");
        }
    }

    auto parse_int(const std::string & text, std::int64_t & out) -> bool
    {
        const char * end = text.data() + text.size();
        auto [p, ec] = std::from_chars(text.data(), end, out);
        return ec == std::errc() && p == end;
    }
}

auto rational_to_string(Rational r) -> std::string
{
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

auto parse_rational(const std::string & text) -> Rational
{
    const auto bad = [&] { return std::invalid_argument("not a rational number: \"" + text + "\""); };
    if (text.empty())
        throw bad();
    std::int64_t num = 0, den = 1;
    if (auto slash = text.find('/'); slash != std::string::npos) {
        if (! parse_int(text.substr(0, slash), num) || ! parse_int(text.substr(slash + 1), den) || den == 0)
            throw bad();
        return Rational(num, den);
    }
    if (auto dot = text.find('.'); dot != std::string::npos) {
        const std::string whole = text.substr(0, dot), frac = text.substr(dot + 1);
        if (frac.empty() || frac.size() > 12 || frac.find_first_not_of("0123456789") != std::string::npos)
            throw bad();
        std::int64_t w = 0, f = 0;
        if (! whole.empty() && whole != "-" && ! parse_int(whole, w))
            throw bad();
        parse_int(frac, f);
        for (std::size_t i = 0; i < frac.size(); ++i)
            den *= 10;
        const bool negative = ! whole.empty() && whole[0] == '-';
        Rational r(std::abs(w) * den + f, den);
        return negative ? -r : r;
    }
    if (! parse_int(text, num))
        throw bad();
    return Rational(num);
}

auto solve_outcome_name(SolveOutcome o) -> std::string
{
    switch (o) {
    case SolveOutcome::factor:
        return "factor";
    case SolveOutcome::no_factor:
        return "no_factor";
    case SolveOutcome::structure_only:
        return "structure_only";
    case SolveOutcome::unknown:
        return "unknown";
    }
    return "unknown";
}

auto to_json(const VertexSet & s) -> Json
{
    return {{"class", s.cls() + 1}, {"offsets", s.offsets()}};
}

auto to_json(const FactorCertificate & f) -> Json
{
    Json copies = Json::array();
    for (const auto & c : f.copies)
        copies.push_back({c.parts[0], c.parts[1], c.parts[2]});
    return {{"kind", "factor"}, {"copies", copies}};
}

auto to_json(const NoFactorCertificate & c) -> Json
{
    Json j = {{"kind", "no_factor"}, {"reason", c.kind == NoFactorKind::column_argument ? "column_argument" : "exhausted"}};
    if (c.kind == NoFactorKind::exhausted_search) {
        j["nodes"] = c.nodes;
        return j;
    }
    const auto & p = c.premises;
    j["columns"] = classes_json(c.columns);
    j["premises"] = {
        {"h", p.params.h},
        {"q", p.params.q},
        {"r", p.params.r},
        {"column_sizes", p.column_sizes},
        {"max_column_degree", p.max_column_degree},
        {"columns_triangle_free", p.columns_triangle_free},
        {"columns_c4_free", p.columns_c4_free},
        {"copies_needed", p.copies_needed},
        {"copies_available", p.copies_available},
    };
    return j;
}

auto to_json(const Unknown & u) -> Json
{
    return {{"kind", "unknown"}, {"nodes", u.nodes}, {"reason", u.reason}};
}

auto to_json(const NotFound & n) -> Json
{
    return {{"kind", "not_found"}, {"reason", n.reason}, {"exhaustive", n.exhaustive}};
}

auto to_json(const ExtremeWitness & w) -> Json
{
    Json sets = Json::array();
    for (const auto & s : w.sets)
        sets.push_back(s.offsets());
    return {{"kind", "extreme"},
        {"sets", sets},
        {"densities",
            {{"1-2", rational_to_string(w.densities[0])}, {"1-3", rational_to_string(w.densities[1])},
                {"2-3", rational_to_string(w.densities[2])}}}};
}

auto to_json(const ApproxWitness & w) -> Json
{
    Json parts = Json::array();
    for (std::size_t p = 0; p < w.parts.size(); ++p)
        parts.push_back({{"class", w.parts[p].cls() + 1}, {"offsets", w.parts[p].offsets()}, {"block_of", w.block_of[p]}});
    Json dens = Json::array();
    for (const auto & d : w.densities)
        dens.push_back({{"a", {d.a.part + 1, d.a.block + 1}}, {"b", {d.b.part + 1, d.b.block + 1}}, {"density", rational_to_string(d.density)}});
    return {{"kind", "approx"}, {"pattern", w.pattern}, {"m", w.m}, {"parts", parts}, {"nonedge_densities", dens}};
}

auto to_json(const VeryExtremeWitness & w) -> Json
{
    Json worst = Json::array();
    for (const auto & row : w.worst)
        worst.push_back(row);
    return {{"kind", "very_extreme"}, {"q", w.q}, {"sets", nine_sets_json(w.sets)}, {"worst_nonadjacencies", worst}};
}

auto to_json(const ThresholdReport & t) -> Json
{
    return {{"bar_min_degree", t.bar_min_degree},
        {"construction_level", t.construction_level},
        {"extreme_level", t.extreme_level},
        {"upper_level", t.upper_level},
        {"band", {t.band_low, t.band_high}}};
}

auto to_json(const StructureReport & s) -> Json
{
    Json j = {{"branch", branch_name(s.branch)}};
    j["extreme"] = s.extreme ? to_json(*s.extreme) : Json();
    j["theta33"] = s.theta33 ? to_json(*s.theta33) : Json();
    j["gamma3"] = s.gamma3 ? to_json(*s.gamma3) : Json();
    j["very_extreme"] = s.very_extreme ? to_json(*s.very_extreme) : Json();
    if (! s.very_extreme_note.empty())
        j["very_extreme_note"] = s.very_extreme_note;
    return j;
}

auto to_json(const SolveResult & r) -> Json
{
    Json j = {{"outcome", solve_outcome_name(r.outcome)}};
    if (r.factor) {
        j["certificate"] = to_json(*r.factor);
        j["factor_stage"] = r.factor_stage;
    } else if (r.no_factor) {
        j["certificate"] = to_json(*r.no_factor);
    }
    if (r.column_check)
        j["column_check"] = to_json(*r.column_check);
    if (r.unknown)
        j["unknown"] = to_json(*r.unknown);
    j["thresholds"] = to_json(r.thresholds);
    j["structure"] = r.structure ? to_json(*r.structure) : Json();
    Json trace = Json::array();
    for (const auto & s : r.trace)
        trace.push_back({{"stage", s.stage}, {"outcome", s.outcome}, {"detail", s.detail}});
    j["trace"] = trace;
    return j;
}

auto factor_from_json(const Json & j) -> FactorCertificate
{
    if (member<std::string>(j, "kind") != "factor")
        throw MalformedJson("certificate kind is not \"factor\"");
    const auto & copies = j.at("copies");
    if (! copies.is_array())
        throw MalformedJson("\"copies\" must be an array");
    FactorCertificate out;
    for (const auto & c : copies) {
        if (! c.is_array() || c.size() != num_classes)
            throw MalformedJson("every copy must list three classes");
        KhhhCopy copy;
        try {
            for (int k = 0; k < num_classes; ++k)
                copy.parts[k] = c[static_cast<std::size_t>(k)].get<std::vector<int>>();
        } catch (const nlohmann::json::exception &) {
            throw MalformedJson("copy parts must be arrays of offsets");
        }
        out.copies.push_back(std::move(copy));
    }
    return out;
}

auto no_factor_from_json(const Json & j) -> NoFactorCertificate
{
    if (member<std::string>(j, "kind") != "no_factor")
        throw MalformedJson("certificate kind is not \"no_factor\"");
    const auto reason = member<std::string>(j, "reason");
    NoFactorCertificate c;
    if (reason == "exhausted") {
        c.kind = NoFactorKind::exhausted_search;
        if (j.contains("nodes"))
            c.nodes = member<std::uint64_t>(j, "nodes");
        return c;
    }
    if (reason != "column_argument")
        throw MalformedJson("unknown no_factor reason \"" + reason + "\"");
    c.kind = NoFactorKind::column_argument;
    const auto columns = member<std::vector<std::vector<int>>>(j, "columns");
    if (columns.size() != num_classes)
        throw MalformedJson("\"columns\" must list three classes");
    for (int k = 0; k < num_classes; ++k)
        c.columns[k] = columns[static_cast<std::size_t>(k)];
    const Json & p = j.at("premises");
    c.premises.params = {member<int>(p, "h"), member<int>(p, "q"), member<int>(p, "r")};
    c.premises.column_sizes = member<std::array<int, 3>>(p, "column_sizes");
    c.premises.max_column_degree = member<std::array<int, 3>>(p, "max_column_degree");
    c.premises.columns_triangle_free = member<bool>(p, "columns_triangle_free");
    c.premises.columns_c4_free = member<bool>(p, "columns_c4_free");
    c.premises.copies_needed = member<int>(p, "copies_needed");
    c.premises.copies_available = member<int>(p, "copies_available");
    return c;
}

auto certificate_from_json(const Json & j) -> Certificate
{
    if (j.is_object() && ! j.contains("kind") && j.contains("certificate"))
        return certificate_from_json(j.at("certificate"));
    const auto kind = member<std::string>(j, "kind");
    if (kind == "factor")
        return factor_from_json(j);
    if (kind == "no_factor")
        return no_factor_from_json(j);
    throw MalformedJson("no certificate of kind \"factor\" or \"no_factor\" found");
}

}
