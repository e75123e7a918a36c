#ifndef TILING_REPORT_HH
#define TILING_REPORT_HH

#include <tiling/certificate.hh>
#include <tiling/exact_solver.hh>
#include <tiling/structure.hh>
#include <tiling/tiler.hh>

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <variant>

namespace tiling {

using Json = nlohmann::ordered_json;

class MalformedJson : public std::runtime_error
{
public:
    explicit MalformedJson(const std::string & what) : std::runtime_error(what) {}
};

// Classes are written 1-based everywhere in JSON; offsets stay 0-based.
// Rationals are written as "p/q" strings so comparisons stay exact.

auto rational_to_string(Rational r) -> std::string;
/// Accepts "p/q", an integer or a finite decimal such as "0.05".
auto parse_rational(const std::string & text) -> Rational;

auto to_json(const VertexSet & s) -> Json;
auto to_json(const FactorCertificate & f) -> Json;
auto to_json(const NoFactorCertificate & c) -> Json;
auto to_json(const Unknown & u) -> Json;
auto to_json(const NotFound & n) -> Json;
auto to_json(const ExtremeWitness & w) -> Json;
auto to_json(const ApproxWitness & w) -> Json;
auto to_json(const VeryExtremeWitness & w) -> Json;
auto to_json(const ThresholdReport & t) -> Json;
auto to_json(const StructureReport & s) -> Json;
auto to_json(const SolveResult & r) -> Json;

auto factor_from_json(const Json & j) -> FactorCertificate;
auto no_factor_from_json(const Json & j) -> NoFactorCertificate;

using Certificate = std::variant<FactorCertificate, NoFactorCertificate>;

/// Reads a bare certificate, or the "certificate" member of a solve report
/// or generator sidecar.
auto certificate_from_json(const Json & j) -> Certificate;

auto solve_outcome_name(SolveOutcome o) -> std::string;

}

#endif
