#ifndef TILING_CERTIFICATE_HH
#define TILING_CERTIFICATE_HH

#include <tiling/graph.hh>

#include <array>
#include <string>
#include <vector>

namespace tiling {

/// One copy of K_{h,h,h}: h offsets from each class, each list sorted.
struct KhhhCopy
{
    std::array<std::vector<int>, num_classes> parts;

    friend bool operator==(const KhhhCopy &, const KhhhCopy &) = default;
};

/// A perfect K_{h,h,h}-tiling.
struct FactorCertificate
{
    std::vector<KhhhCopy> copies;

    friend bool operator==(const FactorCertificate &, const FactorCertificate &) = default;
};

struct Verdict
{
    bool ok = true;
    std::string first_violation;

    explicit operator bool() const { return ok; }

    static auto pass() -> Verdict { return {}; }
    static auto fail(std::string why) -> Verdict { return {false, std::move(why)}; }
};

auto is_complete_tripartite(const TripartiteGraph & g, const KhhhCopy & copy) -> bool;

/// Checks that the copies are complete, pairwise disjoint, exactly N/h in
/// number, and cover every vertex.
auto verify_factor(const TripartiteGraph & g, int h, const FactorCertificate & cert) -> Verdict;

/// Sorts each part and orders copies by their smallest class-1 offset.
void canonicalize(FactorCertificate & cert);

}

#endif
