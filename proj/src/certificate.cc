#include <tiling/certificate.hh>

#include <algorithm>

namespace tiling {

auto is_complete_tripartite(const TripartiteGraph & g, const KhhhCopy & copy) -> bool
{
    for (int i = 0; i < num_classes; ++i)
        for (int j = i + 1; j < num_classes; ++j)
            for (int u : copy.parts[i])
                for (int v : copy.parts[j])
                    if (! g.has_edge({i, u}, {j, v}))
                        return false;
    return true;
}

auto verify_factor(const TripartiteGraph & g, int h, const FactorCertificate & cert) -> Verdict
{
    const int n = g.n();
    if (h <= 0)
        return Verdict::fail("h must be positive");
    if (n % h != 0)
        return Verdict::fail("h does not divide N");
    if (static_cast<int>(cert.copies.size()) != n / h)
        return Verdict::fail("expected " + std::to_string(n / h) + " copies, found " + std::to_string(cert.copies.size()));

    std::array<std::vector<bool>, num_classes> seen;
    for (auto & s : seen)
        s.assign(static_cast<std::size_t>(n), false);

    for (std::size_t k = 0; k < cert.copies.size(); ++k) {
        const auto & copy = cert.copies[k];
        for (int c = 0; c < num_classes; ++c) {
            if (static_cast<int>(copy.parts[c].size()) != h)
                return Verdict::fail("copy " + std::to_string(k) + " has " + std::to_string(copy.parts[c].size()) +
                    " vertices in class " + std::to_string(c + 1));
            for (int u : copy.parts[c]) {
                if (u < 0 || u >= n)
                    return Verdict::fail("copy " + std::to_string(k) + " uses out-of-range offset " + std::to_string(u));
                if (seen[c][u])
                    return Verdict::fail("vertex (" + std::to_string(c + 1) + ", " + std::to_string(u) + ") used twice");
                seen[c][u] = true;
            }
        }
        for (int i = 0; i < num_classes; ++i)
            for (int j = i + 1; j < num_classes; ++j)
                for (int u : copy.parts[i])
                    for (int v : copy.parts[j])
                        if (! g.has_edge({i, u}, {j, v}))
                            return Verdict::fail("copy " + std::to_string(k) + " misses edge (" + std::to_string(i + 1) + ", " +
                                std::to_string(u) + ") -- (" + std::to_string(j + 1) + ", " + std::to_string(v) + ")");
    }
    return Verdict::pass();
}

void canonicalize(FactorCertificate & cert)
{
    for (auto & copy : cert.copies)
        for (auto & part : copy.parts)
            std::sort(part.begin(), part.end());
    std::sort(cert.copies.begin(), cert.copies.end(), [](const KhhhCopy & a, const KhhhCopy & b) {
        return a.parts < b.parts;
    });
}

}
