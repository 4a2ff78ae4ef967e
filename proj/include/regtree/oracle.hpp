#pragma once

// Exhaustive enumeration of every configuration on tiny instances. Each of
// the (dn-1)!! perfect matchings is equally likely, so counting exposure
// outcomes over all of them gives the exact law of X and of the tree-ball
// radius with no statistical error.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "regtree/exact.hpp"
#include "regtree/params.hpp"
#include "regtree/simulator.hpp"

namespace regtree {

/// Largest n*d the oracle will enumerate: 13!! = 135135 matchings.
inline constexpr std::int64_t kEnumerationCap = 14;

/// Raw outcome counts over all matchings for one root.
struct EnumerationCounts {
    ExactInteger matchings;
    std::vector<ExactInteger> size_counts;     // index X
    std::map<int, ExactInteger> radius_counts;
};

namespace detail {

/// Pairs the lowest unmatched half-edge with each higher unmatched one in turn,
/// visiting every perfect matching exactly once.
template <class Visit>
void for_each_matching(std::vector<std::uint32_t>& partners, std::vector<bool>& used, std::uint32_t from, Visit& visit) {
    const auto total = static_cast<std::uint32_t>(partners.size());
    while (from < total && used[from]) {
        ++from;
    }
    if (from == total) {
        visit(partners);
        return;
    }
    used[from] = true;
    for (std::uint32_t other = from + 1; other < total; ++other) {
        if (used[other]) {
            continue;
        }
        used[other] = true;
        partners[from] = other;
        partners[other] = from;
        for_each_matching(partners, used, from + 1, visit);
        used[other] = false;
    }
    used[from] = false;
}

}  // namespace detail

inline EnumerationCounts enumerate_exposures(const Params& params, std::int64_t root) {
    if (params.half_edges() > kEnumerationCap) {
        throw CapExceeded("enumeration is limited to n*d <= " + std::to_string(kEnumerationCap) + " (got n*d=" +
                          std::to_string(params.half_edges()) + ")");
    }
    if (root < 0 || root >= params.n()) {
        throw ParameterError("root vertex out of range");
    }
    const auto n = static_cast<std::uint32_t>(params.n());
    const auto d = static_cast<std::uint32_t>(params.d());
    const auto total = n * d;

    std::vector<std::uint64_t> sizes(n + 1, 0);
    std::map<int, std::uint64_t> radii;
    std::uint64_t matchings = 0;

    auto visit = [&](const std::vector<std::uint32_t>& partners) {
        const Configuration config(n, d, partners);
        const Exposure e = explore(config, static_cast<std::uint32_t>(root));
        ++sizes[static_cast<std::size_t>(e.growth.tree_size)];
        ++radii[e.ball_radius];
        ++matchings;
    };
    std::vector<std::uint32_t> partners(total, 0);
    std::vector<bool> used(total, false);
    detail::for_each_matching(partners, used, 0, visit);

    EnumerationCounts out;
    out.matchings = ExactInteger(static_cast<unsigned long>(matchings));
    for (const auto c : sizes) {
        out.size_counts.emplace_back(static_cast<unsigned long>(c));
    }
    for (const auto& [r, c] : radii) {
        out.radius_counts.emplace(r, ExactInteger(static_cast<unsigned long>(c)));
    }
    return out;
}

/// Exact law of X around `root` by brute force over all matchings.
inline ExactDistribution enumerate_distribution(const Params& params, std::int64_t root = 0) {
    const EnumerationCounts counts = enumerate_exposures(params, root);
    ExactDistribution out{params, {}, counts.matchings};
    for (std::int64_t k = 1; k <= params.n(); ++k) {
        ExactRational p(counts.size_counts[static_cast<std::size_t>(k)], counts.matchings);
        p.canonicalize();
        out.probabilities.push_back(p);
    }
    return out;
}

/// Exact law of tree_ball_radius around `root` by brute force over all matchings.
inline std::map<int, ExactRational> enumerate_radius_distribution(const Params& params, std::int64_t root = 0) {
    const EnumerationCounts counts = enumerate_exposures(params, root);
    std::map<int, ExactRational> out;
    for (const auto& [r, c] : counts.radius_counts) {
        ExactRational p(c, counts.matchings);
        p.canonicalize();
        out.emplace(r, p);
    }
    return out;
}

}  // namespace regtree
