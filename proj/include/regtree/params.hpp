#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace regtree {

/// Invalid arguments: bad (n, d), k out of range, inconsistent options.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An exact computation was requested beyond its configured size limit.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Largest n accepted by the exact-rational routines unless overridden.
inline constexpr std::int64_t kDefaultExactCap = 2000;

/// The ensemble of random d-regular multigraphs on n vertices (configuration model).
///
/// Requires n >= 1, d >= 2 and n*d even so the n*d half-edges pair up.
class Params {
public:
    Params(std::int64_t n, std::int64_t d) : n_(n), d_(d) {
        if (n < 1) {
            throw ParameterError("n must be at least 1 (got " + std::to_string(n) + ")");
        }
        if (d < 2) {
            throw ParameterError("d must be at least 2 (got " + std::to_string(d) + ")");
        }
        if ((n * d) % 2 != 0) {
            throw ParameterError("n*d must be even so half-edges can be paired (n=" +
                                 std::to_string(n) + ", d=" + std::to_string(d) + ")");
        }
    }

    std::int64_t n() const noexcept { return n_; }
    std::int64_t d() const noexcept { return d_; }
    std::int64_t half_edges() const noexcept { return n_ * d_; }

    friend bool operator==(const Params&, const Params&) = default;

private:
    std::int64_t n_;
    std::int64_t d_;
};

/// Throws unless 1 <= k <= n.
inline void require_tree_size(const Params& params, std::int64_t k) {
    if (k < 1 || k > params.n()) {
        throw ParameterError("tree size k must satisfy 1 <= k <= n (k=" + std::to_string(k) +
                             ", n=" + std::to_string(params.n()) + ")");
    }
}

/// Asymptotic laws need d >= 3; at d = 2 the decay constant (d-2)/(2d) vanishes.
inline void require_asymptotic_degree(std::int64_t d) {
    if (d < 3) {
        throw ParameterError("asymptotic operations require d >= 3 (got " + std::to_string(d) + ")");
    }
}

}  // namespace regtree
