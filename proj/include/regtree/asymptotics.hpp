#pragma once

// Large-n behaviour of P(X >= k): the Stirling form of the tail, the
// three-factor expression at k = n^rho, its limit trichotomy, the scaled
// tail law of X / sqrt(n) and the constant c(d) with E(X) ~ c(d) sqrt(n).
//
// Finite-n expressions are evaluated in log space with log1p so that
// factors like ((n-1)/(n-k))^(n-1) neither overflow nor lose the small
// deviation from 1 that carries the whole answer.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "regtree/exact.hpp"
#include "regtree/params.hpp"

namespace regtree {

struct LimitQuery {
    std::int64_t d = 3;
    double rho = 0.5;
    std::optional<double> x;  // scale factor for the law of X / sqrt(n)

    void validate() const {
        require_asymptotic_degree(d);
        if (!(rho >= 0.0 && rho < 1.0)) {
            throw ParameterError("rho must lie in [0, 1) (got " + std::to_string(rho) + ")");
        }
        if (x && !(*x > 0.0)) {
            throw ParameterError("x must be positive (got " + std::to_string(*x) + ")");
        }
    }
};

struct AsymptoticPoint {
    std::int64_t n;
    double value;
    double gap;  // |value - predicted|
};

struct AsymptoticReport {
    LimitQuery query;
    std::vector<AsymptoticPoint> points;
    double predicted = 0.0;

    double final_gap() const { return points.empty() ? 0.0 : points.back().gap; }
};

/// Stirling approximation of P(X >= k):
///   ((n-1)/(n-k))^(n-1/2) / ((dn-1)/(dn-2k+1))^(dn/2) * ((dn-dk)/(dn-2k+1))^(k-1).
/// The form divides by n - k, so k = n falls back to the exact product in log space.
inline double stirling_tail_approx(const Params& params, std::int64_t k) {
    require_tree_size(params, k);
    if (k == params.n()) {
        return std::exp(tail_log(params, k));
    }
    const auto n = static_cast<long double>(params.n());
    const auto d = static_cast<long double>(params.d());
    const auto kk = static_cast<long double>(k);
    const long double dn = d * n;

    const long double vertices = (n - 0.5L) * std::log1p((kk - 1.0L) / (n - kk));
    const long double pairing = (dn / 2.0L) * std::log1p(-(2.0L * kk - 2.0L) / (dn - 1.0L));
    const long double fresh = (kk - 1.0L) * std::log1p(-(d * kk - 2.0L * kk + 1.0L) / (dn - 2.0L * kk + 1.0L));
    return static_cast<double>(std::exp(vertices + pairing + fresh));
}

/// k = round(n^rho), the tree size probed by the limit expression.
inline std::int64_t rho_tree_size(std::int64_t n, double rho) {
    return static_cast<std::int64_t>(std::llround(std::pow(static_cast<long double>(n), static_cast<long double>(rho))));
}

/// ((n-1)/(n-k))^(n-1) * ((dn-2k+1)/(dn-1))^(dn/2) * ((dn-dk)/(dn-2k+1))^(k-1) at k = round(n^rho).
inline double limit_expression(std::int64_t n, const LimitQuery& query) {
    query.validate();
    const std::int64_t k = rho_tree_size(n, query.rho);
    if (n < 2 || k >= n) {
        throw ParameterError("limit_expression needs n^rho < n (n=" + std::to_string(n) +
                             ", k=" + std::to_string(k) + ")");
    }
    const auto nn = static_cast<long double>(n);
    const auto d = static_cast<long double>(query.d);
    const auto kk = static_cast<long double>(k);
    const long double dn = d * nn;

    const long double first = (nn - 1.0L) * std::log1p((kk - 1.0L) / (nn - kk));
    const long double second = (dn / 2.0L) * std::log1p(-(2.0L * kk - 2.0L) / (dn - 1.0L));
    const long double third = (kk - 1.0L) * std::log1p(-(d * kk - 2.0L * kk + 1.0L) / (dn - 2.0L * kk + 1.0L));
    return static_cast<double>(std::exp(first + second + third));
}

/// Pointwise limit of limit_expression: 1 below rho = 1/2, exp(-(d-2)/(2d)) at 1/2, 0 above.
inline double limit_value(const LimitQuery& query) {
    query.validate();
    if (query.rho < 0.5) {
        return 1.0;
    }
    if (query.rho == 0.5) {
        const auto d = static_cast<double>(query.d);
        return std::exp(-(d - 2.0) / (2.0 * d));
    }
    return 0.0;
}

/// Limiting tail of X / sqrt(n): exp(-x^2 (d-2) / (2d)).
inline double scaled_tail(std::int64_t d, double x) {
    require_asymptotic_degree(d);
    if (!(x > 0.0)) {
        throw ParameterError("x must be positive (got " + std::to_string(x) + ")");
    }
    const auto dd = static_cast<double>(d);
    return std::exp(-x * x * (dd - 2.0) / (2.0 * dd));
}

inline double scaled_tail(const LimitQuery& query) {
    query.validate();
    if (!query.x) {
        throw ParameterError("scaled_tail needs a scale factor x");
    }
    return scaled_tail(query.d, *query.x);
}

/// c(d) = integral_0^inf exp(-x^2 (d-2)/(2d)) dx = sqrt(pi d / (2 (d-2))), so E(X) / sqrt(n) -> c(d).
inline double expectation_constant(std::int64_t d) {
    require_asymptotic_degree(d);
    const auto dd = static_cast<double>(d);
    return std::sqrt(std::numbers::pi * dd / (2.0 * (dd - 2.0)));
}

/// P(X >= round(x sqrt(n))) at finite n, from the exact tail in log space.
inline double scaled_tail_finite(std::int64_t n, std::int64_t d, double x) {
    const Params params(n, d);
    const auto k = std::max<std::int64_t>(1, std::llround(x * std::sqrt(static_cast<double>(n))));
    return k > n ? 0.0 : std::exp(tail_log(params, k));
}

/// Finite-n values of the limit expression (or, when query.x is set, of the scaled tail)
/// along an increasing grid, with their gaps to the predicted limit.
inline AsymptoticReport convergence_report(const LimitQuery& query, const std::vector<std::int64_t>& n_grid) {
    query.validate();
    if (n_grid.empty()) {
        throw ParameterError("convergence_report needs a non-empty n grid");
    }
    for (std::size_t i = 1; i < n_grid.size(); ++i) {
        if (n_grid[i] <= n_grid[i - 1]) {
            throw ParameterError("n grid must be strictly increasing");
        }
    }

    AsymptoticReport report{query, {}, query.x ? scaled_tail(query) : limit_value(query)};
    report.points.reserve(n_grid.size());
    for (const std::int64_t n : n_grid) {
        const double value = query.x ? scaled_tail_finite(n, query.d, *query.x) : limit_expression(n, query);
        report.points.push_back({n, value, std::abs(value - report.predicted)});
    }
    return report;
}

}  // namespace regtree
