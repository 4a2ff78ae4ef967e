#pragma once

// Exact and log-space evaluation of the tail law of the stopped tree-growth
// process on the configuration model:
//
//   P(X >= k) = prod_{i=1}^{k-1} (dn - id) / (dn - (2i - 1))
//             = d^{k-1} (n-1)!/(n-k)! * (dn - (2k-1))!! / (dn - 1)!!
//
// together with E(X) = sum_k P(X >= k) and the terminating series
// 2F1(1, 1-n; (1-dn)/2; d/2), which equals E(X).

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "regtree/params.hpp"

namespace regtree {

/// Reduced fraction with an arbitrary-precision numerator and positive denominator.
using ExactRational = mpq_class;
using ExactInteger = mpz_class;

namespace detail {

inline unsigned long to_ulong(std::int64_t v) {
    if (v < 0 || static_cast<std::uint64_t>(v) > std::numeric_limits<unsigned long>::max()) {
        throw ParameterError("value out of range for exact arithmetic: " + std::to_string(v));
    }
    return static_cast<unsigned long>(v);
}

inline void require_exact_cap(const Params& params, std::int64_t cap) {
    if (params.n() > cap) {
        throw CapExceeded("exact evaluation is limited to n <= " + std::to_string(cap) + " (got n=" +
                          std::to_string(params.n()) +
                          "); use the log-space routines (tail_log / expectation_log) instead");
    }
}

}  // namespace detail

/// m!! for odd m >= -1, with (-1)!! = 1.
inline ExactInteger odd_double_factorial(std::int64_t m) {
    if (m < -1 || (m % 2 == 0)) {
        throw ParameterError("odd_double_factorial expects an odd m >= -1 (got " + std::to_string(m) + ")");
    }
    ExactInteger out;
    if (m == -1) {
        out = 1;
    } else {
        mpz_2fac_ui(out.get_mpz_t(), detail::to_ulong(m));
    }
    return out;
}

inline ExactInteger factorial(std::int64_t m) {
    ExactInteger out;
    mpz_fac_ui(out.get_mpz_t(), detail::to_ulong(m));
    return out;
}

/// P(X >= k) as the running product of survival ratios; k = 1 is the empty product.
inline ExactRational tail_product(const Params& params, std::int64_t k) {
    require_tree_size(params, k);
    const std::int64_t dn = params.half_edges();
    ExactInteger num = 1;
    ExactInteger den = 1;
    for (std::int64_t i = 1; i < k; ++i) {
        num *= detail::to_ulong(dn - i * params.d());
        den *= detail::to_ulong(dn - (2 * i - 1));
    }
    ExactRational out(num, den);
    out.canonicalize();
    return out;
}

/// P(X >= k) through factorials and odd double factorials.
inline ExactRational tail_double_factorial(const Params& params, std::int64_t k) {
    require_tree_size(params, k);
    const std::int64_t n = params.n();
    const std::int64_t dn = params.half_edges();

    ExactInteger d_pow;
    mpz_ui_pow_ui(d_pow.get_mpz_t(), detail::to_ulong(params.d()), detail::to_ulong(k - 1));

    ExactRational out(d_pow * factorial(n - 1) * odd_double_factorial(dn - (2 * k - 1)),
                      factorial(n - k) * odd_double_factorial(dn - 1));
    out.canonicalize();
    return out;
}

/// ln((2m-1)!!) = lnGamma(2m+1) - m ln 2 - lnGamma(m+1), for odd argument 2m-1 >= -1.
inline long double log_odd_double_factorial(std::int64_t odd) {
    if (odd < -1 || (odd % 2 == 0)) {
        throw ParameterError("log_odd_double_factorial expects an odd argument >= -1");
    }
    const long double m = static_cast<long double>((odd + 1) / 2);
    return std::lgamma(2.0L * m + 1.0L) - m * std::log(2.0L) - std::lgamma(m + 1.0L);
}

/// Below this many factors tail_log sums log1p of the product terms instead of using log-gamma.
inline constexpr std::int64_t kDirectLogTerms = 64;

/// ln P(X >= k) from the double-factorial closed form via log-gamma.
/// Returns -inf for k > n.
inline double tail_log(const Params& params, std::int64_t k) {
    if (k > params.n() && k >= 1) {
        return -std::numeric_limits<double>::infinity();
    }
    require_tree_size(params, k);
    if (k == 1) {
        return 0.0;
    }
    const auto n = static_cast<long double>(params.n());
    const auto d = static_cast<long double>(params.d());
    const auto kk = static_cast<long double>(k);
    const std::int64_t dn = params.half_edges();

    // For short products ln P is tiny and the gamma differences cancel; sum the factors directly.
    if (k <= kDirectLogTerms) {
        long double acc = 0.0L;
        for (std::int64_t i = 1; i < k; ++i) {
            const auto closing = static_cast<long double>(i * (params.d() - 2) + 1);
            acc += std::log1p(-closing / static_cast<long double>(dn - (2 * i - 1)));
        }
        return static_cast<double>(acc);
    }

    const long double value = (kk - 1.0L) * std::log(d) + std::lgamma(n) - std::lgamma(n - kk + 1.0L) +
                              log_odd_double_factorial(dn - (2 * k - 1)) - log_odd_double_factorial(dn - 1);
    // Rounding in the gamma differences can push a near-zero log slightly positive.
    return static_cast<double>(std::min(value, 0.0L));
}

/// E(X) = sum_{k=1}^{n} P(X >= k), exactly.
inline ExactRational expectation(const Params& params, std::int64_t cap = kDefaultExactCap) {
    detail::require_exact_cap(params, cap);
    const std::int64_t dn = params.half_edges();
    // Horner form: 1 + r_1 (1 + r_2 (1 + ... (1 + r_{n-1})))
    ExactRational acc = 1;
    for (std::int64_t i = params.n() - 1; i >= 1; --i) {
        ExactRational ratio(ExactInteger(detail::to_ulong(dn - i * params.d())),
                            ExactInteger(detail::to_ulong(dn - (2 * i - 1))));
        ratio.canonicalize();
        acc = 1 + ratio * acc;
    }
    return acc;
}

/// E(X) as a float, summing exp(tail_log) until the remaining terms are negligible.
inline double expectation_log(const Params& params) {
    double sum = 0.0;
    for (std::int64_t k = 1; k <= params.n(); ++k) {
        const double term = std::exp(tail_log(params, k));
        sum += term;
        if (term < sum * 1e-18) {
            break;
        }
    }
    return sum;
}

/// Terminating series sum_{k=0}^{-b} (a)_k (b)_k / (c)_k * z^k / k! for a non-positive integer b.
///
/// Works for any field type constructible from an integer (ExactRational, long double, ...).
/// Throws if some (c)_k in the range vanishes.
template <class T>
T hyp2f1_terminating_series(const T& a, std::int64_t b, const T& c, const T& z) {
    if (b > 0) {
        throw ParameterError("terminating 2F1 requires a non-positive integer b (got " + std::to_string(b) + ")");
    }
    T term(1);
    T sum(1);
    for (std::int64_t k = 0; k < -b; ++k) {
        const T c_k = c + T(static_cast<long>(k));
        if (c_k == T(0)) {
            throw ParameterError("terminating 2F1: (c)_k vanishes before the series terminates");
        }
        term = term * (a + T(static_cast<long>(k))) * T(static_cast<long>(b + k)) / (c_k * T(static_cast<long>(k + 1))) * z;
        sum += term;
    }
    return sum;
}

/// 2F1(1, 1-n; (1-dn)/2; d/2), which equals E(X).
inline ExactRational hyp2f1_terminating(const Params& params, std::int64_t cap = kDefaultExactCap) {
    detail::require_exact_cap(params, cap);
    const ExactRational a(1);
    ExactRational c(1 - params.half_edges(), 2);
    ExactRational z(params.d(), 2);
    c.canonicalize();
    z.canonicalize();
    return hyp2f1_terminating_series(a, 1 - params.n(), c, z);
}

/// Floating evaluation of the same series (terms are all positive here, so no cancellation).
inline double hyp2f1_terminating_float(const Params& params) {
    const long double c = (1.0L - static_cast<long double>(params.half_edges())) / 2.0L;
    const long double z = static_cast<long double>(params.d()) / 2.0L;
    return static_cast<double>(hyp2f1_terminating_series<long double>(1.0L, 1 - params.n(), c, z));
}

enum class TailMode { exact, log };

/// P(X >= k) for k = 1..n, stored at index k - 1.
struct TailTable {
    Params params;
    TailMode mode;
    std::vector<ExactRational> exact;  // filled in exact mode
    std::vector<double> log_values;    // filled in log mode

    /// P(X >= k) with P(X >= k) = 0 for k > n. Exact mode only.
    ExactRational exact_at(std::int64_t k) const {
        if (mode != TailMode::exact) {
            throw ParameterError("tail table is not in exact mode");
        }
        if (k < 1) {
            throw ParameterError("tail index must be >= 1");
        }
        return k > params.n() ? ExactRational(0) : exact[static_cast<std::size_t>(k - 1)];
    }

    /// ln P(X >= k); -inf for k > n. Either mode.
    double log_at(std::int64_t k) const {
        if (k < 1) {
            throw ParameterError("tail index must be >= 1");
        }
        if (k > params.n()) {
            return -std::numeric_limits<double>::infinity();
        }
        const auto idx = static_cast<std::size_t>(k - 1);
        if (mode == TailMode::log) {
            return log_values[idx];
        }
        const ExactRational& q = exact[idx];
        // ln(p/q) = ln p - ln q, computed via mantissa/exponent to survive tiny values.
        long e_num = 0;
        long e_den = 0;
        const double m_num = mpz_get_d_2exp(&e_num, q.get_num_mpz_t());
        const double m_den = mpz_get_d_2exp(&e_den, q.get_den_mpz_t());
        return std::log(m_num) - std::log(m_den) + static_cast<double>(e_num - e_den) * std::log(2.0);
    }
};

inline TailTable tail_table(const Params& params, TailMode mode, std::int64_t cap = kDefaultExactCap) {
    TailTable table{params, mode, {}, {}};
    const auto n = static_cast<std::size_t>(params.n());
    if (mode == TailMode::exact) {
        detail::require_exact_cap(params, cap);
        table.exact.reserve(n);
        const std::int64_t dn = params.half_edges();
        ExactRational running(1);
        table.exact.push_back(running);
        for (std::int64_t k = 2; k <= params.n(); ++k) {
            const std::int64_t i = k - 1;
            ExactRational ratio(ExactInteger(detail::to_ulong(dn - i * params.d())),
                                ExactInteger(detail::to_ulong(dn - (2 * i - 1))));
            ratio.canonicalize();
            running *= ratio;
            table.exact.push_back(running);
        }
    } else {
        table.log_values.reserve(n);
        for (std::int64_t k = 1; k <= params.n(); ++k) {
            table.log_values.push_back(tail_log(params, k));
        }
    }
    return table;
}

/// Exact law of X: P(X = k) for k = 1..n (index k - 1) over the (dn - 1)!! matchings.
struct ExactDistribution {
    Params params;
    std::vector<ExactRational> probabilities;
    ExactInteger matching_count;

    ExactRational total() const {
        ExactRational sum(0);
        for (const auto& p : probabilities) {
            sum += p;
        }
        return sum;
    }

    /// P(X >= k) recovered from the point masses.
    ExactRational tail(std::int64_t k) const {
        ExactRational sum(0);
        for (std::int64_t j = std::max<std::int64_t>(k, 1); j <= params.n(); ++j) {
            sum += probabilities[static_cast<std::size_t>(j - 1)];
        }
        return sum;
    }
};

/// P(X = k) = P(X >= k) - P(X >= k+1), with P(X >= n+1) = 0.
inline ExactDistribution full_distribution(const TailTable& tail) {
    if (tail.mode != TailMode::exact) {
        throw ParameterError("full_distribution needs an exact-mode tail table");
    }
    ExactDistribution out{tail.params, {}, odd_double_factorial(tail.params.half_edges() - 1)};
    out.probabilities.reserve(tail.exact.size());
    for (std::int64_t k = 1; k <= tail.params.n(); ++k) {
        out.probabilities.push_back(tail.exact_at(k) - tail.exact_at(k + 1));
    }
    return out;
}

}  // namespace regtree
