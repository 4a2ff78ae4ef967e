#pragma once

// Subcommands of the `regtree` tool. Each cmd_* takes a parsed RunConfig and
// returns the complete output document (CSV or JSON) as a string, so the
// binary only handles argument parsing, file output and exit codes.
//
// CSV schemas (first non-comment line is the header):
//   tail (exact)       k,p_exact_num,p_exact_den,p_float,p_stirling
//   tail (log)         k,log_p,p_float,p_stirling
//   expect             n,d,mode,e_exact,hyp2f1_exact,equal,e_float,hyp2f1_float,e_over_sqrt_n,c_d
//   limit              n,value,predicted,gap
//   simulate           k,p_hat,se            (summary as leading "# key=value" lines)
//   simulate --radius  r,count,fraction      (summary as leading "# key=value" lines)
//   enumerate          k,count,p_num,p_den,p_float,tail_num,tail_den
//   enumerate --radius r,count,p_num,p_den,p_float

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "regtree/asymptotics.hpp"
#include "regtree/exact.hpp"
#include "regtree/oracle.hpp"
#include "regtree/parallel.hpp"
#include "regtree/params.hpp"
#include "regtree/simulator.hpp"

namespace regtree::cli {

enum class OutputFormat { csv, json };

struct RunConfig {
    std::string subcommand;
    std::int64_t n = 0;
    std::int64_t d = 0;
    std::optional<std::int64_t> k;
    std::optional<std::int64_t> k_min;
    std::optional<std::int64_t> k_max;
    std::optional<std::string> mode;  // "exact" | "log"
    std::optional<double> rho;
    std::optional<double> x;
    bool scaled = false;
    std::uint64_t trials = 10000;
    std::uint64_t seed = kDefaultSeed;
    std::vector<std::int64_t> grid;
    OutputFormat format = OutputFormat::csv;
    std::string out_path;
    int threads = 0;
    bool radius = false;
    std::int64_t root = 0;
    std::int64_t exact_cap = kDefaultExactCap;
};

inline const std::vector<std::int64_t>& default_grid() {
    static const std::vector<std::int64_t> grid{1000, 10000, 100000, 1000000};
    return grid;
}

/// "%.15g" rendering.
inline std::string format_double(double v) {
    if (std::isinf(v)) {
        return v < 0 ? "-inf" : "inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

/// Decimal rendering of an exact rational at 15 significant digits; survives values below DBL_MIN.
inline std::string format_decimal(const ExactRational& q) {
    if (q == 0) {
        return "0";
    }
    const mpf_class f(q, 256);
    char* raw = nullptr;
    gmp_asprintf(&raw, "%.15Fg", f.get_mpf_t());
    std::string out(raw);
    void (*free_fn)(void*, std::size_t) = nullptr;
    mp_get_memory_functions(nullptr, nullptr, &free_fn);
    free_fn(raw, out.size() + 1);
    return out;
}

inline std::string format_seed(std::uint64_t seed) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "0x%" PRIx64, seed);
    return buf;
}

/// Parses a grid entry such as "1000", "1e6" or "65536" into an integer vertex count.
inline std::int64_t parse_grid_value(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ParameterError("invalid grid value '" + text + "'");
    }
    if (used != text.size() || !(v >= 1.0) || v > 9.0e15 || v != std::floor(v)) {
        throw ParameterError("grid values must be positive integers (got '" + text + "')");
    }
    return static_cast<std::int64_t>(v);
}

inline std::vector<std::int64_t> parse_grid(const std::string& text) {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_grid_value(item));
    }
    if (out.empty()) {
        throw ParameterError("empty grid");
    }
    return out;
}

inline std::uint64_t parse_seed(const std::string& text) {
    std::string digits;
    for (const char c : text) {
        if (c != '_' && c != '\'') {
            digits.push_back(c);
        }
    }
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(digits, &used, 0);
    } catch (const std::exception&) {
        throw ParameterError("invalid seed '" + text + "'");
    }
    if (used != digits.size()) {
        throw ParameterError("invalid seed '" + text + "'");
    }
    return v;
}

namespace detail {

inline std::string dump(const nlohmann::ordered_json& doc) { return doc.dump(2) + "\n"; }

inline TailMode resolve_mode(const RunConfig& cfg) {
    if (!cfg.mode) {
        return cfg.n <= cfg.exact_cap ? TailMode::exact : TailMode::log;
    }
    if (*cfg.mode == "exact") {
        return TailMode::exact;
    }
    if (*cfg.mode == "log") {
        return TailMode::log;
    }
    throw ParameterError("--mode must be 'exact' or 'log' (got '" + *cfg.mode + "')");
}

inline const char* mode_name(TailMode m) { return m == TailMode::exact ? "exact" : "log"; }

inline std::string num_str(const ExactRational& q) { return q.get_num().get_str(); }
inline std::string den_str(const ExactRational& q) { return q.get_den().get_str(); }
inline std::string frac_str(const ExactRational& q) { return q.get_str(); }

}  // namespace detail

/// Rows of P(X >= k): exact fractions (exact mode) or log-probabilities (log mode), with the Stirling form.
inline std::string cmd_tail(const RunConfig& cfg) {
    const Params params(cfg.n, cfg.d);
    const TailMode mode = detail::resolve_mode(cfg);
    if (cfg.k && (cfg.k_min || cfg.k_max)) {
        throw ParameterError("--k cannot be combined with --k-min/--k-max");
    }
    const std::int64_t lo = cfg.k ? *cfg.k : cfg.k_min.value_or(1);
    const std::int64_t hi = cfg.k ? *cfg.k : cfg.k_max.value_or(params.n());
    if (lo < 1 || hi > params.n() || lo > hi) {
        throw ParameterError("k range must satisfy 1 <= k-min <= k-max <= n");
    }

    std::ostringstream csv;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    if (mode == TailMode::exact) {
        const TailTable table = tail_table(params, TailMode::exact, cfg.exact_cap);
        csv << "k,p_exact_num,p_exact_den,p_float,p_stirling\n";
        for (std::int64_t k = lo; k <= hi; ++k) {
            const ExactRational& p = table.exact[static_cast<std::size_t>(k - 1)];
            const std::string stirling = format_double(stirling_tail_approx(params, k));
            csv << k << ',' << detail::num_str(p) << ',' << detail::den_str(p) << ',' << format_decimal(p) << ','
                << stirling << '\n';
            rows.push_back({{"k", k}, {"p_exact", detail::frac_str(p)}, {"p_float", format_decimal(p)},
                            {"p_stirling", stirling_tail_approx(params, k)}});
        }
    } else {
        csv << "k,log_p,p_float,p_stirling\n";
        for (std::int64_t k = lo; k <= hi; ++k) {
            const double lp = tail_log(params, k);
            const double stirling = stirling_tail_approx(params, k);
            csv << k << ',' << format_double(lp) << ',' << format_double(std::exp(lp)) << ','
                << format_double(stirling) << '\n';
            rows.push_back({{"k", k}, {"log_p", lp}, {"p_float", std::exp(lp)}, {"p_stirling", stirling}});
        }
    }
    if (cfg.format == OutputFormat::csv) {
        return csv.str();
    }
    nlohmann::ordered_json doc{{"command", "tail"}, {"n", params.n()}, {"d", params.d()},
                               {"mode", detail::mode_name(mode)}, {"rows", rows}};
    return detail::dump(doc);
}

/// E(X) and 2F1(1, 1-n; (1-dn)/2; d/2) side by side, with E(X)/sqrt(n) against c(d).
/// In exact mode a mismatch between the two is a runtime error.
inline std::string cmd_expect(const RunConfig& cfg) {
    const Params params(cfg.n, cfg.d);
    const TailMode mode = detail::resolve_mode(cfg);

    std::string e_exact;
    std::string f_exact;
    std::string equal;
    double e_float = 0.0;
    double f_float = 0.0;
    if (mode == TailMode::exact) {
        const ExactRational e = expectation(params, cfg.exact_cap);
        const ExactRational f = hyp2f1_terminating(params, cfg.exact_cap);
        if (e != f) {
            throw std::runtime_error("E(X) = " + e.get_str() + " differs from 2F1 = " + f.get_str());
        }
        e_exact = detail::frac_str(e);
        f_exact = detail::frac_str(f);
        equal = "true";
        e_float = e.get_d();
        f_float = f.get_d();
    } else {
        e_float = expectation_log(params);
        f_float = hyp2f1_terminating_float(params);
    }
    const double ratio = e_float / std::sqrt(static_cast<double>(params.n()));
    const bool has_c = params.d() >= 3;
    const double c_d = has_c ? expectation_constant(params.d()) : 0.0;

    if (cfg.format == OutputFormat::csv) {
        std::ostringstream csv;
        csv << "n,d,mode,e_exact,hyp2f1_exact,equal,e_float,hyp2f1_float,e_over_sqrt_n,c_d\n";
        csv << params.n() << ',' << params.d() << ',' << detail::mode_name(mode) << ',' << e_exact << ',' << f_exact
            << ',' << equal << ',' << format_double(e_float) << ',' << format_double(f_float) << ','
            << format_double(ratio) << ',' << (has_c ? format_double(c_d) : "") << '\n';
        return csv.str();
    }
    nlohmann::ordered_json doc{{"command", "expect"}, {"n", params.n()}, {"d", params.d()},
                               {"mode", detail::mode_name(mode)}};
    if (mode == TailMode::exact) {
        doc["e_exact"] = e_exact;
        doc["hyp2f1_exact"] = f_exact;
        doc["equal"] = true;
    }
    doc["e_float"] = e_float;
    doc["hyp2f1_float"] = f_float;
    doc["e_over_sqrt_n"] = ratio;
    doc["c_d"] = has_c ? nlohmann::ordered_json(c_d) : nlohmann::ordered_json(nullptr);
    return detail::dump(doc);
}

/// Finite-n limit expression (or scaled tail with --scaled --x) along the grid, with gaps to the limit.
inline std::string cmd_limit(const RunConfig& cfg) {
    if (cfg.scaled != cfg.x.has_value()) {
        throw ParameterError("--scaled and --x must be given together");
    }
    if (cfg.scaled && cfg.rho) {
        throw ParameterError("--rho does not apply to the scaled tail (--scaled)");
    }
    LimitQuery query{cfg.d, cfg.rho.value_or(0.5), cfg.x};
    const std::vector<std::int64_t>& grid = cfg.grid.empty() ? default_grid() : cfg.grid;
    const AsymptoticReport report = convergence_report(query, grid);

    if (cfg.format == OutputFormat::csv) {
        std::ostringstream csv;
        csv << "n,value,predicted,gap\n";
        for (const auto& pt : report.points) {
            csv << pt.n << ',' << format_double(pt.value) << ',' << format_double(report.predicted) << ','
                << format_double(pt.gap) << '\n';
        }
        return csv.str();
    }
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& pt : report.points) {
        rows.push_back({{"n", pt.n}, {"value", pt.value}, {"predicted", report.predicted}, {"gap", pt.gap}});
    }
    nlohmann::ordered_json doc{{"command", "limit"}, {"d", query.d}};
    if (query.x) {
        doc["x"] = *query.x;
    } else {
        doc["rho"] = query.rho;
    }
    doc["predicted"] = report.predicted;
    doc["final_gap"] = report.final_gap();
    doc["rows"] = rows;
    return detail::dump(doc);
}

/// Monte Carlo of the stopped growth process, or (with --radius) of tree_ball_radius on sampled graphs.
/// The worker count never appears in the output.
inline std::string cmd_simulate(const RunConfig& cfg) {
    const Params params(cfg.n, cfg.d);
    if (cfg.trials < 1) {
        throw ParameterError("--trials must be at least 1");
    }
    const unsigned threads = resolve_threads(cfg.threads);

    if (cfg.radius) {
        const RadiusSummary s = radius_monte_carlo(params, cfg.trials, cfg.seed, threads);
        const double half_log = 0.5 * std::log(static_cast<double>(params.n())) / std::log(static_cast<double>(params.d() - 1));
        if (cfg.format == OutputFormat::csv) {
            std::ostringstream csv;
            csv << "# command=simulate-radius\n# n=" << params.n() << "\n# d=" << params.d()
                << "\n# samples=" << s.samples << "\n# seed=" << format_seed(s.seed)
                << "\n# mean_radius=" << format_double(s.mean_radius)
                << "\n# mean_radius_se=" << format_double(s.mean_radius_se)
                << "\n# half_log_n=" << (params.d() > 2 ? format_double(half_log) : "") << '\n';
            csv << "r,count,fraction\n";
            for (std::size_t r = 0; r < s.radius_counts.size(); ++r) {
                csv << r << ',' << s.radius_counts[r] << ','
                    << format_double(static_cast<double>(s.radius_counts[r]) / static_cast<double>(s.samples)) << '\n';
            }
            return csv.str();
        }
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (std::size_t r = 0; r < s.radius_counts.size(); ++r) {
            rows.push_back({{"r", r}, {"count", s.radius_counts[r]},
                            {"fraction", static_cast<double>(s.radius_counts[r]) / static_cast<double>(s.samples)}});
        }
        nlohmann::ordered_json doc{{"command", "simulate-radius"}, {"n", params.n()}, {"d", params.d()},
                                   {"samples", s.samples}, {"seed", format_seed(s.seed)},
                                   {"mean_radius", s.mean_radius}, {"mean_radius_se", s.mean_radius_se},
                                   {"half_log_n", params.d() > 2 ? nlohmann::ordered_json(half_log) : nullptr},
                                   {"rows", rows}};
        return detail::dump(doc);
    }

    const MonteCarloSummary s = monte_carlo(params, cfg.trials, cfg.seed, threads);
    if (cfg.format == OutputFormat::csv) {
        std::ostringstream csv;
        csv << "# command=simulate\n# n=" << params.n() << "\n# d=" << params.d() << "\n# trials=" << s.trials
            << "\n# seed=" << format_seed(s.seed) << "\n# mean_x=" << format_double(s.mean_x)
            << "\n# mean_x_se=" << format_double(s.mean_x_se) << "\n# mean_radius=" << format_double(s.mean_radius)
            << '\n';
        csv << "k,p_hat,se\n";
        for (std::size_t i = 0; i < s.empirical_tail.size(); ++i) {
            csv << (i + 1) << ',' << format_double(s.empirical_tail[i]) << ',' << format_double(s.standard_error[i])
                << '\n';
        }
        return csv.str();
    }
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < s.empirical_tail.size(); ++i) {
        rows.push_back({{"k", i + 1}, {"p_hat", s.empirical_tail[i]}, {"se", s.standard_error[i]}});
    }
    nlohmann::ordered_json doc{{"command", "simulate"}, {"n", params.n()},       {"d", params.d()},
                               {"trials", s.trials},    {"seed", format_seed(s.seed)},
                               {"mean_x", s.mean_x},    {"mean_x_se", s.mean_x_se},
                               {"mean_radius", s.mean_radius}, {"rows", rows}};
    return detail::dump(doc);
}

/// Exact law of X (or, with --radius, of tree_ball_radius) by enumerating every matching.
inline std::string cmd_enumerate(const RunConfig& cfg) {
    const Params params(cfg.n, cfg.d);
    const EnumerationCounts counts = enumerate_exposures(params, cfg.root);

    std::ostringstream csv;
    csv << "# command=enumerate\n# n=" << params.n() << "\n# d=" << params.d() << "\n# root=" << cfg.root
        << "\n# matchings=" << counts.matchings.get_str() << '\n';
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();

    if (cfg.radius) {
        csv << "r,count,p_num,p_den,p_float\n";
        for (const auto& [r, c] : counts.radius_counts) {
            ExactRational p(c, counts.matchings);
            p.canonicalize();
            csv << r << ',' << c.get_str() << ',' << detail::num_str(p) << ',' << detail::den_str(p) << ','
                << format_decimal(p) << '\n';
            rows.push_back({{"r", r}, {"count", c.get_str()}, {"p", detail::frac_str(p)}, {"p_float", format_decimal(p)}});
        }
    } else {
        csv << "k,count,p_num,p_den,p_float,tail_num,tail_den\n";
        ExactInteger at_least = counts.matchings;
        for (std::int64_t k = 1; k <= params.n(); ++k) {
            const ExactInteger& c = counts.size_counts[static_cast<std::size_t>(k)];
            ExactRational p(c, counts.matchings);
            ExactRational tail(at_least, counts.matchings);
            p.canonicalize();
            tail.canonicalize();
            csv << k << ',' << c.get_str() << ',' << detail::num_str(p) << ',' << detail::den_str(p) << ','
                << format_decimal(p) << ',' << detail::num_str(tail) << ',' << detail::den_str(tail) << '\n';
            rows.push_back({{"k", k}, {"count", c.get_str()}, {"p", detail::frac_str(p)},
                            {"p_float", format_decimal(p)}, {"tail", detail::frac_str(tail)}});
            at_least -= c;
        }
    }
    if (cfg.format == OutputFormat::csv) {
        return csv.str();
    }
    nlohmann::ordered_json doc{{"command", cfg.radius ? "enumerate-radius" : "enumerate"},
                               {"n", params.n()},
                               {"d", params.d()},
                               {"root", cfg.root},
                               {"matchings", counts.matchings.get_str()},
                               {"rows", rows}};
    return detail::dump(doc);
}

inline std::string run(const RunConfig& cfg) {
    if (cfg.subcommand == "tail") {
        return cmd_tail(cfg);
    }
    if (cfg.subcommand == "expect") {
        return cmd_expect(cfg);
    }
    if (cfg.subcommand == "limit") {
        return cmd_limit(cfg);
    }
    if (cfg.subcommand == "simulate") {
        return cmd_simulate(cfg);
    }
    if (cfg.subcommand == "enumerate") {
        return cmd_enumerate(cfg);
    }
    throw ParameterError("unknown subcommand '" + cfg.subcommand + "'");
}

}  // namespace regtree::cli
