// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "regtree/asymptotics.hpp"
#include "regtree/exact.hpp"
#include "regtree/oracle.hpp"
#include "regtree/simulator.hpp"

namespace {

using regtree::Params;

struct Outcome {
    bool pass = true;
    std::string detail;
};

void fail(Outcome& o, const std::string& why) {
    if (o.pass) {
        o.detail.clear();
    }
    o.pass = false;
    if (o.detail.size() < 600) {
        o.detail += why + "; ";
    }
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(8);
    s << v;
    return s.str();
}

std::vector<Params> identity_grid() {
    std::vector<Params> out;
    for (const long d : {3L, 4L, 5L, 10L}) {
        for (const long n : {2L, 4L, 10L, 50L, 200L}) {
            if ((n * d) % 2 == 0) {
                out.emplace_back(n, d);
            }
        }
    }
    return out;
}

// 1. E(X) equals the terminating 2F1 exactly.
Outcome hypergeometric_identity() {
    Outcome o;
    int checked = 0;
    for (const Params& p : identity_grid()) {
        if (regtree::expectation(p) != regtree::hyp2f1_terminating(p)) {
            fail(o, "n=" + std::to_string(p.n()) + " d=" + std::to_string(p.d()));
        }
        ++checked;
    }
    if (o.pass) {
        o.detail = std::to_string(checked) + " (n, d) pairs equal as exact rationals";
    }
    return o;
}

// 2. Product form equals double-factorial form for every k.
Outcome closed_form_equivalence() {
    Outcome o;
    long checked = 0;
    for (const Params& p : identity_grid()) {
        for (long k = 1; k <= p.n(); ++k) {
            if (regtree::tail_product(p, k) != regtree::tail_double_factorial(p, k)) {
                fail(o, "n=" + std::to_string(p.n()) + " d=" + std::to_string(p.d()) + " k=" + std::to_string(k));
            }
            ++checked;
        }
    }
    if (o.pass) {
        o.detail = std::to_string(checked) + " (n, d, k) triples equal";
    }
    return o;
}

// 3. Brute force over all matchings reproduces the tail formula.
Outcome enumeration_oracle() {
    Outcome o;
    for (const auto& [n, d] : std::vector<std::pair<long, long>>{{1, 2}, {2, 2}, {4, 3}, {2, 4}, {3, 4}}) {
        const Params p(n, d);
        const auto dist = regtree::enumerate_distribution(p);
        if (dist.matching_count != regtree::odd_double_factorial(p.half_edges() - 1)) {
            fail(o, "matching count n=" + std::to_string(n) + " d=" + std::to_string(d));
        }
        const auto formula = regtree::full_distribution(regtree::tail_table(p, regtree::TailMode::exact));
        if (dist.probabilities != formula.probabilities) {
            fail(o, "law differs n=" + std::to_string(n) + " d=" + std::to_string(d));
        }
    }
    if (o.pass) {
        o.detail = "5 instances match exactly; (dn-1)!! matchings counted";
    }
    return o;
}

// 4. Simulated tail within 3 SE of the exact tail; mean X / sqrt(n) within 5% of c(3).
Outcome simulator_vs_exact() {
    Outcome o;
    const Params p(10000, 3);
    const std::uint64_t trials = 100000;
    const auto s = regtree::monte_carlo(p, trials, regtree::kDefaultSeed);
    std::string detail;
    for (const long k : {2L, 10L, 50L, 100L}) {
        const double exact = std::exp(regtree::tail_log(p, k));
        const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(trials));
        const double z = std::abs(s.tail_at(k) - exact) / se;
        detail += "k=" + std::to_string(k) + " z=" + fmt(z) + " ";
        if (!(z <= 3.0)) {
            fail(o, "k=" + std::to_string(k) + " |z|=" + fmt(z));
        }
    }
    const double ratio = s.mean_x / std::sqrt(static_cast<double>(p.n()));
    const double rel = std::abs(ratio / regtree::expectation_constant(3) - 1.0);
    if (!(rel < 0.05)) {
        fail(o, "mean_x/sqrt(n)=" + fmt(ratio) + " rel=" + fmt(rel));
    }
    if (o.pass) {
        o.detail = detail + "mean_x/sqrt(n)=" + fmt(ratio) + " (rel " + fmt(rel) + ")";
    }
    return o;
}

// 5. Limit expression at n = 1e6 within 1e-2 of its limit.
Outcome limit_trichotomy() {
    Outcome o;
    double worst = 0.0;
    for (const long d : {3L, 4L, 10L}) {
        for (const double rho : {0.3, 0.5, 0.7}) {
            const regtree::LimitQuery q{d, rho, {}};
            const double gap = std::abs(regtree::limit_expression(1000000, q) - regtree::limit_value(q));
            worst = std::max(worst, gap);
            if (!(gap < 1e-2)) {
                fail(o, "d=" + std::to_string(d) + " rho=" + fmt(rho) + " gap=" + fmt(gap));
            }
        }
    }
    const double target = regtree::limit_value(regtree::LimitQuery{3, 0.5, {}});
    if (std::abs(target - 0.846482) > 5e-7) {
        fail(o, "limit at d=3, rho=1/2 is " + fmt(target));
    }
    if (o.pass) {
        o.detail = "worst gap " + fmt(worst) + "; target(d=3, rho=1/2)=" + fmt(target);
    }
    return o;
}

// 6. P(X >= round(x sqrt(n))) at n = 1e6, d = 3 within 1e-2 of exp(-x^2/6).
Outcome scaled_tail_law() {
    Outcome o;
    double worst = 0.0;
    const long n = 1000000;
    for (const double x : {0.5, 1.0, 2.0}) {
        const long k = std::llround(x * std::sqrt(static_cast<double>(n)));
        const double finite = std::exp(regtree::tail_log(Params(n, 3), k));
        const double gap = std::abs(finite - std::exp(-x * x / 6.0));
        worst = std::max(worst, gap);
        if (!(gap < 1e-2)) {
            fail(o, "x=" + fmt(x) + " gap=" + fmt(gap));
        }
    }
    if (o.pass) {
        o.detail = "worst gap " + fmt(worst);
    }
    return o;
}

// 7. Mean tree-ball radius at n = 2^16 in [6.5, 9.5]; quadrupling n adds 1 +- 0.5.
Outcome radius_law() {
    Outcome o;
    const auto small = regtree::radius_monte_carlo(Params(1L << 16, 3), 1000, regtree::kDefaultSeed);
    const auto large = regtree::radius_monte_carlo(Params(1L << 18, 3), 1000, regtree::kDefaultSeed + 1);
    if (!(small.mean_radius >= 6.5 && small.mean_radius <= 9.5)) {
        fail(o, "mean radius at 2^16 = " + fmt(small.mean_radius));
    }
    const double growth = large.mean_radius - small.mean_radius;
    if (!(std::abs(growth - 1.0) <= 0.5)) {
        fail(o, "growth under quadrupling = " + fmt(growth));
    }
    if (o.pass) {
        o.detail = "mean r(2^16)=" + fmt(small.mean_radius) + ", mean r(2^18)=" + fmt(large.mean_radius) +
                   ", growth " + fmt(growth);
    }
    return o;
}

// 8. Stirling form within 1% relative for n = 1e4, k <= 10 sqrt(n).
Outcome stirling_accuracy() {
    Outcome o;
    double worst = 0.0;
    const long n = 10000;
    for (const long d : {3L, 4L}) {
        const Params p(n, d);
        for (long k = 1; k <= 1000; ++k) {
            const double rel = std::abs(regtree::stirling_tail_approx(p, k) / std::exp(regtree::tail_log(p, k)) - 1.0);
            worst = std::max(worst, rel);
            if (!(rel < 0.01)) {
                fail(o, "d=" + std::to_string(d) + " k=" + std::to_string(k) + " rel=" + fmt(rel));
            }
        }
    }
    if (o.pass) {
        o.detail = "worst relative error " + fmt(worst);
    }
    return o;
}

std::string read_command(const std::string& cmd, int& status) {
    std::string out;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        status = -1;
        return out;
    }
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
        out.append(buf, got);
    }
    const int raw = ::pclose(pipe);
    status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return out;
}

// 9. `simulate` output is byte-identical under 1, 4 and 16 worker threads.
Outcome determinism() {
    Outcome o;
    const std::vector<std::string> invocations{
        "simulate --n 1000 --d 3 --trials 20000 --seed 42",
        "simulate --n 1000 --d 3 --trials 20000 --seed 42 --format json",
        "simulate --n 4096 --d 3 --trials 300 --seed 7 --radius",
    };
    for (const auto& args : invocations) {
        std::string reference;
        for (const int threads : {1, 4, 16}) {
            for (int repeat = 0; repeat < 2; ++repeat) {
                int status = 0;
                const std::string out = read_command(
                    std::string(REGTREE_CLI_PATH) + " " + args + " --threads " + std::to_string(threads), status);
                if (status != 0 || out.empty()) {
                    fail(o, "'" + args + "' failed with status " + std::to_string(status));
                    continue;
                }
                if (reference.empty()) {
                    reference = out;
                } else if (out != reference) {
                    fail(o, "'" + args + "' differs at " + std::to_string(threads) + " threads");
                }
            }
        }
    }
    if (o.pass) {
        o.detail = "3 invocations x {1, 4, 16} threads x 2 repeats byte-identical";
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 hypergeometric identity E(X) == 2F1", hypergeometric_identity},
        {"2 product == double-factorial closed form", closed_form_equivalence},
        {"3 enumeration oracle == tail formula", enumeration_oracle},
        {"4 simulator vs exact law (n=1e4, d=3)", simulator_vs_exact},
        {"5 limit trichotomy at n=1e6", limit_trichotomy},
        {"6 scaled tail law at n=1e6, d=3", scaled_tail_law},
        {"7 tree-ball radius ~ 1/2 log2 n", radius_law},
        {"8 Stirling form within 1%", stirling_accuracy},
        {"9 simulate byte-identical across threads", determinism},
    };

    int failures = 0;
    for (const auto& [name, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << name << "]  " << o.detail << "  (" << fmt(secs) << " s)"
                  << std::endl;
        failures += o.pass ? 0 : 1;
    }
    std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
