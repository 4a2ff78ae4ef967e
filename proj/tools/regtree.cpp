// regtree: exact, asymptotic and Monte Carlo views of regular-tree growth
// in random d-regular graphs (configuration model).
//
// Exit status: 0 success, 2 usage error, 1 runtime error.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "regtree/cli.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

void add_common(CLI::App& cmd, regtree::cli::RunConfig& cfg, std::string& format) {
    cmd.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd.add_option("--out", cfg.out_path, "Write output to this file instead of stdout");
}

void add_graph(CLI::App& cmd, regtree::cli::RunConfig& cfg) {
    cmd.add_option("--n", cfg.n, "Number of vertices")->required();
    cmd.add_option("--d", cfg.d, "Degree")->required();
}

}  // namespace

int main(int argc, char** argv) {
    regtree::cli::RunConfig cfg;
    std::string format = "csv";
    std::string seed_text;
    std::string grid_text;
    std::string mode;

    CLI::App app{"Embedded regular trees in random regular graphs"};
    app.require_subcommand(1);

    auto* tail = app.add_subcommand("tail", "P(X >= k): exact fractions or log-probabilities, with the Stirling form");
    add_graph(*tail, cfg);
    tail->add_option("--k", cfg.k, "Single tree size k");
    tail->add_option("--k-min", cfg.k_min, "First k (default 1)");
    tail->add_option("--k-max", cfg.k_max, "Last k (default n)");
    tail->add_option("--mode", mode, "exact or log (default: exact when n <= cap)")->check(CLI::IsMember({"exact", "log"}));
    tail->add_option("--cap", cfg.exact_cap, "Largest n for exact arithmetic");
    add_common(*tail, cfg, format);

    auto* expect = app.add_subcommand("expect", "E(X) and the terminating 2F1 series, with E(X)/sqrt(n)");
    add_graph(*expect, cfg);
    expect->add_option("--mode", mode, "exact or log (default: exact when n <= cap)")->check(CLI::IsMember({"exact", "log"}));
    expect->add_option("--cap", cfg.exact_cap, "Largest n for exact arithmetic");
    add_common(*expect, cfg, format);

    auto* limit = app.add_subcommand("limit", "Finite-n limit expression or scaled tail over an n grid");
    limit->add_option("--d", cfg.d, "Degree (>= 3)")->required();
    limit->add_option("--rho", cfg.rho, "Exponent rho in [0, 1), k = round(n^rho) (default 0.5)");
    limit->add_option("--x", cfg.x, "Scale factor for P(X >= x sqrt(n)); needs --scaled");
    limit->add_flag("--scaled", cfg.scaled, "Compare against the scaled tail law exp(-x^2 (d-2)/(2d))");
    limit->add_option("--grid", grid_text, "Comma-separated vertex counts (default 1e3,1e4,1e5,1e6)");
    add_common(*limit, cfg, format);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo of the growth process or of the tree-ball radius");
    add_graph(*simulate, cfg);
    simulate->add_option("--trials", cfg.trials, "Number of trials (default 10000)");
    simulate->add_option("--seed", seed_text, "Master seed (default 0x5EED0001)");
    simulate->add_option("--threads", cfg.threads, std::string("Worker threads (default: $") + regtree::kThreadsEnvVar +
                                                        " or hardware concurrency)");
    simulate->add_flag("--radius", cfg.radius, "Sample whole configurations and measure the tree-ball radius");
    add_common(*simulate, cfg, format);

    auto* enumerate = app.add_subcommand("enumerate", "Exact law by enumerating every matching (n*d <= 14)");
    add_graph(*enumerate, cfg);
    enumerate->add_option("--root", cfg.root, "Root vertex (default 0)");
    enumerate->add_flag("--radius", cfg.radius, "Law of the tree-ball radius instead of X");
    add_common(*enumerate, cfg, format);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        cfg.subcommand = app.get_subcommands().front()->get_name();
        cfg.format = format == "json" ? regtree::cli::OutputFormat::json : regtree::cli::OutputFormat::csv;
        if (!mode.empty()) {
            cfg.mode = mode;
        }
        if (!seed_text.empty()) {
            cfg.seed = regtree::cli::parse_seed(seed_text);
        }
        if (!grid_text.empty()) {
            cfg.grid = regtree::cli::parse_grid(grid_text);
        }

        const std::string output = regtree::cli::run(cfg);
        if (cfg.out_path.empty()) {
            std::cout << output;
        } else {
            std::ofstream file(cfg.out_path, std::ios::binary);
            if (!file) {
                std::cerr << "error: cannot open " << cfg.out_path << " for writing\n";
                return kRuntimeError;
            }
            file << output;
        }
    } catch (const regtree::ParameterError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return 0;
}
