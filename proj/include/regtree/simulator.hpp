#pragma once

// Monte Carlo for the configuration model.
//
// grow_tree runs the stopped exposure process: half-edges of the growing
// tree are paired in breadth-first order, each with a partner drawn
// uniformly from all still-unpaired half-edges, until a partner lands on a
// vertex already in the tree. sample_configuration draws a whole uniform
// perfect matching, and explore / tree_ball_radius run the same
// breadth-first exposure deterministically on a fixed matching.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "regtree/parallel.hpp"
#include "regtree/params.hpp"

namespace regtree {

/// Slot `slot` of vertex `vertex`; flat index vertex * d + slot.
struct HalfEdge {
    std::uint32_t vertex;
    std::uint32_t slot;

    std::uint32_t index(std::uint32_t d) const noexcept { return vertex * d + slot; }
    static HalfEdge from_index(std::uint32_t h, std::uint32_t d) noexcept { return {h / d, h % d}; }

    friend bool operator==(const HalfEdge&, const HalfEdge&) = default;
};

namespace detail {

inline std::uint32_t checked_half_edges(std::int64_t n, std::int64_t d) {
    if (n < 1 || d < 1) {
        throw ParameterError("configuration needs n >= 1 and d >= 1");
    }
    if ((n * d) % 2 != 0) {
        throw ParameterError("n*d must be even to pair half-edges");
    }
    if (n * d > std::numeric_limits<std::uint32_t>::max()) {
        throw ParameterError("n*d exceeds the simulator's 32-bit half-edge index range");
    }
    return static_cast<std::uint32_t>(n * d);
}

inline std::uint32_t uniform_below(Engine& rng, std::uint32_t bound) {
    return std::uniform_int_distribution<std::uint32_t>(0, bound - 1)(rng);
}

}  // namespace detail

/// A perfect matching of the n*d half-edges; loops and multi-edges are allowed.
class Configuration {
public:
    /// Validates partner(partner(h)) == h and partner(h) != h.
    Configuration(std::uint32_t n, std::uint32_t d, std::vector<std::uint32_t> partners)
        : n_(n), d_(d), partners_(std::move(partners)) {
        const std::uint32_t total = detail::checked_half_edges(n, d);
        if (partners_.size() != total) {
            throw ParameterError("partner map must have n*d entries");
        }
        for (std::uint32_t h = 0; h < total; ++h) {
            const std::uint32_t p = partners_[h];
            if (p >= total || p == h || partners_[p] != h) {
                throw ParameterError("partner map is not a perfect matching (half-edge " + std::to_string(h) + ")");
            }
        }
    }

    std::uint32_t n() const noexcept { return n_; }
    std::uint32_t d() const noexcept { return d_; }
    std::uint32_t half_edges() const noexcept { return n_ * d_; }
    std::uint32_t partner(std::uint32_t h) const { return partners_[h]; }
    std::uint32_t vertex_of(std::uint32_t h) const noexcept { return h / d_; }
    const std::vector<std::uint32_t>& partners() const noexcept { return partners_; }

    friend bool operator==(const Configuration&, const Configuration&) = default;

private:
    std::uint32_t n_;
    std::uint32_t d_;
    std::vector<std::uint32_t> partners_;
};

enum class StopReason {
    collision,  // a pairing closed a cycle (loop, multi-edge or longer)
    exhausted,  // no unexposed half-edge remained; only possible for d = 1
};

inline const char* to_string(StopReason r) noexcept {
    return r == StopReason::collision ? "collision" : "exhausted";
}

struct GrowthOutcome {
    std::int64_t tree_size = 1;              // X: vertices in the tree when growth stopped
    int radius = 0;                          // deepest tree vertex
    std::vector<std::int64_t> shell_sizes;   // vertices at each distance from the root
    StopReason stop_reason = StopReason::collision;
};

/// Reusable buffers for grow_tree. Holds the unpaired half-edges as a permutation
/// with a live prefix; every swap is logged and undone after the run so each
/// trial starts from the identical canonical state.
class GrowthWorkspace {
public:
    explicit GrowthWorkspace(const Params& params)
        : n_(params.n()),
          d_(static_cast<std::uint32_t>(params.d())),
          total_(detail::checked_half_edges(params.n(), params.d())),
          pool_(total_),
          position_(total_),
          depth_(static_cast<std::size_t>(params.n()), -1) {
        std::iota(pool_.begin(), pool_.end(), 0u);
        std::iota(position_.begin(), position_.end(), 0u);
        live_ = total_;
    }

    GrowthOutcome run(Engine& rng) {
        GrowthOutcome out;
        out.shell_sizes.push_back(1);
        attach(0, 0);
        for (std::uint32_t s = 0; s < d_; ++s) {
            queue_.push_back(s);
        }

        for (std::size_t head = 0; head < queue_.size(); ++head) {
            const std::uint32_t h = queue_[head];
            remove_at(position_[h]);
            const std::uint32_t p = pool_[detail::uniform_below(rng, live_)];
            remove_at(position_[p]);

            const std::uint32_t w = p / d_;
            if (depth_[w] >= 0) {
                out.stop_reason = StopReason::collision;
                break;
            }
            const int dw = depth_[h / d_] + 1;
            attach(w, dw);
            if (static_cast<std::size_t>(dw) >= out.shell_sizes.size()) {
                out.shell_sizes.push_back(0);
            }
            ++out.shell_sizes[static_cast<std::size_t>(dw)];
            for (std::uint32_t s = 0; s < d_; ++s) {
                if (w * d_ + s != p) {
                    queue_.push_back(w * d_ + s);
                }
            }
        }

        out.tree_size = static_cast<std::int64_t>(touched_.size());
        out.radius = static_cast<int>(out.shell_sizes.size()) - 1;
        restore();
        return out;
    }

    std::int64_t n() const noexcept { return n_; }
    std::uint32_t d() const noexcept { return d_; }

private:
    void attach(std::uint32_t v, int depth) {
        depth_[v] = depth;
        touched_.push_back(v);
    }

    void remove_at(std::uint32_t i) {
        const std::uint32_t j = live_ - 1;
        swap_positions(i, j);
        --live_;
        undo_.push_back(i);
    }

    void swap_positions(std::uint32_t i, std::uint32_t j) {
        std::swap(pool_[i], pool_[j]);
        position_[pool_[i]] = i;
        position_[pool_[j]] = j;
    }

    void restore() {
        for (auto it = undo_.rbegin(); it != undo_.rend(); ++it) {
            swap_positions(*it, live_);
            ++live_;
        }
        undo_.clear();
        for (const std::uint32_t v : touched_) {
            depth_[v] = -1;
        }
        touched_.clear();
        queue_.clear();
    }

    std::int64_t n_;
    std::uint32_t d_;
    std::uint32_t total_;
    std::uint32_t live_ = 0;
    std::vector<std::uint32_t> pool_;
    std::vector<std::uint32_t> position_;
    std::vector<int> depth_;
    std::vector<std::uint32_t> undo_;
    std::vector<std::uint32_t> touched_;
    std::vector<std::uint32_t> queue_;
};

/// One run of the stopped exposure process rooted at vertex 0 (all roots are equivalent).
inline GrowthOutcome grow_tree(const Params& params, Engine& rng, GrowthWorkspace& workspace) {
    if (workspace.n() != params.n() || workspace.d() != static_cast<std::uint32_t>(params.d())) {
        throw ParameterError("workspace was built for different parameters");
    }
    return workspace.run(rng);
}

inline GrowthOutcome grow_tree(const Params& params, Engine& rng) {
    GrowthWorkspace workspace(params);
    return workspace.run(rng);
}

/// Uniform perfect matching by sequential pairing: the lowest unpaired half-edge is
/// matched with a uniformly chosen other unpaired half-edge. Accepts any d >= 1.
inline Configuration sample_configuration(std::uint32_t n, std::uint32_t d, Engine& rng) {
    const std::uint32_t total = detail::checked_half_edges(n, d);
    std::vector<std::uint32_t> pool(total);
    std::vector<std::uint32_t> position(total);
    std::iota(pool.begin(), pool.end(), 0u);
    std::iota(position.begin(), position.end(), 0u);
    std::vector<std::uint32_t> partners(total);
    std::uint32_t live = total;

    auto remove = [&](std::uint32_t h) {
        const std::uint32_t i = position[h];
        const std::uint32_t j = live - 1;
        std::swap(pool[i], pool[j]);
        position[pool[i]] = i;
        position[pool[j]] = j;
        --live;
    };

    for (std::uint32_t h = 0; h < total; ++h) {
        if (position[h] >= live) {
            continue;
        }
        remove(h);
        const std::uint32_t p = pool[detail::uniform_below(rng, live)];
        remove(p);
        partners[h] = p;
        partners[p] = h;
    }
    return Configuration(n, d, std::move(partners));
}

inline Configuration sample_configuration(const Params& params, Engine& rng) {
    return sample_configuration(static_cast<std::uint32_t>(params.n()), static_cast<std::uint32_t>(params.d()), rng);
}

/// Breadth-first exposure of a fixed configuration around `root`.
struct Exposure {
    GrowthOutcome growth;
    /// Depth of the shell being expanded when the first cycle closed: the radius of the
    /// largest complete regular tree around the root. Equals growth.radius when exhausted.
    int ball_radius = 0;
};

inline Exposure explore(const Configuration& config, std::uint32_t root) {
    if (root >= config.n()) {
        throw ParameterError("root vertex out of range");
    }
    const std::uint32_t d = config.d();
    std::vector<int> depth(config.n(), -1);
    std::vector<std::uint32_t> queue;
    queue.reserve(d);

    Exposure out;
    out.growth.shell_sizes.push_back(1);
    depth[root] = 0;
    std::int64_t tree_size = 1;
    for (std::uint32_t s = 0; s < d; ++s) {
        queue.push_back(root * d + s);
    }

    out.growth.stop_reason = StopReason::exhausted;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::uint32_t h = queue[head];
        const std::uint32_t p = config.partner(h);
        const std::uint32_t w = config.vertex_of(p);
        const int dv = depth[config.vertex_of(h)];
        if (depth[w] >= 0) {
            out.growth.stop_reason = StopReason::collision;
            out.ball_radius = dv;
            break;
        }
        depth[w] = dv + 1;
        ++tree_size;
        if (static_cast<std::size_t>(dv + 1) >= out.growth.shell_sizes.size()) {
            out.growth.shell_sizes.push_back(0);
        }
        ++out.growth.shell_sizes[static_cast<std::size_t>(dv + 1)];
        for (std::uint32_t s = 0; s < d; ++s) {
            if (w * d + s != p) {
                queue.push_back(w * d + s);
            }
        }
    }

    out.growth.tree_size = tree_size;
    out.growth.radius = static_cast<int>(out.growth.shell_sizes.size()) - 1;
    if (out.growth.stop_reason == StopReason::exhausted) {
        out.ball_radius = out.growth.radius;
    }
    return out;
}

/// Radius of the largest regular tree embedded around `root`: the deepest r whose
/// breadth-first exposure closes no cycle before shell r is expanded.
inline int tree_ball_radius(const Configuration& config, std::uint32_t root) {
    return explore(config, root).ball_radius;
}

struct MonteCarloSummary {
    Params params;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> size_counts;    // index X: trials that stopped at tree size X
    std::vector<std::uint64_t> radius_counts;  // index r
    std::vector<double> empirical_tail;        // index k - 1: share of trials with X >= k, k = 1..max X
    std::vector<double> standard_error;        // binomial SE of each empirical_tail entry
    double mean_x = 0.0;
    double mean_x_se = 0.0;
    double mean_radius = 0.0;

    /// P-hat(X >= k); 0 beyond the largest observed size.
    double tail_at(std::int64_t k) const {
        if (k < 1) {
            throw ParameterError("tail index must be >= 1");
        }
        const auto idx = static_cast<std::size_t>(k - 1);
        return idx < empirical_tail.size() ? empirical_tail[idx] : 0.0;
    }
};

namespace detail {

inline constexpr std::uint64_t kTrialsPerBlock = 512;

struct Counts {
    std::vector<std::uint64_t> values;

    void add(std::size_t v) {
        if (v >= values.size()) {
            values.resize(v + 1, 0);
        }
        ++values[v];
    }

    void merge(const Counts& other) {
        if (other.values.size() > values.size()) {
            values.resize(other.values.size(), 0);
        }
        for (std::size_t i = 0; i < other.values.size(); ++i) {
            values[i] += other.values[i];
        }
    }
};

/// Mean and standard error of the mean from a histogram, summed in index order.
inline std::pair<double, double> histogram_moments(const std::vector<std::uint64_t>& counts, std::uint64_t total) {
    long double sum = 0.0L;
    for (std::size_t v = 0; v < counts.size(); ++v) {
        sum += static_cast<long double>(v) * static_cast<long double>(counts[v]);
    }
    const long double mean = sum / static_cast<long double>(total);
    long double sq = 0.0L;
    for (std::size_t v = 0; v < counts.size(); ++v) {
        const long double dev = static_cast<long double>(v) - mean;
        sq += dev * dev * static_cast<long double>(counts[v]);
    }
    const long double var = total > 1 ? sq / static_cast<long double>(total - 1) : 0.0L;
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / static_cast<long double>(total)))};
}

}  // namespace detail

/// Runs `trials` independent grow_tree trials. Trial i draws from trial_engine(master_seed, i),
/// and the per-worker histograms hold integer counts, so the summary does not depend on
/// the worker count or on scheduling.
inline MonteCarloSummary monte_carlo(const Params& params, std::uint64_t trials, std::uint64_t master_seed,
                                     unsigned threads = 0) {
    if (trials < 1) {
        throw ParameterError("monte_carlo needs at least one trial");
    }
    const unsigned workers = resolve_threads(static_cast<int>(threads));
    const std::size_t blocks = static_cast<std::size_t>((trials + detail::kTrialsPerBlock - 1) / detail::kTrialsPerBlock);
    const unsigned used = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(blocks)));

    std::vector<detail::Counts> sizes(used);
    std::vector<detail::Counts> radii(used);
    std::vector<std::unique_ptr<GrowthWorkspace>> spaces(used);

    parallel_blocks(blocks, used, [&](std::size_t block, unsigned worker) {
        if (!spaces[worker]) {
            spaces[worker] = std::make_unique<GrowthWorkspace>(params);
        }
        const std::uint64_t begin = block * detail::kTrialsPerBlock;
        const std::uint64_t end = std::min<std::uint64_t>(trials, begin + detail::kTrialsPerBlock);
        for (std::uint64_t t = begin; t < end; ++t) {
            Engine rng = trial_engine(master_seed, t);
            const GrowthOutcome g = spaces[worker]->run(rng);
            sizes[worker].add(static_cast<std::size_t>(g.tree_size));
            radii[worker].add(static_cast<std::size_t>(g.radius));
        }
    });

    for (unsigned w = 1; w < used; ++w) {
        sizes[0].merge(sizes[w]);
        radii[0].merge(radii[w]);
    }

    MonteCarloSummary out{params, trials, master_seed, std::move(sizes[0].values), std::move(radii[0].values),
                          {}, {}, 0.0, 0.0, 0.0};
    const std::size_t max_x = out.size_counts.size() - 1;
    out.empirical_tail.resize(max_x);
    out.standard_error.resize(max_x);
    std::uint64_t at_least = 0;
    for (std::size_t k = max_x; k >= 1; --k) {
        at_least += out.size_counts[k];
        const double p = static_cast<double>(at_least) / static_cast<double>(trials);
        out.empirical_tail[k - 1] = p;
        out.standard_error[k - 1] = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    }
    std::tie(out.mean_x, out.mean_x_se) = detail::histogram_moments(out.size_counts, trials);
    out.mean_radius = detail::histogram_moments(out.radius_counts, trials).first;
    return out;
}

struct RadiusSummary {
    Params params;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> radius_counts;  // index r
    double mean_radius = 0.0;
    double mean_radius_se = 0.0;
};

/// tree_ball_radius over `samples` independent (configuration, uniform root) pairs.
inline RadiusSummary radius_monte_carlo(const Params& params, std::uint64_t samples, std::uint64_t master_seed,
                                        unsigned threads = 0) {
    if (samples < 1) {
        throw ParameterError("radius_monte_carlo needs at least one sample");
    }
    const unsigned workers = resolve_threads(static_cast<int>(threads));
    std::vector<int> radius(static_cast<std::size_t>(samples));
    parallel_blocks(static_cast<std::size_t>(samples), workers, [&](std::size_t i, unsigned) {
        Engine rng = trial_engine(master_seed, i);
        const Configuration config = sample_configuration(params, rng);
        const auto root = detail::uniform_below(rng, config.n());
        radius[i] = tree_ball_radius(config, root);
    });

    detail::Counts counts;
    for (const int r : radius) {
        counts.add(static_cast<std::size_t>(r));
    }
    RadiusSummary out{params, samples, master_seed, std::move(counts.values), 0.0, 0.0};
    std::tie(out.mean_radius, out.mean_radius_se) = detail::histogram_moments(out.radius_counts, samples);
    return out;
}

}  // namespace regtree
