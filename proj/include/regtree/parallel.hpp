#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "regtree/params.hpp"

namespace regtree {

/// Environment variable that overrides the worker count when no explicit count is given.
inline constexpr const char* kThreadsEnvVar = "REGTREE_THREADS";

inline constexpr std::uint64_t kDefaultSeed = 0x5EED0001ULL;

using Engine = std::mt19937_64;

/// splitmix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based split: the stream for trial `index` depends only on (master, index).
inline Engine trial_engine(std::uint64_t master_seed, std::uint64_t index) {
    return Engine(mix64(mix64(master_seed) + 0x9E3779B97F4A7C15ULL * (index + 1)));
}

/// Explicit count if positive, else REGTREE_THREADS, else hardware concurrency.
inline unsigned resolve_threads(int requested = 0) {
    if (requested > 0) {
        return static_cast<unsigned>(requested);
    }
    if (const char* env = std::getenv(kThreadsEnvVar); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) {
            throw ParameterError(std::string(kThreadsEnvVar) + " must be a positive integer (got '" + env + "')");
        }
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(block_index, worker_index) for every block in [0, blocks) across `threads` workers.
/// Blocks are claimed dynamically; callers keep results per block so reduction order is fixed.
/// The first exception thrown by any body is rethrown on the calling thread.
template <class Body>
void parallel_blocks(std::size_t blocks, unsigned threads, Body&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(blocks, 1))));
    if (threads == 1) {
        for (std::size_t b = 0; b < blocks; ++b) {
            body(b, 0u);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (std::size_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) {
                    body(b, w);
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(blocks);
            }
        });
    }
    workers.clear();
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace regtree
