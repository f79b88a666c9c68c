#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace levkit {

/// Runs body(i) for i in [0, n). With jobs > 1, indices are split into
/// contiguous chunks, one thread per chunk; each index is touched exactly
/// once, so writes to per-index slots are race-free and the result is
/// identical to the serial order.
template <typename Body>
void parallel_for(std::size_t n, int jobs, Body&& body) {
    if (jobs <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

inline int default_jobs() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace levkit
