#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace semilab {

// Worker count: SEMILAB_THREADS env var wins, else hardware concurrency.
inline int default_thread_count() {
    if (const char* env = std::getenv("SEMILAB_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Static partition of [0, n). Each index is processed exactly once and
// callers must write results into per-index slots; no shared accumulators,
// so output is independent of the worker count.
template <typename F>
void parallel_for(size_t n, F&& body, int threads = -1) {
    if (threads < 1) threads = default_thread_count();
    threads = static_cast<int>(std::min<size_t>(static_cast<size_t>(threads), n == 0 ? 1 : n));
    if (threads <= 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    size_t chunk = (n + static_cast<size_t>(threads) - 1) / static_cast<size_t>(threads);
    for (int t = 0; t < threads; ++t) {
        size_t lo = static_cast<size_t>(t) * chunk;
        size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace semilab
