#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace obscert {

// Worker cap for sample sweeps. Default: OBSCERT_THREADS env var, else 1.
int thread_count();
void set_thread_count(int n);

// Static block partition of [0, n). Each index is processed exactly once and
// results must be written to per-index slots, so output is identical for any
// thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int threads = thread_count();
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace obscert
