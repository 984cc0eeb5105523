// parallel.hpp — minimal index-space parallel_for.
//
// Work is split into contiguous chunks by index, so results written through
// the index are deterministic regardless of thread count.  LAB_THREADS caps
// the number of worker threads (default: hardware concurrency).

#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace pblab {

inline int thread_budget() {
    static const int budget = [] {
        int n = static_cast<int>(std::thread::hardware_concurrency());
        if (n <= 0) n = 1;
        if (const char* env = std::getenv("LAB_THREADS")) {
            const int cap = std::atoi(env);
            if (cap >= 1) n = std::min(n, cap);
        }
        return n;
    }();
    return budget;
}

template <typename F>
void parallel_for(std::size_t count, F&& body, std::size_t grain = 256) {
    const std::size_t threads =
        std::min<std::size_t>(static_cast<std::size_t>(thread_budget()), count ? count : 1);
    if (threads <= 1 || count < grain) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t lo = chunk * t;
        const std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, &errors, t, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace pblab
