#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sers {

// Runs fn(k) for k in [0, count) on up to `workers` threads pulling from a
// shared counter. The first exception thrown by any job is rethrown after all
// threads have joined; jobs that should not abort the batch must catch
// internally.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    const auto n = static_cast<std::size_t>(std::max(1, workers));
    if (n == 1 || count <= 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex guard;
    std::vector<std::thread> pool;
    const std::size_t threads = std::min(n, count);
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) {
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(guard);
                    if (!first) first = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first) std::rethrow_exception(first);
}

}  // namespace sers
