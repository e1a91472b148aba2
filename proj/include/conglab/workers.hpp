#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace conglab {

// Runs fn(0..n-1) on a bounded pool. Callers keep determinism by writing
// into pre-sized slots indexed by the job id. The first exception wins and
// is rethrown after all threads drain.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers < 1) workers = 1;
    if (static_cast<std::size_t>(workers) > n) workers = static_cast<int>(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                    next.store(n);
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace conglab
