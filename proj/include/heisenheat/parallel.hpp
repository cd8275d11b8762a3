#pragma once

// Index-ordered worker pool: results land in slot i regardless of completion order.

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace heisenheat {

/// Run fn(i) for i in [0, n) on up to `workers` threads. The first exception is rethrown.
inline void parallel_for_indexed(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    const std::size_t w = std::clamp<std::size_t>(workers < 1 ? 1 : static_cast<std::size_t>(workers), 1, std::max<std::size_t>(n, 1));
    if (w == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < w; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

/// Map fn over [0, n) into a vector ordered by index.
template <class T>
std::vector<T> parallel_map_indexed(std::size_t n, int workers, const std::function<T(std::size_t)>& fn) {
    std::vector<T> out(n);
    parallel_for_indexed(n, workers, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

}  // namespace heisenheat
