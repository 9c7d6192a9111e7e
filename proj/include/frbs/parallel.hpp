#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace frbs {

/// Runs fn(i) for i in [0, count) on up to n_threads threads.
/// Work item i always computes the same value regardless of scheduling;
/// callers write into preallocated slot i, so results are identical for
/// any thread count.
inline void parallel_for(int count, int n_threads, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    n_threads = std::max(1, std::min(n_threads, count));
    if (n_threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) {
        workers.emplace_back([&, w] {
            for (int i = w; i < count; i += n_threads) fn(i);
        });
    }
    for (auto& t : workers) t.join();
}

}  // namespace frbs
