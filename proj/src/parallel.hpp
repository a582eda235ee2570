#ifndef WSBAYES_PARALLEL_HPP
#define WSBAYES_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace wsbayes::detail {

/// Calls fn(i) for i in [0, count) on up to @p threads workers (0 = hardware).
/// fn must only write to state owned by index i.
template <typename Fn>
void parallel_for(int count, unsigned threads, Fn&& fn) {
    if (count <= 0) return;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(count));
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
}

}  // namespace wsbayes::detail

#endif  // WSBAYES_PARALLEL_HPP
