#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace ctic {

/// Index-addressed parallel map. Each index runs exactly once; results must
/// be written to caller-provided index-keyed slots, so any reduction over
/// them is independent of scheduling.
inline void parallel_for_index(std::int64_t count, int threads,
                               const std::function<void(std::int64_t)>& body) {
    if (threads <= 1 || count <= 1) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    int workers = static_cast<int>(std::min<std::int64_t>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    std::atomic<std::int64_t> next{0};
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::int64_t i = next.fetch_add(1);
                if (i >= count) return;
                body(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

/// Worker count to use when a configuration leaves it unset.
inline int default_thread_count() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

} // namespace ctic
