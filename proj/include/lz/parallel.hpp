#ifndef LZ_PARALLEL_HPP
#define LZ_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace lz {

/// Calls fn(i) exactly once for every i in [0, count) using the given
/// number of worker threads. fn must only write to per-index state, so
/// results are identical for any worker count. The first exception
/// thrown by a task is rethrown on the calling thread.
inline void run_indexed(int count, int workers,
                        const std::function<void(int)>& fn) {
    if (count <= 0) return;
    if (workers < 1) {
        throw std::invalid_argument("run_indexed: need at least one worker");
    }
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mtx;
    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mtx);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace lz

#endif  // LZ_PARALLEL_HPP
