#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace cvstab {

// Run body(i) for i in [0, count) on up to `workers` threads. Callers write
// into preallocated slot i only, so results are identical regardless of how
// the work is scheduled. The first exception thrown by any worker is
// rethrown on the calling thread after all workers have joined.
inline void parallel_for(int count, int workers, const std::function<void(int)>& body) {
    if (count <= 0) return;
    if (workers <= 1 || count == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    int nthreads = workers < count ? workers : count;
    std::mutex err_mu;
    std::exception_ptr first_error = nullptr;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t]() {
            for (int i = t; i < count; i += nthreads) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace cvstab
