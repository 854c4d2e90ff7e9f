#pragma once
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kaclab {

// KACLAB_WORKERS sets the pool size; unset means hardware concurrency.
inline int worker_count() {
    if (const char* s = std::getenv("KACLAB_WORKERS")) {
        int n = std::atoi(s);
        if (n > 0) return n;
    }
    unsigned h = std::thread::hardware_concurrency();
    return h ? static_cast<int>(h) : 1;
}

// Calls fn(i) for i in [0,n). Work is split into fixed strided slots so the
// caller writes results by index and output order never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, int workers = worker_count()) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t nw = std::min<std::size_t>(workers, n);
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex mu;
    for (std::size_t w = 0; w < nw; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += nw) fn(i);
            } catch (...) {
                std::lock_guard lk(mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace kaclab
