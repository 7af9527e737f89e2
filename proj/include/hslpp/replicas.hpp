#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "site_rng.hpp"

namespace hslpp {

inline unsigned default_threads()
{
    const unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1U : h;
}

// Runs fn(r, replica_seed(seed0, r)) for r = 0..n-1 on up to `threads`
// workers and returns the results in replica order, so any reduction over
// the result vector is independent of the thread count.
template <class Fn>
auto run_replicas(std::int64_t n, std::uint64_t seed0, unsigned threads, Fn&& fn)
{
    using R = decltype(fn(std::int64_t{0}, std::uint64_t{0}));
    std::vector<R> out(static_cast<std::size_t>(std::max<std::int64_t>(n, 0)));
    if (n <= 0) return out;
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n)));

    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::int64_t r = next.fetch_add(1);
            if (r >= n) return;
            try {
                out[static_cast<std::size_t>(r)] = fn(r, replica_seed(seed0, static_cast<std::uint64_t>(r)));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return out;
}

} // namespace hslpp
