#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mm1 {

/// Number of workers to use when the caller passes 0.
inline unsigned default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

/// Evaluates fn(i) for i in [0, n) on up to `workers` threads. Output slot i holds fn(i), so the
/// result is independent of the worker count.
template <class T, class Fn>
std::vector<T> parallel_map(std::uint64_t n, unsigned workers, Fn&& fn) {
    std::vector<T> out(n);
    if (workers == 0) workers = default_workers();
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(n, 1)));
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::uint64_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t begin = w * chunk;
        const std::uint64_t end = std::min(n, begin + chunk);
        pool.emplace_back([&, begin, end] {
            try {
                for (std::uint64_t i = begin; i < end; ++i) out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

/// Neumaier-compensated sum in index order.
template <class Range>
double compensated_sum(const Range& values) {
    double sum = 0.0;
    double c = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    return sum + c;
}

}  // namespace mm1
