#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace cavitydyn {

/// Runs body(begin, end) over [0, count) split into contiguous chunks. Each
/// index is processed by exactly one thread, so element-wise kernels produce
/// identical results for any thread count.
template <class Body>
void parallel_for(int count, int threads, Body&& body) {
    threads = std::clamp(threads, 1, std::max(count, 1));
    if (threads == 1) {
        body(0, count);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    const int chunk = (count + threads - 1) / threads;
    for (int t = 1; t < threads; ++t) {
        const int b = t * chunk;
        const int e = std::min(count, b + chunk);
        if (b < e) {
            pool.emplace_back([&body, b, e] { body(b, e); });
        }
    }
    body(0, std::min(count, chunk));
}

} // namespace cavitydyn
