#pragma once

// Static contiguous split of [0, count) across threads.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace pcount {

/// Calls body(begin, end, worker) on disjoint blocks; worker indices are 0..used-1.
/// Returns the number of workers used. Block boundaries depend only on count and threads.
/// The first exception raised by any worker is rethrown after all have joined.
template <class Body>
unsigned parallel_blocks(std::size_t count, unsigned threads, Body&& body) {
    const unsigned used = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, count)));
    if (used <= 1) {
        body(std::size_t{0}, count, 0u);
        return 1;
    }
    std::vector<std::exception_ptr> errors(used);
    std::vector<std::thread> pool;
    pool.reserve(used - 1);
    const std::size_t step = (count + used - 1) / used;
    auto run = [&](std::size_t b, std::size_t e, unsigned t) {
        try {
            body(b, e, t);
        } catch (...) {
            errors[t] = std::current_exception();
        }
    };
    for (unsigned t = 1; t < used; ++t) {
        const std::size_t b = std::min(count, t * step);
        const std::size_t e = std::min(count, b + step);
        pool.emplace_back(run, b, e, t);
    }
    run(0, std::min(count, step), 0u);
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
    return used;
}

}  // namespace pcount
