#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ppk {

// Runs body(i) for i in [0, n). With n_threads <= 1 the loop runs inline;
// otherwise indices are striped across workers. body must be safe to call
// concurrently for distinct i. The first exception thrown by any worker is
// rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, unsigned n_threads, Body&& body) {
    if (n == 0) return;
    if (n_threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    unsigned workers = n_threads;
    if (workers > n) workers = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace ppk
