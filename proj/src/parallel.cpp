#include "vmatch/parallel.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace vmatch {

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;

    std::size_t workers = threads < 1 ? 1 : static_cast<std::size_t>(threads);
    workers = std::min(workers, n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);

    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, w, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace vmatch
