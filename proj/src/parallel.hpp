#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace varshift::detail {

/// Splits [0, total) into contiguous chunks and runs fn(chunk_index, begin,
/// end) on each, one thread per chunk. Exceptions are rethrown on the caller
/// (first one wins).
template <typename Fn>
void parallel_chunks(int total, int workers, Fn&& fn) {
    workers = std::clamp(workers, 1, std::max(1, total));
    if (workers == 1) {
        fn(0, 0, total);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    const int base = total / workers;
    const int extra = total % workers;
    int begin = 0;
    for (int w = 0; w < workers; ++w) {
        const int size = base + (w < extra ? 1 : 0);
        const int end = begin + size;
        pool.emplace_back([&fn, &errors, w, begin, end]() {
            try {
                fn(w, begin, end);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& thread : pool) thread.join();
    for (auto& error : errors) {
        if (error) std::rethrow_exception(error);
    }
}

}  // namespace varshift::detail
