#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ppr {

inline unsigned resolve_workers(unsigned workers) {
    if (workers != 0) return workers;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs fn(chunk_index, begin, end) over fixed-size chunks of [0, n).
// Chunk boundaries depend only on n and chunk_size, never on the worker
// count, so callers that accumulate into per-chunk slots and merge them in
// chunk order get identical results for any number of workers. Workers pull
// chunk indices from a shared counter; the first exception thrown by fn is
// rethrown on the calling thread after all workers stop.
template <typename Fn>
void parallel_chunks(std::uint64_t n, std::uint64_t chunk_size, unsigned workers, Fn&& fn) {
    if (n == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::uint64_t num_chunks = (n + chunk_size - 1) / chunk_size;
    workers = resolve_workers(workers);
    if (workers > num_chunks) workers = static_cast<unsigned>(num_chunks);

    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;

    auto run = [&] {
        for (;;) {
            std::uint64_t chunk = next.fetch_add(1, std::memory_order_relaxed);
            if (chunk >= num_chunks || failed.load(std::memory_order_relaxed)) return;
            std::uint64_t begin = chunk * chunk_size;
            std::uint64_t end = std::min(begin + chunk_size, n);
            try {
                fn(chunk, begin, end);
            } catch (...) {
                std::scoped_lock lock(error_mu);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    if (workers <= 1) {
        run();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) threads.emplace_back(run);
        for (auto& t : threads) t.join();
    }
    if (error) std::rethrow_exception(error);
}

} // namespace ppr
