#ifndef TCT_PARALLEL_HPP
#define TCT_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace tct {

// Runs body(i) for i in [0, count). Results must be written to preallocated
// per-index slots so aggregation never depends on completion order.
template <typename Body>
void parallel_for(int count, int threads, Body&& body) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min(threads, count);
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace tct

#endif
