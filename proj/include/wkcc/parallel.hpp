#ifndef WKCC_PARALLEL_HPP
#define WKCC_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace wkcc {

namespace detail {

inline std::atomic<int>& thread_setting()
{
    static std::atomic<int> value{0};
    return value;
}

inline bool& inside_parallel_region()
{
    thread_local bool inside = false;
    return inside;
}

}  // namespace detail

/// Caps the worker pool used by `parallel_for`. 0 restores the default
/// (the WKCC_THREADS environment variable, else hardware concurrency).
inline void set_thread_count(int n)
{
    detail::thread_setting().store(std::max(n, 0));
}

inline int thread_count()
{
    int n = detail::thread_setting().load();
    if (n > 0)
        return n;
    if (const char* env = std::getenv("WKCC_THREADS")) {
        try {
            int v = std::stoi(env);
            if (v > 0)
                return v;
        } catch (...) {
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs f(i) for i in [0, n). Each index must write only its own output slot;
/// results are then independent of the worker count. Nested calls run
/// serially on the calling worker. If several indices throw, the exception
/// of the lowest index is rethrown.
template <class F>
void parallel_for(std::size_t n, F&& f)
{
    const std::size_t workers =
        std::min<std::size_t>(n, static_cast<std::size_t>(thread_count()));
    if (workers <= 1 || detail::inside_parallel_region()) {
        for (std::size_t i = 0; i < n; ++i)
            f(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::size_t error_index = n;

    auto work = [&] {
        detail::inside_parallel_region() = true;
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n)
                break;
            try {
                f(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
        detail::inside_parallel_region() = false;
    };

    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w)
            pool.emplace_back(work);
        work();
    }
    if (error)
        std::rethrow_exception(error);
}

}  // namespace wkcc

#endif  // WKCC_PARALLEL_HPP
