#include "nodallab/common.hpp"

#include <atomic>
#include <thread>

namespace nlab {

namespace {
std::atomic<int> g_jobs{0};
}

int default_jobs() {
    int j = g_jobs.load();
    if (j > 0) return j;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

void set_default_jobs(int jobs) { g_jobs.store(jobs > 0 ? jobs : 0); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int jobs) {
    if (jobs <= 0) jobs = default_jobs();
    if (n == 0) return;
    if (jobs == 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = int(std::min<std::size_t>(std::size_t(jobs), n));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load(std::memory_order_relaxed)) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace nlab
