#include "jinv/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace jinv {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int count) { g_max_threads.store(count < 0 ? 0 : count); }

int max_threads() {
    const int cap = g_max_threads.load();
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int def = hw > 0 ? hw : 1;
    return cap == 0 ? def : std::min(cap, def);
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    if (begin >= end) return;
    const std::size_t n = end - begin;
    const int workers = std::min<std::size_t>(max_threads(), n);
    if (workers <= 1 || n < 2) {
        body(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::size_t lo = begin + chunk * w;
        if (lo >= end) break;
        const std::size_t hi = std::min(end, lo + chunk);
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

} // namespace jinv
