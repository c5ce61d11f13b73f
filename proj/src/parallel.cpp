#include "madelung/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace madelung {

int worker_count() {
    static const int cached = [] {
        const char* env = std::getenv("MADELUNG_THREADS");
        long requested = 0;
        if (env && *env) {
            char* end = nullptr;
            requested = std::strtol(env, &end, 10);
            if (end == env) requested = 0;  // unparsable -> auto
        }
        if (requested <= 0) {
            unsigned hw = std::thread::hardware_concurrency();
            return hw ? static_cast<int>(hw) : 1;
        }
        return static_cast<int>(requested);
    }();
    return cached;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const int workers = worker_count();
    // Small ranges or single worker: run inline, no thread overhead.
    if (workers == 1 || n < 4096) {
        fn(0, n);
        return;
    }
    const std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    const std::size_t step = (n + chunks - 1) / chunks;
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t begin = c * step;
        const std::size_t end = std::min(n, begin + step);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace madelung
