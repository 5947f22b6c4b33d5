#include "iid/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace iid::parallel {

int thread_count() {
    static const int cached = [] {
        int n = static_cast<int>(std::thread::hardware_concurrency());
        if (n <= 0) n = 1;
        if (const char* env = std::getenv("IIDLAB_THREADS")) {
            int cap = std::atoi(env);
            if (cap >= 1) n = std::min(n, cap);
        }
        return n;
    }();
    return cached;
}

void parallel_for(int count, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    int workers = std::min(thread_count(), count);
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    // Contiguous chunks; the calling thread takes the first one.
    int base = count / workers, extra = count % workers;
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    int begin = base + (extra > 0 ? 1 : 0);
    for (int t = 1; t < workers; ++t) {
        int len = base + (t < extra ? 1 : 0);
        int chunk_begin = begin;
        begin += len;
        pool.emplace_back([&fn, chunk_begin, len] {
            for (int i = chunk_begin; i < chunk_begin + len; ++i) fn(i);
        });
    }
    for (int i = 0; i < base + (extra > 0 ? 1 : 0); ++i) fn(i);
    for (auto& th : pool) th.join();
}

} // namespace iid::parallel
