#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace graphflow {

// Worker count for data-parallel node loops.  Controlled by the environment
// variable GRAPHFLOW_WORKERS (default 1).  Results never depend on the worker
// count: loop bodies write to disjoint per-index slots and every reduction in
// the library runs sequentially over arrays in node-index order.
inline int worker_count() {
    static int n = [] {
        const char* env = std::getenv("GRAPHFLOW_WORKERS");
        if (!env) return 1;
        int v = std::atoi(env);
        if (v < 1) return 1;
        if (v > 64) return 64;
        return v;
    }();
    return n;
}

// Static partition of [0, n) over the configured workers.  fn(i) must only
// touch state belonging to index i.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    int workers = worker_count();
    if (workers <= 1 || n < 256) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = lo + chunk < n ? lo + chunk : n;
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace graphflow
