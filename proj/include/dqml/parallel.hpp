#pragma once

#include <cstddef>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dqml {

// Worker count default: DQML_WORKERS environment variable, else the OpenMP
// thread limit, else 1.
inline int default_workers() {
    if (const char* env = std::getenv("DQML_WORKERS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Number of accumulation slots. Fixed independently of the worker count so
// that chunked reductions produce bitwise-identical results no matter how
// many threads run them.
constexpr std::size_t kAccumulationChunks = 64;

struct ChunkRange {
    std::size_t begin, end, slot;
};

inline std::vector<ChunkRange> make_chunks(std::size_t n) {
    std::size_t c = kAccumulationChunks < n ? kAccumulationChunks : (n ? n : 1);
    std::vector<ChunkRange> out;
    out.reserve(c);
    for (std::size_t s = 0; s < c; ++s) {
        std::size_t b = n * s / c;
        std::size_t e = n * (s + 1) / c;
        if (b < e) out.push_back({b, e, s});
    }
    return out;
}

// OpenMP-parallel loop over items; f(i) must only write state owned by item i.
template <typename F>
void parallel_for(std::size_t n, int workers, F&& f) {
#ifdef _OPENMP
    if (workers > 1) {
#pragma omp parallel for schedule(static) num_threads(workers)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            f(static_cast<std::size_t>(i));
        return;
    }
#endif
    (void)workers;
    for (std::size_t i = 0; i < n; ++i) f(i);
}

// Chunked accumulation: f(i, slot) adds item i into the slot's accumulator.
// Chunks run in parallel; items within a chunk run in order. The caller sums
// the slots in slot order afterwards, so results do not depend on `workers`.
template <typename F>
void parallel_accumulate(std::size_t n, int workers, F&& f) {
    auto chunks = make_chunks(n);
#ifdef _OPENMP
    if (workers > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
        for (long long c = 0; c < static_cast<long long>(chunks.size()); ++c) {
            const ChunkRange& r = chunks[static_cast<std::size_t>(c)];
            for (std::size_t i = r.begin; i < r.end; ++i) f(i, r.slot);
        }
        return;
    }
#endif
    (void)workers;
    for (const ChunkRange& r : chunks)
        for (std::size_t i = r.begin; i < r.end; ++i) f(i, r.slot);
}

// Serial reference implementation with the same slot partition; kept for
// testing and benchmarking against the OpenMP path.
template <typename F>
void serial_accumulate(std::size_t n, F&& f) {
    for (const ChunkRange& r : make_chunks(n))
        for (std::size_t i = r.begin; i < r.end; ++i) f(i, r.slot);
}

template <typename F>
void serial_for(std::size_t n, F&& f) {
    for (std::size_t i = 0; i < n; ++i) f(i);
}

}  // namespace dqml
