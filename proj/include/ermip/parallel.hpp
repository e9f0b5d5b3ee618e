#pragma once

// Execution policy shared by the data-parallel kernels. Every kernel has a
// plain serial loop (the reference) and an OpenMP loop; both write into
// per-item slots or take order-independent reductions (max), so their outputs
// are bit-identical.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ermip {

struct ExecPolicy {
    enum class Mode { serial, openmp };
    Mode mode = Mode::serial;
    int jobs = 0;  // 0: runtime default

    static ExecPolicy serial() { return {Mode::serial, 1}; }
    static ExecPolicy openmp(int jobs = 0) { return {Mode::openmp, jobs}; }
    bool parallel() const { return mode == Mode::openmp; }
};

inline int hardware_jobs() {
#ifdef _OPENMP
    return omp_get_num_procs();
#else
    return 1;
#endif
}

/// Calls body(i) for i in [0, count). Iterations must not share mutable state.
template <class Body>
void parallel_for(const ExecPolicy& policy, std::size_t count, Body&& body) {
    const auto n = static_cast<std::int64_t>(count);
#ifdef _OPENMP
    if (policy.parallel()) {
        const int jobs = policy.jobs > 0 ? policy.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
        for (std::int64_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
        return;
    }
#endif
    (void)policy;
    for (std::int64_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
}

/// max over i in [0, count) of f(i); -inf for an empty range.
template <class F>
double parallel_max(const ExecPolicy& policy, std::size_t count, F&& f) {
    const auto n = static_cast<std::int64_t>(count);
    double best = -std::numeric_limits<double>::infinity();
#ifdef _OPENMP
    if (policy.parallel()) {
        const int jobs = policy.jobs > 0 ? policy.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) reduction(max : best) num_threads(jobs)
        for (std::int64_t i = 0; i < n; ++i) best = std::max(best, f(static_cast<std::size_t>(i)));
        return best;
    }
#endif
    (void)policy;
    for (std::int64_t i = 0; i < n; ++i) best = std::max(best, f(static_cast<std::size_t>(i)));
    return best;
}

/// min over i in [0, count) of f(i); +inf for an empty range.
template <class F>
double parallel_min(const ExecPolicy& policy, std::size_t count, F&& f) {
    return -parallel_max(policy, count, [&](std::size_t i) { return -f(i); });
}

}  // namespace ermip
