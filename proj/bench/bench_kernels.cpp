// Serial reference vs OpenMP for the data-parallel toroid kernels.
// usage: iqm_bench [scale]   (scale multiplies the default problem sizes)

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>

#include "iqm/numerics.hpp"
#include "iqm/toroid.hpp"

using namespace iqm;

namespace {

double best_of(int reps, const std::function<void()>& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void report(const char* name, long size, double serial, double parallel, bool same) {
    std::printf("%-26s %10ld  serial %8.4fs  omp %8.4fs  speedup %5.2fx  %s\n", name, size, serial, parallel,
                serial / parallel, same ? "identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    const long scale = argc > 1 ? std::max(1L, std::atol(argv[1])) : 1;
    std::printf("threads: %d\n", omp_get_max_threads());

    const RightToroid t({0.7, 0.5, 0.4, 0.3, std::sqrt(1.0 - 0.49 - 0.25 - 0.16 - 0.09)});
    constexpr int reps = 3;

    {
        const long n = 200000 * scale;
        RMat arc(t.n(), n);
        for (long i = 0; i < n; ++i)
            for (int k = 0; k < t.n(); ++k) arc(k, i) = counter_uniform(3, static_cast<std::uint64_t>(i * t.n() + k)) * t.side(k);
        std::vector<PartitionLabel> a, b;
        const double s = best_of(reps, [&] { a = locate_batch_serial(t, arc); });
        const double p = best_of(reps, [&] { b = locate_batch(t, arc); });
        bool same = a.size() == b.size();
        for (size_t i = 0; same && i < a.size(); ++i) same = a[i].k == b[i].k && a[i].on_boundary == b[i].on_boundary;
        report("locate_batch", n, s, p, same);
    }
    {
        const long n = 1000000 * scale;
        MeasureEstimate a, b;
        const double s = best_of(reps, [&] { a = part_measures_serial(t, n, 5); });
        const double p = best_of(reps, [&] { b = part_measures(t, n, 5); });
        report("part_measures", n, s, p, a.fraction == b.fraction && a.boundary_hits == b.boundary_hits);
    }
    {
        const long n = 1000000 * scale;
        const ToroidPoint base = make_point(t, RVec::Zero(t.n()));
        MeasureEstimate a, b;
        const double s = best_of(reps, [&] { a = global_phase_frequencies_serial(t, base, n, 7); });
        const double p = best_of(reps, [&] { b = global_phase_frequencies(t, base, n, 7); });
        report("global_phase_frequencies", n, s, p, a.fraction == b.fraction);
    }
    {
        const int n = static_cast<int>(200000 * scale);
        RVec x(t.n());
        for (int k = 0; k < t.n(); ++k) x(k) = 0.37 * (k + 1) * t.side(k) / t.n();
        const ToroidPoint base = make_point(t, x);
        RVec a, b;
        const double s = best_of(reps, [&] { a = diagonal_arcs_sampled_serial(t, base, n); });
        const double p = best_of(reps, [&] { b = diagonal_arcs_sampled(t, base, n); });
        report("diagonal_arcs_sampled", n, s, p, a == b);
    }
    return 0;
}
