//==============================================================================
// bench_kernels — compares the serial reference kernels against the planned
// OpenMP kernels on growing cutoffs and checks their agreement.
//   ./bench_kernels [max_cutoff]
//==============================================================================
#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "eulerctl/bilinear.hpp"
#include "eulerctl/grid_oracle.hpp"
#include "eulerctl/rng.hpp"

using namespace eulerctl;

namespace {

SpectralField random_ball_field(Rng& rng, int radius) {
    SpectralField u;
    for (const WaveVector& m : canonical_l1_ball(radius))
        for (const auto& f : fiber_basis(m)) u = u + f * rng.normal();
    return u * (1.0 / sobolev_norm(u, 0.0));
}

template <class F>
double time_of(F&& fn, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

} // namespace

int main(int argc, char** argv) {
    const int max_cutoff = argc > 1 ? std::atoi(argv[1]) : 6;
#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("bilinear form B(a,b): serial reference vs planned kernel (%d threads)\n",
                threads);
    std::printf("%-8s %-10s %-12s %-12s %-12s %-10s %-10s\n", "cutoff", "pairs", "ref [ms]",
                "plan1 [ms]", "planN [ms]", "speedup", "agree");

    Rng rng(424242);
    for (int cutoff = 3; cutoff <= max_cutoff; ++cutoff) {
        const auto a = random_ball_field(rng, cutoff);
        const auto b = random_ball_field(rng, cutoff);
        const ConvPlan plan = ConvPlan::ball_plan(cutoff);
        const int reps = cutoff <= 4 ? 10 : 3;

        const double t_ref = time_of([&] { ref::bilinear(a, b); }, reps);

#ifdef _OPENMP
        omp_set_num_threads(1);
#endif
        const double t_plan1 = time_of([&] { plan.apply(a, b); }, reps);
#ifdef _OPENMP
        omp_set_num_threads(threads);
#endif
        const double t_plann = time_of([&] { plan.apply(a, b); }, reps);

        const auto fast = plan.apply(a, b);
        const auto slow = ref::bilinear(a, b).truncated_l1(cutoff);
        const double gap = sobolev_norm(fast.truncated_l1(cutoff) - slow, 0.0);
        const bool agree = gap < 1e-12 * std::max(1.0, sobolev_norm(slow, 0.0));

        std::printf("%-8d %-10zu %-12.3f %-12.3f %-12.3f %-10.2f %-10s\n", cutoff,
                    plan.pair_count(), 1e3 * t_ref, 1e3 * t_plan1, 1e3 * t_plann,
                    t_ref / t_plann, agree ? "yes" : "NO");
        if (!agree) return 1;
    }

    std::printf("\ngrid advection oracle (16^3), serial field loop vs OpenMP grid\n");
    {
        const auto a = random_ball_field(rng, 3);
        const auto b = random_ball_field(rng, 3);
        const double t = time_of([&] { grid_oracle_advect(a, b, 16); }, 3);
        std::printf("grid_oracle_advect cutoff 3: %.1f ms\n", 1e3 * t);
    }
    return 0;
}
