// Timing comparison of the serial reference path against the OpenMP path for
// an ensemble of independent orbit integrations, plus a bit-identity check of
// the two result sets.  Reports timings only; on a single hardware thread the
// parallel path cannot be faster.
#include <chrono>
#include <cstdio>
#include <vector>

#include "rod/ensemble.hpp"
#include "rod/models.hpp"
#include "rod/rng.hpp"
#include "rod/sim.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double run_ensemble(const std::vector<rod::FieldState>& seeds,
                    const rod::RodParams& params, bool parallel,
                    std::vector<std::vector<double>>& finals) {
    finals.assign(seeds.size(), {});
    const auto t0 = Clock::now();
    rod::parallel_for(
        seeds.size(),
        [&](std::size_t i) {
            rod::SimOptions so;
            so.tol = 1e-10;
            so.samples = 2;
            finals[i] = rod::simulate(seeds[i], params, 50.0, so).final_state.flat();
        },
        parallel);
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int main() {
    const rod::RodParams params{1.0, 1.0, 0.75};
    rod::Rng rng(2718);
    std::vector<rod::FieldState> seeds;
    for (int i = 0; i < 24; ++i) {
        rod::FieldState st(2);
        for (int k = 0; k <= 2; ++k)
            st.f[k] = rod::Vec3{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                rng.uniform(-1.0, 1.0)};
        seeds.push_back(st);
    }

    std::vector<std::vector<double>> serial, parallel;
    const double t_serial = run_ensemble(seeds, params, false, serial);
    const double t_parallel = run_ensemble(seeds, params, true, parallel);

    bool identical = true;
    for (std::size_t i = 0; i < seeds.size(); ++i)
        identical = identical && serial[i] == parallel[i];

    std::printf("orbits:            %zu\n", seeds.size());
    std::printf("worker threads:    %d\n", rod::worker_count());
    std::printf("serial path:       %.3f s\n", t_serial);
    std::printf("parallel path:     %.3f s\n", t_parallel);
    std::printf("speedup:           %.2fx\n", t_serial / t_parallel);
    std::printf("results identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
