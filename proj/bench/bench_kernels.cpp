// Timing comparison of the OpenMP kernels against their serial reference
// implementations. The two paths share the reduction order, so outputs must
// match bit for bit; the table reports wall time and speedup.
//
//   ./bench_kernels [threads]
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "casimir/lifshitz.hpp"
#include "casimir/paa.hpp"
#include "casimir/parallel.hpp"
#include "casimir/pfa.hpp"

using namespace casimir;

namespace {

double time_of(const std::function<double()>& fn, double& result, int reps) {
    using clock = std::chrono::steady_clock;
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clock::now();
        result = fn();
        const double dt = std::chrono::duration<double>(clock::now() - t0).count();
        if (dt < best) best = dt;
    }
    return best;
}

void row(const char* name, const std::function<double()>& serial_fn,
         const std::function<double()>& parallel_fn, int reps) {
    double serial_val = 0.0, parallel_val = 0.0;
    set_threads(1);
    const double ts = time_of(serial_fn, serial_val, reps);
    set_threads(0);
    const double tp = time_of(parallel_fn, parallel_val, reps);
    std::printf("%-28s %10.3f ms %10.3f ms %7.2fx   %s\n", name, ts * 1e3, tp * 1e3, ts / tp,
                serial_val == parallel_val ? "bit-equal" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) set_threads(std::atoi(argv[1]));
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    const auto si = DielectricModel::paper_silicon();
    const GratingSpec spec = GratingSpec::paper();
    const Scene scene = rect_unit_cell(spec);

    {
        QuadratureSpec quad;
        quad.rel_tol = 1e-7;
        row("lifshitz energy (si)",
            [&] { return reference::lifshitz_energy_per_area(si, 100e-9, quad); },
            [&] { return lifshitz_energy_per_area(si, 100e-9, quad); }, 3);
    }
    {
        const PlatePlateLaw law(DielectricModel::perfect_metal());
        std::vector<double> grid(60);
        for (int i = 0; i < 60; ++i) grid[i] = 1.8e-6 * i / 59.0;
        row("pfa force sweep (pm)",
            [&] { return reference::pfa_force_curve(scene, grid, law).samples.back().F; },
            [&] { return pfa_force_curve(scene, grid, law).samples.back().F; }, 2);
    }
    {
        const PaaQuadSpec quad;
        const PaaContext ctx(si, spec.thickness, quad);
        const Scene at_d = scene.with_displacement(1.0e-6);
        row("paa energy (si)",
            [&] { return reference::paa_energy(at_d, ctx, quad); },
            [&] { return paa_energy(at_d, ctx, quad); }, 2);
    }
    {
        row("paa brute force (si)",
            [&] { return paa_bruteforce_energy(scene, si, 8, 32); },
            [&] { return paa_bruteforce_energy(scene, si, 8, 32); }, 2);
    }
    set_threads(0);
    return 0;
}
