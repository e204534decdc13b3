#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gert/experiment.hpp"
#include "gert/planner.hpp"
#include "gert/sim.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& fn) {
    const auto t0 = Clock::now();
    fn();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::cout << name << ": serial " << serial_ms << " ms, parallel " << parallel_ms
              << " ms, speedup " << (parallel_ms > 0 ? serial_ms / parallel_ms : 0.0)
              << "x, outputs identical: " << (identical ? "yes" : "NO") << '\n';
}

}  // namespace

int main() {
    using namespace gert;

#ifdef _OPENMP
    std::cout << "OpenMP threads: " << omp_get_max_threads() << "\n\n";
#else
    std::cout << "built without OpenMP; parallel paths run serially\n\n";
#endif

    {
        const ChannelParams ch{1000, 0.7};
        const SimSeed seed{42};
        std::vector<double> a, b;
        const double s = time_ms([&] { a = collect_z_serial(1200, ch, 20000, seed, 0); });
        const double p = time_ms([&] { b = collect_z(1200, ch, 20000, seed, 0); });
        report("frame batch (20k frames, f=1000)", s, p, a == b);
    }

    {
        const AccuracySpec spec{0.95, 0.05};
        FramePlan a, b;
        const double s = time_ms([&] { a = plan_serial(21182, spec); });
        const double p = time_ms([&] { b = plan(21182, spec); });
        report("plan (t_m=21182)", s, p,
               a.r == b.r && a.f == b.f && a.n == b.n && a.cost == b.cost);
    }

    {
        ExperimentSpec es;
        es.t_values = {1200};
        es.trials = 200;
        es.master_seed = 42;
        std::vector<TrialRecord> a, b;
        const double s = time_ms([&] { a = run_experiment_serial(es); });
        const double p = time_ms([&] { b = run_experiment(es); });
        bool same = a.size() == b.size();
        for (std::size_t i = 0; same && i < a.size(); ++i)
            same = a[i].t == b[i].t && a[i].trial == b[i].trial && a[i].t_m == b[i].t_m &&
                   a[i].slots == b[i].slots &&
                   (a[i].t_hat == b[i].t_hat ||
                    (std::isnan(a[i].t_hat) && std::isnan(b[i].t_hat)));
        report("experiment (200 trials, t=1200)", s, p, same);
    }

    return 0;
}
