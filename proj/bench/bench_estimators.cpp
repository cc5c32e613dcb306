// Serial reference vs OpenMP estimators on the same slot streams.
// Usage: lra_bench [slots] [threads...]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include <omp.h>

#include "lra/core_model.hpp"
#include "lra/montecarlo.hpp"

namespace {

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace lra;
    const std::uint64_t slots = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
    std::vector<int> threads;
    for (int i = 2; i < argc; ++i) threads.push_back(std::atoi(argv[i]));
    if (threads.empty()) threads = {1, 2, 4, omp_get_max_threads()};

    const auto thr_cfg = make_uniform_config(3, 10, 10.0, 1.0, TargetSinr::from_db(3.0));
    const auto out_cfg = make_uniform_config(3, 60, 3.0, 1.0, TargetSinr::from_db(10.0), 4);

    std::printf("slots=%llu max_threads=%d\n", static_cast<unsigned long long>(slots), omp_get_max_threads());
    std::printf("%-12s %8s %10s %10s %8s\n", "kernel", "threads", "seconds", "slots/s", "match");

    ThroughputEstimate ref_t;
    const double ts = seconds([&] { ref_t = estimate_throughput_serial(thr_cfg, slots, 7); });
    std::printf("%-12s %8s %10.3f %10.0f %8s\n", "throughput", "serial", ts, slots / ts, "-");
    for (int t : threads) {
        ThroughputEstimate est;
        const double dt = seconds([&] { est = estimate_throughput(thr_cfg, slots, 7, {t, {}}); });
        const bool match = est.total.mean == ref_t.total.mean && est.total.std_error == ref_t.total.std_error;
        std::printf("%-12s %8d %10.3f %10.0f %8s\n", "throughput", t, dt, slots / dt, match ? "yes" : "NO");
    }

    OutageEstimate ref_o;
    const double os = seconds([&] { ref_o = estimate_outage_serial(out_cfg, slots, 7); });
    std::printf("%-12s %8s %10.3f %10.0f %8s\n", "outage", "serial", os, slots / os, "-");
    for (int t : threads) {
        OutageEstimate est;
        const double dt = seconds([&] { est = estimate_outage(out_cfg, slots, 7, {t, {}}); });
        const bool match = est.failures == ref_o.failures && est.users == ref_o.users;
        std::printf("%-12s %8d %10.3f %10.0f %8s\n", "outage", t, dt, slots / dt, match ? "yes" : "NO");
    }
    return 0;
}
