// Kernel benchmark: serial reference sweep vs the OpenMP sweep on a
// percolation-like sparse system, with a bitwise equality check.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "percwalk/field.hpp"
#include "percwalk/sweep_kernel.hpp"

using percwalk::FieldSeed;
using percwalk::SweepSystem;

namespace {

// 2D grid graph with edges kept at rate p, weights e^{-lambda}/4: the same
// structure the passage solver assembles.
SweepSystem make_system(int64_t side, double p, double lambda, uint64_t seed) {
    SweepSystem s;
    s.n = side * side;
    s.row_begin.assign(1, 0);
    s.src.assign(s.n, 0.0);
    FieldSeed fs{seed};
    const double w = std::exp(-lambda) / 4.0;
    int64_t coords[2];
    for (int64_t i = 0; i < s.n; ++i) {
        coords[0] = i / side;
        coords[1] = i % side;
        for (int axis = 0; axis < 2; ++axis) {
            for (int dir : {+1, -1}) {
                int64_t nb0 = coords[0] + (axis == 0 ? dir : 0);
                int64_t nb1 = coords[1] + (axis == 1 ? dir : 0);
                if (nb0 < 0 || nb0 >= side || nb1 < 0 || nb1 >= side) continue;
                int64_t lower[2] = {std::min(coords[0], nb0), std::min(coords[1], nb1)};
                if (!percwalk::is_open_raw(fs, 2, lower, axis, p)) continue;
                s.col.push_back(static_cast<int32_t>(nb0 * side + nb1));
                s.wgt.push_back(w);
            }
        }
        if (i % 97 == 0) s.src[i] = 1e-3;
        s.row_begin.push_back(static_cast<int64_t>(s.col.size()));
    }
    return s;
}

double time_sweeps(const SweepSystem& s, int iters, bool parallel, std::vector<double>& f) {
    std::vector<double> f_next(s.n, 0.0);
    std::fill(f.begin(), f.end(), 0.0);
    auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < iters; ++k) {
        percwalk::sweep_once(s, f, f_next, parallel);
        f.swap(f_next);
    }
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    int64_t side = argc > 1 ? std::atoll(argv[1]) : 1200;
    int iters = argc > 2 ? std::atoi(argv[2]) : 120;

    SweepSystem s = make_system(side, 0.75, 0.5, 42);
    std::printf("system: %lld rows, %zu entries, %d sweeps\n",
                static_cast<long long>(s.n), s.col.size(), iters);

    std::vector<double> f_serial(s.n), f_parallel(s.n);
    double t_serial = time_sweeps(s, iters, false, f_serial);
    double updates = static_cast<double>(s.n) * iters / 1e6;
    std::printf("serial reference : %7.3f s   %8.1f Mrow/s\n", t_serial, updates / t_serial);

#ifdef _OPENMP
    for (int threads : {1, 2, 4, 8}) {
        if (threads > omp_get_num_procs() * 2) break;
        omp_set_num_threads(threads);
        double t = time_sweeps(s, iters, true, f_parallel);
        bool identical = f_parallel == f_serial;
        std::printf("openmp %2d threads: %7.3f s   %8.1f Mrow/s   speedup %5.2fx   %s\n",
                    threads, t, updates / t, t_serial / t,
                    identical ? "bitwise == serial" : "MISMATCH");
        if (!identical) return 1;
    }
#else
    std::printf("built without OpenMP; parallel kernel unavailable\n");
#endif
    return 0;
}
