#pragma once

#include <cstdint>
#include <vector>

namespace percwalk {

// Sparse linear sweep f_next = W f + src in CSR form. One row per unknown
// vertex; entries carry the discounted transition weights. Both kernels
// below compute the same update; the parallel one distributes rows across
// OpenMP threads. Results are bitwise identical for any thread count: rows
// write disjoint slots and the residual is a max-reduction.
struct SweepSystem {
    int64_t n = 0;
    std::vector<int64_t> row_begin;  // size n+1
    std::vector<int32_t> col;
    std::vector<double> wgt;
    std::vector<double> src;

    void reserve_rows(int64_t rows) {
        row_begin.reserve(rows + 1);
        src.reserve(rows);
    }
};

// Reference implementation; kept serial for testing and as the baseline of
// the kernel benchmark. Returns sup-norm of (f_next - f).
double sweep_once_serial(const SweepSystem& s, const std::vector<double>& f,
                         std::vector<double>& f_next);

double sweep_once_parallel(const SweepSystem& s, const std::vector<double>& f,
                           std::vector<double>& f_next);

inline double sweep_once(const SweepSystem& s, const std::vector<double>& f,
                         std::vector<double>& f_next, bool parallel) {
    return parallel ? sweep_once_parallel(s, f, f_next) : sweep_once_serial(s, f, f_next);
}

}  // namespace percwalk
