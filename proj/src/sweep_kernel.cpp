#include "percwalk/sweep_kernel.hpp"

#include <cmath>

namespace percwalk {

double sweep_once_serial(const SweepSystem& s, const std::vector<double>& f,
                         std::vector<double>& f_next) {
    double res = 0.0;
    for (int64_t i = 0; i < s.n; ++i) {
        double acc = s.src[i];
        for (int64_t e = s.row_begin[i]; e < s.row_begin[i + 1]; ++e)
            acc += s.wgt[e] * f[s.col[e]];
        f_next[i] = acc;
        res = std::max(res, std::fabs(acc - f[i]));
    }
    return res;
}

double sweep_once_parallel(const SweepSystem& s, const std::vector<double>& f,
                           std::vector<double>& f_next) {
    double res = 0.0;
#pragma omp parallel for schedule(static) reduction(max : res)
    for (int64_t i = 0; i < s.n; ++i) {
        double acc = s.src[i];
        for (int64_t e = s.row_begin[i]; e < s.row_begin[i + 1]; ++e)
            acc += s.wgt[e] * f[s.col[e]];
        f_next[i] = acc;
        res = std::max(res, std::fabs(acc - f[i]));
    }
    return res;
}

}  // namespace percwalk
