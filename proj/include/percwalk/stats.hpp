#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace percwalk {

// (mean, standard error, replicate count) for a Monte Carlo scalar.
struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;  // sample stddev / sqrt(n); zero for n < 2
    int64_t n = 0;
};

inline double pooled_stderr(const Estimate& a, const Estimate& b) {
    return std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
}

// Streaming mean/variance (Welford). Merging replicate results happens in a
// fixed serial order so aggregation is independent of task scheduling.
class RunningStat {
public:
    void add(double x) {
        ++n_;
        double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }

    int64_t n() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }
    double stderr_of_mean() const {
        return n_ > 1 ? stddev() / std::sqrt(static_cast<double>(n_)) : 0.0;
    }

    Estimate estimate() const { return Estimate{mean(), stderr_of_mean(), n()}; }

private:
    int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Exact (Clopper-Pearson) binomial confidence interval for k successes out
// of n trials, by bisection on the binomial tail.
struct BinomialCI {
    double lo = 0.0;
    double hi = 1.0;
};

namespace detail {

// P(X <= k) for X ~ Binomial(n, p), summed with log terms for stability.
inline double binom_cdf(int64_t k, int64_t n, double p) {
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return k >= n ? 1.0 : 0.0;
    double cdf = 0.0;
    double lp = std::log(p), lq = std::log1p(-p);
    double lchoose = 0.0;  // log C(n, i), updated incrementally
    for (int64_t i = 0; i <= k; ++i) {
        if (i > 0) lchoose += std::log(static_cast<double>(n - i + 1)) - std::log(static_cast<double>(i));
        cdf += std::exp(lchoose + static_cast<double>(i) * lp + static_cast<double>(n - i) * lq);
    }
    return std::min(cdf, 1.0);
}

}  // namespace detail

inline BinomialCI clopper_pearson(int64_t k, int64_t n, double confidence = 0.95) {
    const double alpha = 1.0 - confidence;
    BinomialCI ci;
    if (k > 0) {
        // largest p with P(X >= k) <= alpha/2  <=>  P(X <= k-1) >= 1 - alpha/2
        double lo = 0.0, hi = static_cast<double>(k) / static_cast<double>(n);
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            if (detail::binom_cdf(k - 1, n, mid) >= 1.0 - alpha / 2) lo = mid;
            else hi = mid;
        }
        ci.lo = lo;
    }
    if (k < n) {
        double lo = static_cast<double>(k) / static_cast<double>(n), hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            if (detail::binom_cdf(k, n, mid) <= alpha / 2) hi = mid;
            else lo = mid;
        }
        ci.hi = hi;
    }
    return ci;
}

}  // namespace percwalk
