#pragma once

#include <cmath>
#include <deque>
#include <optional>
#include <set>

#include "percwalk/field.hpp"
#include "percwalk/lattice.hpp"

// Closed-form references and configuration samplers used by the self test
// and the test suites. Everything here is independent of the solver path it
// cross-checks.

namespace percwalk {

// Per-step factor of the passage transform on the full line (d = 1, p = 1):
// the minimal root of phi = e^{-lambda} (1 + phi^2) / 2, so that
// e_lambda(0, n) = phi^n.
inline double line_passage_factor(double lambda) {
    return std::exp(lambda) * (1.0 - std::sqrt(1.0 - std::exp(-2.0 * lambda)));
}

// Exit transform from the center of [-ell, ell] on the full line:
// E^0[e^{-lambda T}] = 1 / cosh((ell + 1) arccosh(e^lambda)).
inline double line_exit_transform(double lambda, int64_t ell) {
    return 1.0 / std::cosh(static_cast<double>(ell + 1) * std::acosh(std::exp(lambda)));
}

// A finite open cluster grown from the origin, for oracle-equivalence
// checks. Rejects clusters that are trapped-singleton, larger than
// max_size, or not contained well inside the working region.
struct SmallClusterSample {
    OpenConfig config;
    std::vector<Point> vertices;  // lexicographic order
    Point source, target;
};

inline std::optional<SmallClusterSample> sample_small_cluster(uint64_t seed, double p, int dim,
                                                              int64_t max_size) {
    SmallClusterSample out;
    out.config = OpenConfig{FieldSeed{seed}, p};
    const int64_t radius_cap = 12;

    std::set<Point> seen;
    std::deque<Point> queue;
    Point origin = Point::zero(dim);
    seen.insert(origin);
    queue.push_back(origin);
    while (!queue.empty()) {
        Point u = queue.front();
        queue.pop_front();
        for (const Point& w : neighbors(u)) {
            if (!out.config.open(Edge::canonical(u, w))) continue;
            if (seen.count(w)) continue;
            if (norm_inf(w) > radius_cap) return std::nullopt;  // open-ended growth
            if (static_cast<int64_t>(seen.size()) >= max_size) return std::nullopt;
            seen.insert(w);
            queue.push_back(w);
        }
    }
    if (seen.size() < 2) return std::nullopt;

    out.vertices.assign(seen.begin(), seen.end());
    const uint64_t h = mix64(seed ^ 0x70616972ULL);
    size_t i = h % out.vertices.size();
    size_t j = (i + 1 + (mix64(h) % (out.vertices.size() - 1))) % out.vertices.size();
    out.source = out.vertices[i];
    out.target = out.vertices[j];
    return out;
}

}  // namespace percwalk
