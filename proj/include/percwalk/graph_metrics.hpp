#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "percwalk/clusters.hpp"
#include "percwalk/stats.hpp"

namespace percwalk {

// Length of the shortest open lattice path, or unreachable.
struct ChemDistance {
    static ChemDistance infinite() { return ChemDistance{}; }
    static ChemDistance of(int64_t steps) {
        ChemDistance d;
        d.finite_ = true;
        d.steps_ = steps;
        return d;
    }

    bool finite() const { return finite_; }
    int64_t value() const { return steps_; }

private:
    bool finite_ = false;
    int64_t steps_ = 0;
};

// BFS shortest open-path length between two in-box points. Unreachable iff
// the points lie in different clusters.
ChemDistance chemical_distance(const ClusterIndex& clusters, const Point& x, const Point& y);

// Distances (in edges) from `source` to every box vertex over open in-box
// edges; -1 where unreachable. If inner_radius >= 0, the search is
// restricted to the linf ball of that radius around the box center.
std::vector<int32_t> bfs_distances(const ClusterIndex& clusters, const Point& source,
                                   int64_t inner_radius = -1);

struct TimeConstantOptions {
    int64_t box_radius = 0;  // 0 = auto from K and the direction
    int64_t max_vertices = kDefaultMaxBoxVertices;
};

struct TimeConstantRecord {
    int64_t replicate = 0;
    uint64_t seed = 0;
    int64_t k = 0;
    int64_t distance = 0;
    double per_k = 0.0;
    bool boundary_warning = false;
};

struct TimeConstantEstimate {
    Point direction;
    double p = 0.0;
    std::vector<Estimate> per_k;  // index k-1
    double mu_hat = 0.0;          // mean at the largest k
    double mu_upper = 0.0;        // min over k of per-k means (Fekete upper bound)
    int64_t box_radius = 0;
    int64_t boundary_warnings = 0;
    std::vector<TimeConstantRecord> records;
};

// Estimates the linear growth rate of the chemical distance along a
// direction: per replicate seed, d([0]_p, [kx]_p)/k for k = 1..K, anchored
// to the giant cluster at p itself.
TimeConstantEstimate time_constant_estimate(const Point& direction, double p, int64_t K,
                                            int64_t replicates, FieldSeed master,
                                            const TimeConstantOptions& opts = {});

}  // namespace percwalk
