#include "percwalk/graph_metrics.hpp"

#include <deque>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace percwalk {

namespace {

// BFS over open in-box edges. Early exit once `target` is reached (if set).
std::vector<int32_t> bfs_impl(const ClusterIndex& clusters, const Point& source,
                              int64_t inner_radius, const Point* target) {
    const LatticeBox& box = clusters.box();
    const int d = box.dim();
    std::vector<int32_t> dist(box.cube_vertex_count(), -1);
    if (!box.contains(source)) return dist;
    if (inner_radius >= 0 && norm_inf(source - box.center) > inner_radius) return dist;

    std::deque<int64_t> queue;
    dist[box.index_of(source)] = 0;
    queue.push_back(box.index_of(source));
    const int64_t target_idx = (target && box.contains(*target)) ? box.index_of(*target) : -1;

    while (!queue.empty()) {
        int64_t ui = queue.front();
        queue.pop_front();
        if (ui == target_idx) break;
        Point u = box.point_of(ui);
        int32_t du = dist[ui];
        for (int axis = 0; axis < d; ++axis) {
            for (int64_t step : {int64_t{1}, int64_t{-1}}) {
                Point v = u;
                v.c[axis] += step;
                if (!box.contains(v)) continue;
                if (inner_radius >= 0 && norm_inf(v - box.center) > inner_radius) continue;
                int64_t vi = box.index_of(v);
                if (dist[vi] >= 0) continue;
                if (!clusters.open()(Edge::canonical(u, v))) continue;
                dist[vi] = du + 1;
                queue.push_back(vi);
            }
        }
    }
    return dist;
}

}  // namespace

std::vector<int32_t> bfs_distances(const ClusterIndex& clusters, const Point& source,
                                   int64_t inner_radius) {
    return bfs_impl(clusters, source, inner_radius, nullptr);
}

ChemDistance chemical_distance(const ClusterIndex& clusters, const Point& x, const Point& y) {
    clusters.check_margin(x, "chemical_distance");
    clusters.check_margin(y, "chemical_distance");
    if (x == y) return clusters.in_open_set(x) ? ChemDistance::of(0) : ChemDistance::infinite();
    if (!clusters.same_cluster(x, y)) return ChemDistance::infinite();
    auto dist = bfs_impl(clusters, x, -1, &y);
    int32_t d = dist[clusters.box().index_of(y)];
    return d >= 0 ? ChemDistance::of(d) : ChemDistance::infinite();
}

TimeConstantEstimate time_constant_estimate(const Point& direction, double p, int64_t K,
                                            int64_t replicates, FieldSeed master,
                                            const TimeConstantOptions& opts) {
    if (norm1(direction) == 0) throw ValidationError("direction", "must be nonzero");
    if (K < 1) throw ValidationError("K", "must be >= 1");
    if (replicates < 1) throw ValidationError("replicates", "must be >= 1");

    const int d = direction.dim();
    int64_t radius = opts.box_radius;
    if (radius <= 0) radius = K * norm_inf(direction) + 16;

    // center the box at the midpoint of the span so both endpoints clear the margin
    Point center = Point::zero(d);
    for (int i = 0; i < d; ++i) center.c[i] = K * direction.c[i] / 2;
    LatticeBox box(center, radius, NormKind::linf);

    TimeConstantEstimate out;
    out.direction = direction;
    out.p = p;
    out.box_radius = radius;

    struct PerReplicate {
        std::vector<int64_t> dists;    // index k-1, -1 unreachable
        std::vector<bool> warns;
        uint64_t seed = 0;
    };
    std::vector<PerReplicate> slots(replicates);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int64_t rep = 0; rep < replicates; ++rep) {
        FieldSeed fs = replicate_seed(master, static_cast<uint64_t>(rep));
        ClusterIndex clusters = build_clusters(box, OpenConfig{fs, p}, opts.max_vertices);
        Point a0 = anchor(Point::zero(d), clusters);
        auto dist_full = bfs_distances(clusters, a0);
        auto dist_inner = bfs_distances(clusters, a0, radius - clusters.margin());

        PerReplicate& slot = slots[rep];
        slot.seed = fs.seed;
        slot.dists.assign(K, -1);
        slot.warns.assign(K, false);
        for (int64_t k = 1; k <= K; ++k) {
            Point ak = anchor(direction * k, clusters);
            int64_t idx = box.index_of(ak);
            int32_t df = dist_full[idx];
            slot.dists[k - 1] = df;
            // geodesic forced through the margin shell: the inner-restricted
            // search is strictly longer (or loses the target)
            slot.warns[k - 1] = df >= 0 && dist_inner[idx] != df;
        }
    }

    // fixed-order merge
    out.per_k.resize(K);
    std::vector<RunningStat> stats(K);
    for (int64_t rep = 0; rep < replicates; ++rep) {
        for (int64_t k = 1; k <= K; ++k) {
            int64_t dk = slots[rep].dists[k - 1];
            if (dk < 0) continue;  // anchors in different clusters; excluded
            stats[k - 1].add(static_cast<double>(dk) / static_cast<double>(k));
            TimeConstantRecord rec;
            rec.replicate = rep;
            rec.seed = slots[rep].seed;
            rec.k = k;
            rec.distance = dk;
            rec.per_k = static_cast<double>(dk) / static_cast<double>(k);
            rec.boundary_warning = slots[rep].warns[k - 1];
            if (rec.boundary_warning) ++out.boundary_warnings;
            out.records.push_back(rec);
        }
    }
    for (int64_t k = 0; k < K; ++k) out.per_k[k] = stats[k].estimate();
    out.mu_hat = out.per_k[K - 1].mean;
    out.mu_upper = out.per_k[0].mean;
    for (int64_t k = 1; k < K; ++k) out.mu_upper = std::min(out.mu_upper, out.per_k[k].mean);
    return out;
}

}  // namespace percwalk
