#include "percwalk/clusters.hpp"

#include <string>

namespace percwalk {

namespace {

int32_t find_root(std::vector<int32_t>& parent, int32_t v) {
    while (parent[v] != v) {
        parent[v] = parent[parent[v]];  // path halving
        v = parent[v];
    }
    return v;
}

}  // namespace

ClusterIndex::ClusterIndex(LatticeBox box, OpenPredicate open, int64_t max_vertices)
    : box_(std::move(box)), open_(std::move(open)) {
    build(max_vertices);
}

ClusterIndex::ClusterIndex(LatticeBox box, const OpenConfig& config, int64_t max_vertices)
    : box_(std::move(box)), config_(config) {
    OpenConfig cfg = config;
    open_ = [cfg](const Edge& e) { return cfg.open(e); };
    build(max_vertices);
}

void ClusterIndex::build(int64_t max_vertices) {
    if (box_.norm_kind != NormKind::linf)
        throw ValidationError("box.norm_kind", "cluster indexing requires an linf box");
    const int64_t n = box_.cube_vertex_count();
    if (n > max_vertices)
        throw ResourceError("box of " + std::to_string(n) + " vertices exceeds budget of " +
                            std::to_string(max_vertices));
    margin_ = box_.radius / 2;

    std::vector<int32_t> parent(n);
    std::vector<int32_t> sz(n, 1);
    for (int64_t i = 0; i < n; ++i) parent[i] = static_cast<int32_t>(i);

    const int d = box_.dim();
    const int64_t side = box_.side();
    std::vector<int64_t> stride(d, 1);
    for (int i = d - 2; i >= 0; --i) stride[i] = stride[i + 1] * side;

    // Unite across each open in-box edge once (from every vertex, the +1
    // neighbor along each axis). Row-major enumeration keeps the coordinate
    // vector incrementally.
    std::vector<int64_t> coords(d);
    for (int i = 0; i < d; ++i) coords[i] = box_.center.c[i] - box_.radius;

    auto unite = [&](int64_t i, int64_t j) {
        int32_t ru = find_root(parent, static_cast<int32_t>(i));
        int32_t rv = find_root(parent, static_cast<int32_t>(j));
        if (ru == rv) return;
        if (sz[ru] < sz[rv]) std::swap(ru, rv);
        parent[rv] = ru;
        sz[ru] += sz[rv];
    };

    if (config_) {
        const FieldSeed fs = config_->field;
        const double p = config_->p;
        for (int64_t i = 0; i < n; ++i) {
            for (int axis = 0; axis < d; ++axis) {
                if (coords[axis] + 1 > box_.center.c[axis] + box_.radius) continue;
                if (is_open_raw(fs, d, coords.data(), axis, p)) unite(i, i + stride[axis]);
            }
            // advance row-major coordinates
            for (int axis = d - 1; axis >= 0; --axis) {
                if (++coords[axis] <= box_.center.c[axis] + box_.radius) break;
                coords[axis] = box_.center.c[axis] - box_.radius;
            }
        }
    } else {
        for (int64_t i = 0; i < n; ++i) {
            Point u = box_.point_of(i);
            for (int axis = 0; axis < d; ++axis) {
                Point v = u;
                v.c[axis] += 1;
                if (!box_.contains(v)) continue;
                if (!open_(Edge{u, v})) continue;
                unite(i, box_.index_of(v));
            }
        }
    }

    root_.resize(n);
    size_.assign(n, 0);
    for (int64_t i = 0; i < n; ++i) root_[i] = find_root(parent, static_cast<int32_t>(i));
    for (int64_t i = 0; i < n; ++i)
        if (root_[i] == static_cast<int32_t>(i)) size_[i] = sz[i];

    // unique largest cluster; ties broken by the smaller root index, which
    // is the lexicographically smaller root vertex
    for (int64_t i = 0; i < n; ++i) {
        if (size_[i] > giant_size_) {
            giant_size_ = size_[i];
            giant_root_ = i;
        }
    }
}

void ClusterIndex::check_margin(const Point& p, const char* what) const {
    if (!within_margin(p))
        throw MarginError(std::string(what) +
                          ": point too close to the box boundary (within margin " +
                          std::to_string(margin_) + " of radius " + std::to_string(box_.radius) +
                          ")");
}

bool ClusterIndex::within_margin(const Point& p) const {
    return norm_inf(p - box_.center) <= box_.radius - margin_;
}

bool ClusterIndex::in_open_set(const Point& p) const {
    for (const Point& q : neighbors(p)) {
        if (!box_.contains(q)) continue;
        if (open_(Edge::canonical(p, q))) return true;
    }
    return false;
}

std::vector<int64_t> ClusterIndex::cluster_sizes() const {
    std::vector<int64_t> out;
    for (int64_t i = 0; i < vertex_count(); ++i)
        if (size_[i] > 0) out.push_back(size_[i]);
    std::sort(out.rbegin(), out.rend());
    return out;
}

ClusterIndex build_clusters(const LatticeBox& box, const OpenConfig& config,
                            int64_t max_vertices) {
    return ClusterIndex(box, config, max_vertices);
}

ClusterIndex build_clusters_custom(const LatticeBox& box, OpenPredicate open,
                                   int64_t max_vertices) {
    return ClusterIndex(box, std::move(open), max_vertices);
}

Point anchor(const Point& x, const ClusterIndex& clusters) {
    if (clusters.giant_root() < 0 || clusters.giant_size() < 1)
        throw ValidationError("clusters", "giant cluster is empty");
    clusters.check_margin(x, "anchor");

    const int64_t r_max = clusters.box().radius - clusters.margin();
    for (int64_t r = 0; r <= r_max; ++r) {
        Point found;
        bool hit = false;
        for_each_l1_ring(x.dim(), r, [&](const Point& off) {
            if (hit) return;
            Point y = x + off;
            if (!clusters.box().contains(y)) return;
            if (clusters.in_giant(y)) {
                found = y;
                hit = true;
            }
        });
        if (hit) return found;
    }
    throw MarginError("anchor: no giant-cluster vertex within the search range");
}

}  // namespace percwalk
