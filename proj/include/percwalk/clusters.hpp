#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "percwalk/errors.hpp"
#include "percwalk/field.hpp"
#include "percwalk/lattice.hpp"

namespace percwalk {

using OpenPredicate = std::function<bool(const Edge&)>;

inline constexpr int64_t kDefaultMaxBoxVertices = int64_t{1} << 24;

// Connected-component structure of the open subgraph inside a finite linf
// box. The largest component stands in for the infinite cluster; point
// queries are rejected when they come within `margin` of the box boundary,
// where that proxy is unreliable.
class ClusterIndex {
public:
    ClusterIndex() = default;
    ClusterIndex(LatticeBox box, OpenPredicate open, int64_t max_vertices);
    ClusterIndex(LatticeBox box, const OpenConfig& config, int64_t max_vertices);

    const LatticeBox& box() const { return box_; }
    const OpenPredicate& open() const { return open_; }
    // Present when built from a (field, p) configuration; absent for
    // hand-built predicates.
    const std::optional<OpenConfig>& config() const { return config_; }
    int64_t vertex_count() const { return static_cast<int64_t>(root_.size()); }

    int64_t margin() const { return margin_; }
    void set_margin(int64_t m) { margin_ = m; }

    // Throws MarginError if p is outside the box or closer than `margin`
    // to its boundary.
    void check_margin(const Point& p, const char* what) const;
    bool within_margin(const Point& p) const;

    int64_t root_of(const Point& p) const { return root_[box_.index_of(p)]; }
    bool same_cluster(const Point& a, const Point& b) const { return root_of(a) == root_of(b); }
    int64_t cluster_size(const Point& p) const { return size_[root_of(p)]; }

    int64_t giant_root() const { return giant_root_; }
    int64_t giant_size() const { return giant_size_; }
    bool in_giant(const Point& p) const { return root_of(p) == giant_root_; }

    // Vertex has at least one open incident in-box edge.
    bool in_open_set(const Point& p) const;

    // All distinct cluster sizes >= 1, descending.
    std::vector<int64_t> cluster_sizes() const;

private:
    void build(int64_t max_vertices);

    LatticeBox box_;
    OpenPredicate open_;
    std::optional<OpenConfig> config_;
    std::vector<int32_t> root_;   // cube index -> root cube index
    std::vector<int32_t> size_;   // cube index -> component size at roots, else 0
    int64_t giant_root_ = -1;
    int64_t giant_size_ = 0;
    int64_t margin_ = 0;
};

// Union-find over all box vertices, unioned across open in-box edges.
// Single-threaded; the finished index is read-only and shareable.
ClusterIndex build_clusters(const LatticeBox& box, const OpenConfig& config,
                            int64_t max_vertices = kDefaultMaxBoxVertices);

// Same, over an explicit open-edge predicate (hand-built configurations).
ClusterIndex build_clusters_custom(const LatticeBox& box, OpenPredicate open,
                                   int64_t max_vertices = kDefaultMaxBoxVertices);

// [x]: the giant-cluster vertex closest to x in l1 distance, ties broken by
// lexicographic order of the coordinates.
Point anchor(const Point& x, const ClusterIndex& clusters);

}  // namespace percwalk
