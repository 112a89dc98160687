#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <set>
#include <vector>

#include "percwalk/errors.hpp"

namespace percwalk {

enum class NormKind { l1, linf };

// Lattice point in Z^d. The dimension is carried by the coordinate vector;
// all operations check that operands agree.
struct Point {
    std::vector<int64_t> c;

    Point() = default;
    explicit Point(std::vector<int64_t> coords) : c(std::move(coords)) {}
    static Point zero(int d) { return Point(std::vector<int64_t>(d, 0)); }
    static Point unit(int d, int axis) {
        Point p = zero(d);
        p.c[axis] = 1;
        return p;
    }

    int dim() const { return static_cast<int>(c.size()); }

    bool operator==(const Point& o) const { return c == o.c; }
    bool operator!=(const Point& o) const { return c != o.c; }
    // Lexicographic order on coordinates; the deterministic tie-break rule.
    bool operator<(const Point& o) const { return c < o.c; }

    Point operator+(const Point& o) const {
        Point r = *this;
        for (int i = 0; i < dim(); ++i) r.c[i] += o.c[i];
        return r;
    }
    Point operator-(const Point& o) const {
        Point r = *this;
        for (int i = 0; i < dim(); ++i) r.c[i] -= o.c[i];
        return r;
    }
    Point operator*(int64_t k) const {
        Point r = *this;
        for (auto& v : r.c) v *= k;
        return r;
    }
};

inline int64_t norm(const Point& x, NormKind kind) {
    int64_t n = 0;
    for (int64_t v : x.c) {
        int64_t a = v < 0 ? -v : v;
        if (kind == NormKind::l1)
            n += a;
        else
            n = std::max(n, a);
    }
    return n;
}

inline int64_t norm1(const Point& x) { return norm(x, NormKind::l1); }
inline int64_t norm_inf(const Point& x) { return norm(x, NormKind::linf); }
inline int64_t dist1(const Point& x, const Point& y) { return norm1(x - y); }

// The 2d nearest neighbors, ordered +/- per coordinate axis.
inline std::vector<Point> neighbors(const Point& x) {
    std::vector<Point> out;
    out.reserve(2 * x.dim());
    for (int axis = 0; axis < x.dim(); ++axis) {
        Point p = x;
        p.c[axis] += 1;
        out.push_back(p);
        p.c[axis] -= 2;
        out.push_back(p);
    }
    return out;
}

// Nearest-neighbor edge stored with the lexicographically smaller endpoint
// first, so (seed, edge) hashing is unambiguous.
struct Edge {
    Point a, b;

    static Edge canonical(const Point& u, const Point& v) {
        if (dist1(u, v) != 1) throw ValidationError("edge", "endpoints are not nearest neighbors");
        return (u < v) ? Edge{u, v} : Edge{v, u};
    }

    // The single axis along which the endpoints differ.
    int axis() const {
        for (int i = 0; i < a.dim(); ++i)
            if (a.c[i] != b.c[i]) return i;
        return -1;
    }

    bool operator==(const Edge& o) const { return a == o.a && b == o.b; }
};

// Orbit of x under coordinate permutations and sign flips (the symmetry
// group of the lattice). Members are returned sorted.
inline std::vector<Point> symmetry_orbit(const Point& x) {
    const int d = x.dim();
    if (d > 6) throw ResourceError("symmetry_orbit: dimension too large");
    std::vector<int64_t> perm = x.c;
    std::sort(perm.begin(), perm.end());
    std::set<Point> orbit;
    do {
        // all sign assignments on the entries (flips of zero coincide)
        const int patterns = 1 << d;
        for (int mask = 0; mask < patterns; ++mask) {
            std::vector<int64_t> v(perm);
            for (int i = 0; i < d; ++i)
                if (mask & (1 << i)) v[i] = -v[i];
            orbit.insert(Point(v));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {orbit.begin(), orbit.end()};
}

// An axis-aligned finite region of Z^d: the ball of `radius` around `center`
// in the l1 or linf norm. Simulation boxes are linf (cubes); solver
// truncation balls are l1.
struct LatticeBox {
    Point center;
    int64_t radius = 0;
    NormKind norm_kind = NormKind::linf;

    LatticeBox() = default;
    LatticeBox(Point c, int64_t r, NormKind k) : center(std::move(c)), radius(r), norm_kind(k) {
        if (radius <= 0) throw ValidationError("box.radius", "must be positive");
        // guard index arithmetic: coordinates and side lengths stay well below 2^62
        for (int64_t v : center.c) {
            if (std::abs(v) > (int64_t{1} << 40) || radius > (int64_t{1} << 40))
                throw ValidationError("box", "coordinate magnitude overflow");
        }
    }

    int dim() const { return center.dim(); }
    int64_t side() const { return 2 * radius + 1; }

    bool contains(const Point& p) const { return norm(p - center, norm_kind) <= radius; }

    // Number of lattice points of the bounding cube.
    int64_t cube_vertex_count() const {
        int64_t n = 1;
        for (int i = 0; i < dim(); ++i) {
            if (n > (int64_t{1} << 62) / side()) throw ResourceError("box vertex count overflow");
            n *= side();
        }
        return n;
    }

    // Row-major index over the bounding cube, which is lexicographic in the
    // coordinates. Callers must pass a point of the cube.
    int64_t index_of(const Point& p) const {
        int64_t idx = 0;
        for (int i = 0; i < dim(); ++i) {
            int64_t off = p.c[i] - center.c[i] + radius;
            idx = idx * side() + off;
        }
        return idx;
    }

    Point point_of(int64_t idx) const {
        Point p = center;
        for (int i = dim() - 1; i >= 0; --i) {
            p.c[i] = center.c[i] - radius + (idx % side());
            idx /= side();
        }
        return p;
    }
};

// Enumerates lattice offsets with l1 norm exactly r in lexicographic order,
// calling fn(offset). Used by the anchor ring search: x + offsets are then
// visited in lexicographic order of the absolute coordinates.
inline void for_each_l1_ring(int d, int64_t r, const std::function<void(const Point&)>& fn) {
    std::vector<int64_t> off(d, 0);
    // recursive lexicographic enumeration of delta_1,...,delta_d with sum |delta_i| = r
    std::function<void(int, int64_t)> rec = [&](int i, int64_t budget) {
        if (i == d - 1) {
            for (int64_t last : {-budget, budget}) {
                off[i] = last;
                fn(Point(off));
                if (budget == 0) break;
            }
            return;
        }
        for (int64_t v = -budget; v <= budget; ++v) {
            off[i] = v;
            rec(i + 1, budget - std::abs(v));
        }
    };
    rec(0, r);
}

}  // namespace percwalk
