#include "percwalk/solver.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <string>

#include "percwalk/sweep_kernel.hpp"

namespace percwalk {

namespace {

constexpr int kMaxDim = 8;
constexpr int32_t kUnset = -1;

// Flat view of the bounding cube of a solve domain: row-major indexing over
// [center - radius, center + radius]^d without Point allocations.
struct Cube {
    int dim = 0;
    int64_t radius = 0, side = 0, n = 0;
    std::array<int64_t, kMaxDim> center{}, stride{};

    Cube(const Point& c, int64_t r) {
        dim = c.dim();
        if (dim > kMaxDim) throw ValidationError("dimension", "supported up to 8");
        radius = r;
        side = 2 * r + 1;
        n = 1;
        for (int i = 0; i < dim; ++i) {
            if (n > (int64_t{1} << 62) / side) throw ResourceError("solver cube overflow");
            n *= side;
            center[i] = c.c[i];
        }
        stride[dim - 1] = 1;
        for (int i = dim - 2; i >= 0; --i) stride[i] = stride[i + 1] * side;
    }

    bool contains(const int64_t* q) const {
        for (int i = 0; i < dim; ++i)
            if (std::abs(q[i] - center[i]) > radius) return false;
        return true;
    }
    int64_t index(const int64_t* q) const {
        int64_t idx = 0;
        for (int i = 0; i < dim; ++i) idx += (q[i] - center[i] + radius) * stride[i];
        return idx;
    }
    void decode(int64_t idx, int64_t* out) const {
        for (int i = dim - 1; i >= 0; --i) {
            out[i] = center[i] - radius + (idx % side);
            idx /= side;
        }
    }
    int64_t l1_to_center(const int64_t* q) const {
        int64_t s = 0;
        for (int i = 0; i < dim; ++i) s += std::abs(q[i] - center[i]);
        return s;
    }
};

// Edge-state functors over raw coordinates. dir is +1/-1 along `axis`; the
// canonical lower endpoint is chosen internally.
struct FieldOpenFn {
    FieldSeed field;
    double p;
    int dim;

    bool operator()(const int64_t* c, int axis, int dir) const {
        if (dir > 0) return is_open_raw(field, dim, c, axis, p);
        int64_t tmp[kMaxDim];
        for (int i = 0; i < dim; ++i) tmp[i] = c[i];
        tmp[axis] -= 1;
        return is_open_raw(field, dim, tmp, axis, p);
    }
};

struct PredOpenFn {
    const OpenPredicate* pred;
    int dim;

    bool operator()(const int64_t* c, int axis, int dir) const {
        Point u(std::vector<int64_t>(c, c + dim));
        Point v = u;
        v.c[axis] += dir;
        return (*pred)(Edge::canonical(u, v));
    }
};

template <class OpenFn>
int degree_at(const OpenFn& open, const int64_t* c, int dim) {
    int deg = 0;
    for (int axis = 0; axis < dim; ++axis) {
        if (open(c, axis, +1)) ++deg;
        if (open(c, axis, -1)) ++deg;
    }
    return deg;
}

// Killed passage system on BFS levels from the target. Unknowns are the
// in-ball vertices with an open in-ball path to the target; the solve runs
// on rescaled variables g(v) = f(v) e^{lambda lev(v)}, which stay in (0, 1],
// so a_value is recovered exactly in log space for any lambda.
struct PassageSystem {
    SweepSystem sweep;
    int64_t source_id = -1;
    int32_t source_level = -1;
    int dim = 0;
};

template <class OpenFn>
PassageSystem build_passage_system(const OpenFn& open, const Point& source, const Point& target,
                                   const Point& ball_center, int64_t ball_radius, double lambda,
                                   int64_t max_vertices, bool exact_cluster) {
    const int d = source.dim();
    Cube cube(ball_center, ball_radius);
    if (cube.n > max_vertices)
        throw ResourceError("solver domain of " + std::to_string(cube.n) +
                            " cube vertices exceeds budget");

    PassageSystem sys;
    sys.dim = d;
    std::vector<int32_t> level(cube.n, kUnset);
    std::vector<int32_t> local(cube.n, kUnset);

    int64_t co[kMaxDim], nb[kMaxDim];

    auto in_domain = [&](const int64_t* q) {
        if (!cube.contains(q)) return false;
        return exact_cluster || cube.l1_to_center(q) <= ball_radius;
    };

    for (int i = 0; i < d; ++i) co[i] = target.c[i];
    if (!in_domain(co)) return sys;

    std::deque<int64_t> queue;
    std::vector<int64_t> order;
    level[cube.index(co)] = 0;
    queue.push_back(cube.index(co));
    order.push_back(cube.index(co));
    while (!queue.empty()) {
        int64_t ui = queue.front();
        queue.pop_front();
        cube.decode(ui, co);
        for (int axis = 0; axis < d; ++axis) {
            for (int dir : {+1, -1}) {
                if (!open(co, axis, dir)) continue;
                for (int i = 0; i < d; ++i) nb[i] = co[i];
                nb[axis] += dir;
                if (!cube.contains(nb)) {
                    if (exact_cluster)
                        throw ValidationError("exact_cluster",
                                              "cluster extends beyond the working cube");
                    continue;
                }
                if (!in_domain(nb)) continue;
                int64_t wi = cube.index(nb);
                if (level[wi] != kUnset) continue;
                level[wi] = level[ui] + 1;
                queue.push_back(wi);
                order.push_back(wi);
            }
        }
    }

    for (int i = 0; i < d; ++i) co[i] = source.c[i];
    if (!cube.contains(co)) return sys;
    const int64_t src_cube = cube.index(co);
    if (level[src_cube] == kUnset) return sys;  // unreachable inside the ball
    sys.source_level = level[src_cube];

    std::vector<int64_t> cube_of;
    cube_of.reserve(order.size() - 1);
    for (int64_t ci : order) {
        if (level[ci] == 0) continue;
        local[ci] = static_cast<int32_t>(cube_of.size());
        cube_of.push_back(ci);
    }
    sys.source_id = local[src_cube];

    const double decay2 = std::exp(-2.0 * lambda);
    SweepSystem& s = sys.sweep;
    s.n = static_cast<int64_t>(cube_of.size());
    s.row_begin.assign(1, 0);
    s.src.assign(s.n, 0.0);
    s.col.reserve(2 * d * s.n);
    s.wgt.reserve(2 * d * s.n);
    bool flags[2 * kMaxDim];
    for (int64_t i = 0; i < s.n; ++i) {
        cube.decode(cube_of[i], co);
        const int32_t lv = level[cube_of[i]];
        int deg = 0;
        for (int axis = 0; axis < d; ++axis) {
            flags[2 * axis] = open(co, axis, +1);
            flags[2 * axis + 1] = open(co, axis, -1);
            deg += flags[2 * axis] + flags[2 * axis + 1];
        }
        const double inv_deg = 1.0 / static_cast<double>(deg);
        for (int axis = 0; axis < d; ++axis) {
            for (int dir : {+1, -1}) {
                if (!flags[2 * axis + (dir < 0)]) continue;
                for (int k = 0; k < d; ++k) nb[k] = co[k];
                nb[axis] += dir;
                if (!in_domain(nb)) continue;  // killed outside the ball: f = 0
                int64_t wi = cube.index(nb);
                if (level[wi] == kUnset) continue;  // no path to target: f = 0
                // rescaled weight e^{-lambda (1 + lev(w) - lev(v))}/deg;
                // the exponent is 0 downhill and 2 uphill (bipartite lattice)
                double weight = (level[wi] < lv ? 1.0 : decay2) * inv_deg;
                if (level[wi] == 0)
                    s.src[i] += weight;  // target pinned at 1
                else {
                    s.col.push_back(local[wi]);
                    s.wgt.push_back(weight);
                }
            }
        }
        s.row_begin.push_back(static_cast<int64_t>(s.col.size()));
    }
    return sys;
}

CostResult run_passage_solve(const PassageSystem& sys, double lambda, const SolveOptions& opts,
                             int64_t ball_radius, int64_t pair_dist, bool killed) {
    CostResult out;
    out.ball_radius = ball_radius;
    out.domain_size = sys.sweep.n > 0 ? sys.sweep.n + 1 : 0;
    out.distance_in_domain = sys.source_level;
    out.truncation_error_bound =
        killed ? std::exp(-lambda *
                          static_cast<double>(std::max<int64_t>(ball_radius - pair_dist, 0)))
               : 0.0;

    if (sys.source_id < 0) {
        out.e_value = 0.0;
        out.a_value = kInf;
        return out;
    }

    const SweepSystem& s = sys.sweep;
    const int64_t lev_s = sys.source_level;

    if (opts.dense) {
        if (s.n > 2000) throw ValidationError("dense", "dense mode limited to 2000 vertices");
        Eigen::MatrixXd A = Eigen::MatrixXd::Identity(s.n, s.n);
        for (int64_t i = 0; i < s.n; ++i)
            for (int64_t e = s.row_begin[i]; e < s.row_begin[i + 1]; ++e)
                A(i, s.col[e]) -= s.wgt[e];
        Eigen::Map<const Eigen::VectorXd> b(s.src.data(), s.n);
        Eigen::VectorXd g = A.partialPivLu().solve(b);
        out.iterations = 1;
        out.residual = (A * g - b).lpNorm<Eigen::Infinity>();
        out.a_value = lambda * static_cast<double>(lev_s) - std::log(g(sys.source_id));
        out.e_value = std::exp(-out.a_value);
        return out;
    }

    const double log2d = std::log(2.0 * sys.dim);
    // Hard cap from the floor e(source) >= (2d e^lambda)^{-lev_s}; the tail
    // of paths longer than k carries mass at most e^{-lambda (k+1)}.
    const int64_t n_max =
        lev_s +
        static_cast<int64_t>(
            std::ceil((static_cast<double>(lev_s) * log2d - std::log(opts.tol)) / lambda)) +
        4;

    std::vector<double> f(s.n, 0.0), f_next(s.n, 0.0);
    int64_t k = 0;
    double res = kInf;
    while (k < n_max) {
        res = sweep_once(s, f, f_next, opts.parallel);
        f.swap(f_next);
        ++k;
        if (res == 0.0) break;
        double gs = f[sys.source_id];
        if (k >= lev_s && gs > 0.0 &&
            lambda * static_cast<double>(k + 1 - lev_s) >= -std::log(opts.tol * gs))
            break;
    }
    out.iterations = k;
    out.residual = res;
    const double gs = f[sys.source_id];
    if (gs <= 0.0) {
        out.e_value = 0.0;
        out.a_value = kInf;
        return out;
    }
    out.a_value = lambda * static_cast<double>(lev_s) - std::log(gs);
    out.e_value = std::exp(-out.a_value);
    return out;
}

// One passage solve with posterior ball growth: enlarge until the truncation
// bound drops below trunc_tol relative to the value (or the cap is hit).
template <class OpenFn>
CostResult solve_with_growth(const OpenFn& open, const Point& source, const Point& target,
                             double lambda, const Point& ball_center, int64_t radius0,
                             int64_t radius_cap, const SolveOptions& opts) {
    const int64_t pair_dist = dist1(source, target);
    int64_t radius = std::max<int64_t>(std::min(radius0, radius_cap), 1);
    CostResult res;
    for (int round = 0; round <= opts.growth_rounds; ++round) {
        PassageSystem sys = build_passage_system(open, source, target, ball_center, radius,
                                                 lambda, opts.max_vertices, false);
        res = run_passage_solve(sys, lambda, opts, radius, pair_dist, true);
        if (!res.reachable()) {
            if (radius >= radius_cap) break;
            radius = std::min(radius_cap, std::max(2 * radius, radius + 8));
            continue;
        }
        // bound met when lambda (R - dist) >= a - log(trunc_tol)
        double needed = (res.a_value - std::log(opts.trunc_tol)) / lambda;
        if (static_cast<double>(radius - pair_dist) >= needed) break;
        int64_t radius_req = pair_dist + static_cast<int64_t>(std::ceil(needed)) + 2;
        radius_req = std::min(radius_req, radius_cap);
        if (radius_req <= radius) break;  // cannot grow further
        radius = radius_req;
    }
    if (res.reachable())
        res.truncation_tol_met = res.truncation_error_bound <= opts.trunc_tol * res.e_value;
    else
        res.truncation_tol_met = res.truncation_error_bound <= opts.trunc_tol;
    return res;
}

Point midpoint(const Point& a, const Point& b) {
    Point m = a;
    for (int i = 0; i < a.dim(); ++i) m.c[i] = (a.c[i] + b.c[i]) / 2;
    return m;
}

CostResult unit_cost_result() {
    CostResult r;
    r.e_value = 1.0;
    r.a_value = 0.0;
    r.truncation_error_bound = 0.0;
    r.distance_in_domain = 0;
    return r;
}

template <class OpenFn>
CostResult travel_cost_impl(const ClusterIndex& clusters, const OpenFn& open, const Point& x,
                            const Point& y, double lambda, const SolveOptions& opts) {
    if (degree_at(open, x.c.data(), x.dim()) == 0)
        throw DisconnectedSourceError("travel_cost: source has no open incident edge");
    if (x == y) return unit_cost_result();

    const int64_t pair_dist = dist1(x, y);
    const Point center = midpoint(x, y);
    // largest l1 ball around the midpoint still inside the box
    const int64_t cap = clusters.box().radius - norm_inf(center - clusters.box().center);

    if (!clusters.same_cluster(x, y)) {
        CostResult out;
        out.ball_radius = cap;
        out.truncation_error_bound =
            std::exp(-lambda * static_cast<double>(std::max<int64_t>(cap - pair_dist, 0)));
        out.truncation_tol_met = out.truncation_error_bound <= opts.trunc_tol;
        return out;
    }

    ChemDistance dchem = chemical_distance(clusters, x, y);
    const double rho = default_rho_hat(lambda, x.dim(), opts);
    // initial radius: the configured multiplier, floored so the in-box
    // geodesic always lies inside the ball
    int64_t radius0 = static_cast<int64_t>(std::ceil(rho * static_cast<double>(pair_dist)));
    if (dchem.finite())
        radius0 = std::max(radius0, (pair_dist + 1) / 2 + dchem.value() + 4);
    return solve_with_growth(open, x, y, lambda, center, radius0, cap, opts);
}

}  // namespace

TransitionRow transition_row(const OpenPredicate& open, const Point& v) {
    TransitionRow row;
    row.vertex = v;
    for (const Point& w : neighbors(v))
        if (open(Edge::canonical(v, w))) row.open_neighbors.push_back(w);
    if (row.open_neighbors.empty())
        throw DisconnectedSourceError("transition_row: vertex has no open incident edge");
    row.weight = 1.0 / static_cast<double>(row.open_neighbors.size());
    return row;
}

double default_rho_hat(double lambda, int dim, const SolveOptions& opts) {
    if (opts.rho_hat > 0.0) return opts.rho_hat;
    double rho = 4.0 * (lambda + std::log(2.0 * dim)) / lambda;
    return std::min(std::max(rho, 3.0), opts.rho_hat_cap);
}

CostResult passage_transform(const SolverDomain& domain, double lambda,
                             const SolveOptions& opts) {
    if (lambda <= 0.0) throw ValidationError("lambda", "must be positive");
    if (!domain.open) throw ValidationError("domain.open", "open predicate required");
    const int d = domain.source.dim();
    const Point center = domain.ball_center.dim() > 0 ? domain.ball_center : domain.source;
    if (domain.kill_outside) {
        if (dist1(domain.source, center) > domain.truncation_radius ||
            dist1(domain.target, center) > domain.truncation_radius)
            throw ValidationError("domain", "source and target must lie inside the ball");
    }
    PredOpenFn open{&domain.open, d};
    if (degree_at(open, domain.source.c.data(), d) == 0)
        throw DisconnectedSourceError("passage_transform: source has no open incident edge");
    if (domain.source == domain.target) return unit_cost_result();

    PassageSystem sys =
        build_passage_system(open, domain.source, domain.target, center,
                             domain.truncation_radius, lambda, opts.max_vertices,
                             !domain.kill_outside);
    return run_passage_solve(sys, lambda, opts, domain.truncation_radius,
                             dist1(domain.source, domain.target), domain.kill_outside);
}

CostResult travel_cost(const ClusterIndex& clusters, const Point& x, const Point& y,
                       double lambda, const SolveOptions& opts) {
    if (lambda <= 0.0) throw ValidationError("lambda", "must be positive");
    clusters.check_margin(x, "travel_cost");
    clusters.check_margin(y, "travel_cost");
    if (clusters.config()) {
        FieldOpenFn open{clusters.config()->field, clusters.config()->p, x.dim()};
        return travel_cost_impl(clusters, open, x, y, lambda, opts);
    }
    PredOpenFn open{&clusters.open(), x.dim()};
    return travel_cost_impl(clusters, open, x, y, lambda, opts);
}

ModifiedCostResult modified_travel_cost_in(const ClusterIndex& clusters_q, const Point& x,
                                           const Point& y, double lambda, double p,
                                           const SolveOptions& opts) {
    if (lambda <= 0.0) throw ValidationError("lambda", "must be positive");
    if (!clusters_q.config())
        throw ValidationError("clusters", "modified cost requires a field-backed cluster index");
    const double q = clusters_q.config()->p;
    if (q > p) throw ValidationError("q", "requires q <= p");

    ModifiedCostResult out;
    out.anchor_x = anchor(x, clusters_q);
    out.anchor_y = anchor(y, clusters_q);
    if (out.anchor_x == out.anchor_y) {
        out.cost = unit_cost_result();
        return out;
    }

    // omega_p is evaluated lazily from the shared field; the q-index
    // supplies the anchors and the box geometry. C_inf(omega_q) is contained
    // in C_inf(omega_p), so the anchors connect once the ball is large enough.
    FieldOpenFn open{clusters_q.config()->field, p, x.dim()};
    const Point center = midpoint(out.anchor_x, out.anchor_y);
    const int64_t pair_dist = dist1(out.anchor_x, out.anchor_y);
    const int64_t cap = clusters_q.box().radius - norm_inf(center - clusters_q.box().center);
    const double rho = default_rho_hat(lambda, x.dim(), opts);
    int64_t radius0 =
        std::max(static_cast<int64_t>(std::ceil(rho * static_cast<double>(pair_dist))),
                 pair_dist + 4);
    out.cost =
        solve_with_growth(open, out.anchor_x, out.anchor_y, lambda, center, radius0, cap, opts);
    return out;
}

ModifiedCostResult modified_travel_cost(const Point& x, const Point& y, double lambda, double p,
                                        double q, FieldSeed field, const SolveOptions& opts) {
    if (q > p) throw ValidationError("q", "requires q <= p");
    const int d = x.dim();
    const int64_t span = norm_inf(x - y);
    const int64_t pair_dist = dist1(x, y);
    const double rho = default_rho_hat(lambda, d, opts);
    const int64_t ball_est =
        static_cast<int64_t>(std::ceil(rho * static_cast<double>(pair_dist + 16))) + 8;
    const int64_t box_radius = std::max(span + 32, ball_est + span / 2 + 2);
    LatticeBox box(midpoint(x, y), box_radius, NormKind::linf);
    ClusterIndex clusters_q = build_clusters(box, OpenConfig{field, q}, opts.max_vertices);
    return modified_travel_cost_in(clusters_q, x, y, lambda, p, opts);
}

BoxExitResult box_exit_cost(const Point& v, int64_t ell, double lambda, const OpenConfig& config,
                            const ExitBall& ball, double r, const SolveOptions& opts) {
    if (ell < 1) throw ValidationError("ell", "must be >= 1");
    if (lambda <= 0.0) throw ValidationError("lambda", "must be positive");
    if (r <= 0.0 || r >= 1.0) throw ValidationError("r", "must lie in (0, 1)");
    const int d = v.dim();

    // central sub-box 2 r ell v + [-r ell, r ell)^d
    const double rl = r * static_cast<double>(ell);
    const double two_rl = 2.0 * rl;
    std::array<int64_t, kMaxDim> lo{}, hi{};
    for (int i = 0; i < d; ++i) {
        double c = two_rl * static_cast<double>(v.c[i]);
        double cr = std::nearbyint(c);
        if (std::abs(c - cr) > 1e-9)
            throw ValidationError("r", "2 r ell v must be integral for the requested site");
        lo[i] = static_cast<int64_t>(std::ceil(cr - rl));
        hi[i] = static_cast<int64_t>(std::ceil(cr + rl)) - 1;
        if (lo[i] > hi[i]) throw ValidationError("r", "central sub-box is empty");
    }
    // sub-box must sit inside the exit ball
    int64_t corner_l1 = 0;
    for (int i = 0; i < d; ++i)
        corner_l1 += std::max(std::abs(lo[i] - ball.center.c[i]),
                              std::abs(hi[i] - ball.center.c[i]));
    if (corner_l1 > ball.radius)
        throw ValidationError("ball", "must contain the central sub-box");

    Cube cube(ball.center, ball.radius);
    if (cube.n > opts.max_vertices)
        throw ResourceError("exit domain of " + std::to_string(cube.n) +
                            " cube vertices exceeds budget");
    FieldOpenFn open{config.field, config.p, d};

    // domain: every in-ball vertex of O (positive degree); a vertex of a
    // cluster trapped inside the ball keeps g = 0 through the iteration,
    // matching T = infinity
    std::vector<int32_t> local(cube.n, kUnset);
    std::vector<int64_t> cube_of;
    int64_t co[kMaxDim], nb[kMaxDim];
    for (int64_t idx = 0; idx < cube.n; ++idx) {
        cube.decode(idx, co);
        if (cube.l1_to_center(co) > ball.radius) continue;
        if (degree_at(open, co, d) == 0) continue;
        local[idx] = static_cast<int32_t>(cube_of.size());
        cube_of.push_back(idx);
    }

    const double decay = std::exp(-lambda);
    SweepSystem s;
    s.n = static_cast<int64_t>(cube_of.size());
    s.row_begin.assign(1, 0);
    s.src.assign(s.n, 0.0);
    bool flags[2 * kMaxDim];
    for (int64_t i = 0; i < s.n; ++i) {
        cube.decode(cube_of[i], co);
        int deg = 0;
        for (int axis = 0; axis < d; ++axis) {
            flags[2 * axis] = open(co, axis, +1);
            flags[2 * axis + 1] = open(co, axis, -1);
            deg += flags[2 * axis] + flags[2 * axis + 1];
        }
        const double w = decay / static_cast<double>(deg);
        for (int axis = 0; axis < d; ++axis) {
            for (int dir : {+1, -1}) {
                if (!flags[2 * axis + (dir < 0)]) continue;
                for (int k = 0; k < d; ++k) nb[k] = co[k];
                nb[axis] += dir;
                if (cube.l1_to_center(nb) > ball.radius) {
                    s.src[i] += w;  // exit reached, g = 1 outside
                } else {
                    s.col.push_back(local[cube.index(nb)]);
                    s.wgt.push_back(w);
                }
            }
        }
        s.row_begin.push_back(static_cast<int64_t>(s.col.size()));
    }

    // iterate from zero: minimal nonnegative solution, contraction e^{-lambda}
    const double log2d = std::log(2.0 * d);
    const double g_floor =
        std::exp(-(lambda + log2d) * static_cast<double>(ball.radius + 1));
    const int64_t n_max =
        static_cast<int64_t>(std::ceil(
            ((lambda + log2d) * static_cast<double>(ball.radius + 1) - std::log(opts.tol)) /
            lambda)) +
        4;
    std::vector<double> g(s.n, 0.0), g_next(s.n, 0.0);
    int64_t k = 0;
    double res = kInf;
    while (k < n_max) {
        res = sweep_once(s, g, g_next, opts.parallel);
        g.swap(g_next);
        ++k;
        if (res == 0.0) break;
        if (res * decay / (1.0 - decay) <= opts.tol * g_floor) break;
    }

    BoxExitResult out;
    out.ball = ball;
    out.domain_size = s.n;
    out.iterations = k;
    out.residual = res;
    // worst open vertex of the central sub-box
    std::array<int64_t, kMaxDim> cur{};
    for (int i = 0; i < d; ++i) cur[i] = lo[i];
    while (true) {
        if (degree_at(open, cur.data(), d) > 0) {
            ++out.open_in_subbox;
            int32_t id = local[cube.index(cur.data())];
            double gv = id >= 0 ? g[id] : 0.0;
            double cost = gv > 0.0 ? -std::log(gv) : kInf;
            out.c = std::min(out.c, cost);
        }
        int axis = d - 1;
        while (axis >= 0 && ++cur[axis] > hi[axis]) {
            cur[axis] = lo[axis];
            --axis;
        }
        if (axis < 0) break;
    }
    return out;
}

OracleInterval brute_force_transform(const OpenPredicate& open, const Point& source,
                                     const Point& target, double lambda, int max_len) {
    if (max_len < 1) throw ValidationError("max_len", "must be >= 1");
    if (source == target) return {1.0, 1.0};

    // source's cluster, small by contract
    std::map<Point, int> id;
    std::vector<Point> verts;
    std::deque<Point> queue;
    id[source] = 0;
    verts.push_back(source);
    queue.push_back(source);
    while (!queue.empty()) {
        Point u = queue.front();
        queue.pop_front();
        for (const Point& w : neighbors(u)) {
            if (!open(Edge::canonical(u, w))) continue;
            if (id.count(w)) continue;
            if (verts.size() >= 64)
                throw ResourceError("brute_force_transform: cluster too large");
            id[w] = static_cast<int>(verts.size());
            verts.push_back(w);
            queue.push_back(w);
        }
    }
    auto it = id.find(target);
    if (it == id.end()) return {0.0, 0.0};  // different cluster: exactly zero
    const int tgt = it->second;
    const int n = static_cast<int>(verts.size());

    std::vector<std::vector<int>> nbrs(n);
    std::vector<long double> inv_deg(n, 0.0L);
    for (int i = 0; i < n; ++i) {
        for (const Point& w : neighbors(verts[i]))
            if (open(Edge::canonical(verts[i], w))) nbrs[i].push_back(id[w]);
        if (!nbrs[i].empty()) inv_deg[i] = 1.0L / static_cast<long double>(nbrs[i].size());
    }

    // forward path-sum: m_n = distribution of walks that have not yet hit
    // the target; mass arriving at the target after n steps is captured with
    // weight e^{-lambda n}
    std::vector<long double> m(n, 0.0L), m_next(n, 0.0L);
    m[0] = 1.0L;
    long double captured = 0.0L;
    for (int step = 1; step <= max_len; ++step) {
        std::fill(m_next.begin(), m_next.end(), 0.0L);
        const long double discount = std::exp(static_cast<long double>(-lambda * step));
        for (int i = 0; i < n; ++i) {
            if (i == tgt || m[i] == 0.0L) continue;
            long double share = m[i] * inv_deg[i];
            for (int w : nbrs[i]) {
                if (w == tgt)
                    captured += share * discount;
                else
                    m_next[w] += share;
            }
        }
        m.swap(m_next);
    }
    double lower = static_cast<double>(captured);
    double upper = lower + std::exp(-lambda * static_cast<double>(max_len));
    return {lower, std::min(upper, 1.0)};
}

OracleInterval brute_force_transform(const OpenConfig& config, const Point& source,
                                     const Point& target, double lambda, int max_len) {
    OpenConfig cfg = config;
    OpenPredicate pred = [cfg](const Edge& e) { return cfg.open(e); };
    return brute_force_transform(pred, source, target, lambda, max_len);
}

}  // namespace percwalk
