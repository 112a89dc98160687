#include "percwalk/asymptotics.hpp"

#include <algorithm>
#include <cmath>

namespace percwalk {

namespace {

int64_t auto_box_radius(const Point& direction, int64_t K, double lambda,
                        const EstimationOptions& opts) {
    if (opts.box_radius > 0) return opts.box_radius;
    const int d = direction.dim();
    const double D = static_cast<double>(K * norm1(direction));
    const double log2d = std::log(2.0 * d);
    // pessimistic ball allowance a <= (lambda + log 2d) * 1.5 D; the
    // posterior growth inside the solver stops far earlier in practice
    double ball = D + (1.5 * D * (lambda + log2d) - std::log(opts.solve.trunc_tol)) / lambda;
    // cap by the vertex budget of the estimation box
    double side_cap = std::pow(static_cast<double>(opts.box_vertex_budget), 1.0 / d);
    double radius_cap = std::max((side_cap - 1.0) / 2.0 - 1.0, 16.0);
    ball = std::min(ball, radius_cap);
    int64_t span_half = K * norm_inf(direction) / 2 + 1;
    int64_t radius = span_half + static_cast<int64_t>(std::ceil(ball)) + 8;
    // anchors must clear the margin (half the radius)
    radius = std::max(radius, 2 * (K * norm_inf(direction) + 8));
    return radius;
}

// Core shared by lyapunov_estimate and continuity_sweep: one q-index per
// replicate seed, reused across every p in the list.
std::vector<LyapunovEstimate> lyapunov_over_ps(const Point& direction, double lambda,
                                               std::vector<double> ps, double q,
                                               FieldSeed master,
                                               const EstimationOptions& opts) {
    if (norm1(direction) == 0) throw ValidationError("direction", "must be nonzero");
    if (lambda <= 0.0) throw ValidationError("lambda", "must be positive");
    if (opts.K < 1) throw ValidationError("K", "must be >= 1");
    if (opts.replicates < 1) throw ValidationError("replicates", "must be >= 1");
    std::sort(ps.begin(), ps.end());
    if (ps.empty()) throw ValidationError("p", "at least one p required");
    if (q > ps.front()) throw ValidationError("q", "requires q <= every p");

    const int d = direction.dim();
    const int64_t K = opts.K;
    const int64_t radius = auto_box_radius(direction, K, lambda, opts);

    Point center = Point::zero(d);
    for (int i = 0; i < d; ++i) center.c[i] = K * direction.c[i] / 2;
    LatticeBox box(center, radius, NormKind::linf);

    struct Cell {
        double a = 0, trunc = 0;
        int64_t iters = 0;
        bool ok = false;
    };
    const size_t np = ps.size();
    std::vector<std::vector<Cell>> cells(opts.replicates);  // [rep][ip * K + (k-1)]
    std::vector<uint64_t> seeds(opts.replicates);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (opts.parallel_replicates)
#endif
    for (int64_t rep = 0; rep < opts.replicates; ++rep) {
        FieldSeed fs = replicate_seed(master, static_cast<uint64_t>(rep));
        seeds[rep] = fs.seed;
        cells[rep].assign(np * K, Cell{});
        ClusterIndex clusters_q =
                build_clusters(box, OpenConfig{fs, q}, opts.solve.max_vertices);
        for (size_t ip = 0; ip < np; ++ip) {
            for (int64_t k = 1; k <= K; ++k) {
                ModifiedCostResult mc = modified_travel_cost_in(
                    clusters_q, Point::zero(d), direction * k, lambda, ps[ip], opts.solve);
                Cell& cell = cells[rep][ip * K + (k - 1)];
                cell.iters = mc.cost.iterations;
                cell.trunc = mc.cost.truncation_error_bound;
                if (mc.cost.reachable()) {
                    cell.a = mc.cost.a_value;
                    cell.ok = true;
                }
            }
        }
    }

    std::vector<LyapunovEstimate> out(np);
    for (size_t ip = 0; ip < np; ++ip) {
        LyapunovEstimate& est = out[ip];
        est.direction = direction;
        est.lambda = lambda;
        est.p = ps[ip];
        est.q = q;
        est.box_radius = radius;
        std::vector<RunningStat> stats(K);
        RunningStat slack_at_K;
        for (int64_t rep = 0; rep < opts.replicates; ++rep) {
            for (int64_t k = 1; k <= K; ++k) {
                const Cell& cell = cells[rep][ip * K + (k - 1)];
                if (!cell.ok) {
                    ++est.failed_records;
                    continue;
                }
                double per_k = cell.a / static_cast<double>(k);
                stats[k - 1].add(per_k);
                LyapunovRecord rec;
                rec.replicate = rep;
                rec.seed = seeds[rep];
                rec.p = ps[ip];
                rec.q = q;
                rec.lambda = lambda;
                rec.k = k;
                rec.cost = cell.a;
                rec.cost_per_k = per_k;
                rec.trunc_bound = cell.trunc;
                rec.iters = cell.iters;
                est.records.push_back(rec);
                if (k == K) {
                    // bound/e in log space; the a-side slack is log1p of it
                    double lr = (cell.trunc > 0 ? std::log(cell.trunc) : -1e300) + cell.a;
                    double slack = lr < -0.7 ? std::log1p(std::exp(lr)) : 1.0;
                    slack_at_K.add(slack / static_cast<double>(K));
                }
            }
        }
        est.per_k.resize(K);
        for (int64_t k = 0; k < K; ++k) est.per_k[k] = stats[k].estimate();
        est.alpha_hat = est.per_k[K - 1].mean;
        est.alpha_stderr = est.per_k[K - 1].stderr_;
        est.alpha_upper = est.per_k[0].mean;
        for (int64_t k = 1; k < K; ++k)
            est.alpha_upper = std::min(est.alpha_upper, est.per_k[k].mean);
        est.alpha_trunc_slack = slack_at_K.n() > 0 ? slack_at_K.mean() : 0.0;
    }
    return out;
}

}  // namespace

LyapunovEstimate lyapunov_estimate(const Point& direction, double lambda, double p, double q,
                                   FieldSeed master, const EstimationOptions& opts) {
    return lyapunov_over_ps(direction, lambda, {p}, q, master, opts).front();
}

std::vector<LyapunovEstimate> continuity_sweep(const Point& direction, double lambda,
                                               std::vector<double> p_list, double q,
                                               FieldSeed master, const EstimationOptions& opts) {
    if (p_list.empty()) throw ValidationError("p_list", "must be nonempty");
    return lyapunov_over_ps(direction, lambda, std::move(p_list), q, master, opts);
}

LambdaPlusMinus lambda_plus_minus(const std::vector<double>& lambda_grid,
                                  const std::vector<double>& alpha_values) {
    if (lambda_grid.size() != alpha_values.size())
        throw ValidationError("curve", "grid/value size mismatch");
    if (lambda_grid.size() < 8)
        throw ValidationError("curve", "needs at least 8 grid points bracketing the maximum");

    LambdaPlusMinus out;
    const size_t n = lambda_grid.size();
    std::vector<double> slope(n, 0.0);
    for (size_t i = 1; i < n; ++i)
        slope[i] = (alpha_values[i] - alpha_values[i - 1]) / (lambda_grid[i] - lambda_grid[i - 1]);

    out.lambda_minus = 0.0;
    bool found_minus = false;
    for (size_t i = 1; i < n; ++i) {
        if (slope[i] <= 1.0) {
            out.lambda_minus = lambda_grid[i];
            found_minus = true;
            break;
        }
    }
    out.lambda_plus = 0.0;
    for (size_t i = 1; i < n; ++i)
        if (slope[i] >= 1.0) out.lambda_plus = lambda_grid[i];

    if (!found_minus) {
        // slope never drops to 1: the maximum of alpha - lambda sits at the
        // grid end, outside resolution
        out.lambda_minus = lambda_grid.back();
        out.status = RateStatus::domain_boundary;
    }
    return out;
}

RateCurve rate_function(const RationalPoint& x, double p, FieldSeed master,
                        const RateOptions& opts) {
    RateCurve curve;
    curve.x = x;
    curve.p = p;
    curve.q = opts.q > 0 ? opts.q : p;

    const RateGridSpec& grid = opts.grid;
    if (grid.points < 8) throw ValidationError("grid.points", "needs >= 8 points");
    std::vector<double> lambdas(grid.points);
    const double ratio = std::pow(grid.lambda_max / grid.lambda_min,
                                  1.0 / static_cast<double>(grid.points - 1));
    for (int i = 0; i < grid.points; ++i)
        lambdas[i] = grid.lambda_min * std::pow(ratio, static_cast<double>(i));
    lambdas.back() = grid.lambda_max;

    if (x.is_zero()) {
        // alpha(0) = 0 identically; the sup over lambda >= 0 of -lambda is 0
        for (double l : lambdas) curve.points.push_back(RatePoint{l, Estimate{0.0, 0.0, 0}, 0.0});
        curve.I_hat = 0.0;
        curve.lambda_star = 0.0;
        curve.lambda_minus = lambdas.front();
        curve.lambda_plus = 0.0;
        return curve;
    }

    const int64_t M = x.minimal_scale();
    const Point xi = x.scaled(M);
    const double scale = static_cast<double>(M);

    auto eval_alpha = [&](double lambda) {
        LyapunovEstimate est = lyapunov_estimate(xi, lambda, p, curve.q, master, opts.estimation);
        RatePoint pt;
        pt.lambda = lambda;
        pt.alpha = Estimate{est.alpha_hat / scale, est.alpha_stderr / scale, est.per_k.back().n};
        pt.trunc_slack = est.alpha_trunc_slack / scale;
        return pt;
    };

    for (double l : lambdas) curve.points.push_back(eval_alpha(l));

    std::vector<double> alpha_vals(grid.points);
    for (int i = 0; i < grid.points; ++i) alpha_vals[i] = curve.points[i].alpha.mean;

    auto h = [&](const RatePoint& pt) { return pt.alpha.mean - pt.lambda; };
    int istar = 0;
    for (int i = 1; i < grid.points; ++i)
        if (h(curve.points[i]) > h(curve.points[istar])) istar = i;

    double best_h = h(curve.points[istar]);
    double best_lambda = lambdas[istar];

    if (istar == grid.points - 1) {
        curve.status = RateStatus::domain_boundary;
    } else {
        // golden-section refinement around the discrete maximizer; the
        // concavity of alpha in lambda makes h unimodal
        double a = lambdas[std::max(istar - 1, 0)];
        double b = lambdas[istar + 1];
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = b - gr * (b - a);
        double dpt = a + gr * (b - a);
        RatePoint pc = eval_alpha(c), pd = eval_alpha(dpt);
        curve.points.push_back(pc);
        curve.points.back().refined = true;
        curve.points.push_back(pd);
        curve.points.back().refined = true;
        for (int round = 0; round < grid.refine_rounds; ++round) {
            if (h(pc) >= h(pd)) {
                b = dpt;
                dpt = c;
                pd = pc;
                c = b - gr * (b - a);
                pc = eval_alpha(c);
                curve.points.push_back(pc);
            } else {
                a = c;
                c = dpt;
                pc = pd;
                dpt = a + gr * (b - a);
                pd = eval_alpha(dpt);
                curve.points.push_back(pd);
            }
            curve.points.back().refined = true;
        }
        for (const RatePoint& pt : curve.points) {
            if (h(pt) > best_h) {
                best_h = h(pt);
                best_lambda = pt.lambda;
            }
        }
    }

    // clamp at the lambda -> 0 boundary: alpha_0 >= 0, so I >= 0 always
    if (best_h < 0.0) {
        curve.I_hat = 0.0;
        curve.lambda_star = 0.0;
    } else {
        curve.I_hat = best_h;
        curve.lambda_star = best_lambda;
    }

    LambdaPlusMinus lpm = lambda_plus_minus(lambdas, alpha_vals);
    curve.lambda_minus = lpm.lambda_minus;
    curve.lambda_plus = lpm.lambda_plus;
    if (lpm.status == RateStatus::domain_boundary) curve.status = RateStatus::domain_boundary;
    return curve;
}

std::vector<RateCurve> rate_continuity_sweep(const RationalPoint& x, std::vector<double> p_list,
                                             FieldSeed master, const RateOptions& opts) {
    if (p_list.empty()) throw ValidationError("p_list", "must be nonempty");
    std::sort(p_list.begin(), p_list.end());
    if (opts.q > 0 && opts.q > p_list.front())
        throw ValidationError("q", "requires q <= every p in the sweep");
    std::vector<RateCurve> out;
    out.reserve(p_list.size());
    for (double p : p_list) {
        RateOptions per = opts;
        if (per.q <= 0) per.q = p_list.front();  // shared anchors across the sweep
        out.push_back(rate_function(x, p, master, per));
    }
    return out;
}

TimeConstantFromCosts time_constant_from_costs(const Point& direction, double p,
                                               std::vector<double> lambda_list, double q,
                                               FieldSeed master, const EstimationOptions& opts) {
    if (lambda_list.empty()) throw ValidationError("lambda_list", "must be nonempty");
    std::sort(lambda_list.begin(), lambda_list.end());
    if (lambda_list.back() < 20.0)
        throw ValidationError("lambda_list", "largest lambda must be >= 20");
    TimeConstantFromCosts out;
    for (double lambda : lambda_list) {
        LyapunovEstimate est = lyapunov_estimate(direction, lambda, p, q, master, opts);
        out.lambdas.push_back(lambda);
        out.ratio.push_back(est.alpha_hat / lambda);
        out.ratio_stderr.push_back(est.alpha_stderr / lambda);
    }
    out.mu_hat = out.ratio.back();
    return out;
}

GoodBoxDensity good_box_density(int64_t ell, double lambda, double epsilon, double p, double r,
                                ExitBall::Mode mode, int64_t replicates, FieldSeed master,
                                const GoodBoxOptions& opts) {
    if (ell < 2) throw ValidationError("ell", "must be >= 2");
    if (epsilon <= 0.0 || epsilon >= 1.0) throw ValidationError("epsilon", "must lie in (0,1)");
    if (replicates < 1) throw ValidationError("replicates", "must be >= 1");

    GoodBoxDensity out;
    out.ell = ell;
    out.lambda = lambda;
    out.epsilon = epsilon;
    out.p = p;
    out.r = r;
    out.mode = mode;

    const int dim = opts.dim;
    int64_t radius;
    if (mode == ExitBall::Mode::alpha_calibrated) {
        double alpha = opts.alpha_hat;
        if (alpha <= 0.0) {
            EstimationOptions cal;
            cal.K = 8;
            cal.replicates = 32;
            cal.solve = opts.solve;
            LyapunovEstimate est = lyapunov_estimate(Point::unit(dim, 0), lambda, p, p,
                                                     derived_stream(master, 0xa1fa), cal);
            alpha = est.alpha_hat;
        }
        out.alpha_hat_used = alpha;
        radius = static_cast<int64_t>(std::ceil(static_cast<double>(ell) / alpha));
    } else {
        radius = ell;
    }
    radius = std::max<int64_t>(radius, static_cast<int64_t>(std::ceil(r * ell)) * dim + 1);
    out.ball_radius = radius;

    const double threshold = static_cast<double>(ell) * (1.0 - epsilon);
    std::vector<GoodBoxRecord> slots(replicates);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (opts.parallel_replicates)
#endif
    for (int64_t rep = 0; rep < replicates; ++rep) {
        FieldSeed fs = replicate_seed(master, static_cast<uint64_t>(rep));
        ExitBall ball{Point::zero(dim), radius, mode};
        BoxExitResult res =
            box_exit_cost(Point::zero(dim), ell, lambda, OpenConfig{fs, p}, ball, r, opts.solve);
        slots[rep] = GoodBoxRecord{rep, fs.seed, res.c, res.c > threshold};
    }

    int64_t good = 0;
    for (int64_t rep = 0; rep < replicates; ++rep) {
        out.records.push_back(slots[rep]);
        if (slots[rep].good) ++good;
    }
    double frac = static_cast<double>(good) / static_cast<double>(replicates);
    out.density.mean = frac;
    out.density.n = replicates;
    out.density.stderr_ = std::sqrt(frac * (1.0 - frac) / static_cast<double>(replicates));
    out.ci = clopper_pearson(good, replicates);
    return out;
}

}  // namespace percwalk
