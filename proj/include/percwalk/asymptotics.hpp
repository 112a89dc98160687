#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "percwalk/solver.hpp"
#include "percwalk/stats.hpp"

namespace percwalk {

// Direction in Q^d: integer numerators over one positive denominator.
// Norm estimates at rational x reduce to integer directions by homogeneity:
// alpha(x) = alpha(M x)/M with the minimal integer M making M x integral.
struct RationalPoint {
    Point num;
    int64_t den = 1;

    static RationalPoint integer(Point p) { return RationalPoint{std::move(p), 1}; }

    int dim() const { return num.dim(); }
    bool is_zero() const { return norm1(num) == 0; }
    double norm1_real() const {
        return static_cast<double>(norm1(num)) / static_cast<double>(den);
    }

    int64_t minimal_scale() const {
        int64_t g = den;
        for (int64_t v : num.c) g = std::gcd(g, std::abs(v));
        return den / std::gcd(den, g == 0 ? den : g);
    }
    Point scaled(int64_t m) const {
        Point p = num;
        for (auto& v : p.c) v = v * m / den;
        return p;
    }
};

struct EstimationOptions {
    int64_t K = 24;
    int64_t replicates = 200;
    int64_t box_radius = 0;           // 0 = auto from K, direction and lambda
    int64_t box_vertex_budget = int64_t{1} << 20;  // auto box sizing cap
    SolveOptions solve = default_estimation_solve();
    bool parallel_replicates = true;

    static SolveOptions default_estimation_solve() {
        SolveOptions s;
        s.tol = 1e-8;
        s.trunc_tol = 1e-2;  // truncation slack is propagated into tolerances
        return s;
    }
};

struct LyapunovRecord {
    int64_t replicate = 0;
    uint64_t seed = 0;
    double p = 0, q = 0, lambda = 0;
    int64_t k = 0;
    double cost = 0, cost_per_k = 0, trunc_bound = 0;
    int64_t iters = 0;
};

struct LyapunovEstimate {
    Point direction;
    double lambda = 0, p = 0, q = 0;
    std::vector<Estimate> per_k;     // of a^q(0, kx)/k, index k-1
    double alpha_hat = 0;            // per-k mean at k = K
    double alpha_upper = 0;          // min over k of per-k means (subadditive upper bound)
    double alpha_stderr = 0;         // stderr at k = K
    double alpha_trunc_slack = 0;    // mean log1p(bound/e)/K at k = K: possible overstatement
    int64_t box_radius = 0;
    int64_t failed_records = 0;      // anchor pairs unreachable within the capped ball
    std::vector<LyapunovRecord> records;
};

// alpha^p_lambda along an integer direction via the anchored subadditive
// process: per replicate seed, a^q_lambda(0, kx, omega_p)/k for k = 1..K.
LyapunovEstimate lyapunov_estimate(const Point& direction, double lambda, double p, double q,
                                   FieldSeed master, const EstimationOptions& opts = {});

// Shared-seed sweep: identical replicate seeds and q-anchors across all
// entries of p_list; output sorted by p ascending.
std::vector<LyapunovEstimate> continuity_sweep(const Point& direction, double lambda,
                                               std::vector<double> p_list, double q,
                                               FieldSeed master,
                                               const EstimationOptions& opts = {});

enum class RateStatus { ok, domain_boundary };

struct RateGridSpec {
    double lambda_min = 0.05;
    double lambda_max = 8.0;
    int points = 16;          // geometric grid
    int refine_rounds = 3;    // golden-section refinement around the maximum
};

struct RatePoint {
    double lambda = 0;
    Estimate alpha;        // of alpha(x) at this lambda (scaled to x)
    double trunc_slack = 0;
    bool refined = false;  // golden-section evaluation, not a base grid point
};

struct RateCurve {
    RationalPoint x;
    double p = 0, q = 0;
    std::vector<RatePoint> points;   // base grid first (ascending), then refined
    double I_hat = 0;
    double lambda_star = 0;          // argmax of alpha - lambda (0 = boundary at lambda -> 0)
    double lambda_minus = 0, lambda_plus = 0;
    RateStatus status = RateStatus::ok;
};

struct RateOptions {
    double q = 0;  // 0 = anchor at p itself
    RateGridSpec grid;
    EstimationOptions estimation = default_estimation();

    static EstimationOptions default_estimation() {
        EstimationOptions e;
        e.K = 10;
        e.replicates = 80;
        return e;
    }
};

// I^p(x) = sup_{lambda >= 0} (alpha_lambda(x) - lambda), evaluated on the
// geometric grid and refined by golden section around the concave maximum.
// The sup is clamped at 0, the certain lower bound from the lambda -> 0
// boundary (alpha_0 >= 0).
RateCurve rate_function(const RationalPoint& x, double p, FieldSeed master,
                        const RateOptions& opts = {});

// Left-difference slopes on the base grid: lambda_minus = first grid lambda
// with slope <= 1, lambda_plus = last grid lambda with slope >= 1 (0 when
// the slope never reaches 1). DomainBoundary when the maximum sits at the
// grid end.
struct LambdaPlusMinus {
    double lambda_minus = 0, lambda_plus = 0;
    RateStatus status = RateStatus::ok;
};
LambdaPlusMinus lambda_plus_minus(const std::vector<double>& lambda_grid,
                                  const std::vector<double>& alpha_values);

// Sweep of the rate function across p with shared seeds; DomainBoundary
// entries are flagged rows, not failures.
std::vector<RateCurve> rate_continuity_sweep(const RationalPoint& x, std::vector<double> p_list,
                                             FieldSeed master, const RateOptions& opts = {});

struct TimeConstantFromCosts {
    std::vector<double> lambdas;
    std::vector<double> ratio;        // alpha_hat(lambda)/lambda
    std::vector<double> ratio_stderr;
    double mu_hat = 0;                // ratio at the largest lambda
};

// mu via the normalized large-lambda limit of the Lyapunov exponent:
// alpha_lambda(x)/lambda, nonincreasing in lambda, evaluated on lambda_list.
TimeConstantFromCosts time_constant_from_costs(const Point& direction, double p,
                                               std::vector<double> lambda_list, double q,
                                               FieldSeed master,
                                               const EstimationOptions& opts = {});

struct GoodBoxRecord {
    int64_t replicate = 0;
    uint64_t seed = 0;
    double c = 0;
    bool good = false;
};

struct GoodBoxDensity {
    int64_t ell = 0;
    double lambda = 0, epsilon = 0, p = 0, r = 0;
    ExitBall::Mode mode = ExitBall::Mode::plain_l1;
    int64_t ball_radius = 0;
    double alpha_hat_used = 0;  // mode (a) calibration value
    Estimate density;
    BinomialCI ci;
    std::vector<GoodBoxRecord> records;
};

struct GoodBoxOptions {
    int dim = 2;
    double alpha_hat = 0;  // mode (a): 0 = calibrate internally
    SolveOptions solve;
    bool parallel_replicates = true;
};

// Monte Carlo density of (ell, p)-good sites: P(c(0, ell, omega_p) > ell (1 - epsilon)).
GoodBoxDensity good_box_density(int64_t ell, double lambda, double epsilon, double p, double r,
                                ExitBall::Mode mode, int64_t replicates, FieldSeed master,
                                const GoodBoxOptions& opts = {});

}  // namespace percwalk
