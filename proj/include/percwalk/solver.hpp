#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "percwalk/clusters.hpp"
#include "percwalk/field.hpp"
#include "percwalk/graph_metrics.hpp"

namespace percwalk {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Value of the exponential travel transform plus solve diagnostics.
// a_value = -log(e_value), computed in log space so it stays exact when
// e_value underflows; +inf (with e_value = 0) marks an unreachable target.
struct CostResult {
    double e_value = 0.0;
    double a_value = kInf;
    double truncation_error_bound = 0.0;
    int64_t iterations = 0;
    double residual = 0.0;

    // diagnostics
    int64_t ball_radius = 0;
    int64_t domain_size = 0;
    int64_t distance_in_domain = -1;  // shortest open path source->target inside the ball
    bool truncation_tol_met = true;

    bool reachable() const { return std::isfinite(a_value); }
};

// One row of the walk's transition kernel at a vertex of O.
struct TransitionRow {
    Point vertex;
    std::vector<Point> open_neighbors;
    double weight = 0.0;  // 1/degree, in [1/(2d), 1]
};

TransitionRow transition_row(const OpenPredicate& open, const Point& v);

struct SolveOptions {
    double tol = 1e-10;       // relative accuracy of e at the source
    double trunc_tol = 1e-6;  // target for truncation bound relative to e
    double rho_hat = 0.0;     // truncation multiplier; 0 = default below
    double rho_hat_cap = 12.0;
    int growth_rounds = 3;    // ball enlargements when the bound is not met
    int64_t max_vertices = kDefaultMaxBoxVertices;
    bool parallel = false;    // OpenMP sweeps inside the solve
    bool dense = false;       // dense LU cross-check mode (<= 2000 vertices)
};

// Default truncation multiplier: 4(lambda + log 2d)/lambda, floored at 3 and
// capped (the uncapped value diverges as lambda -> 0; the posterior bound
// check in travel_cost takes over there).
double default_rho_hat(double lambda, int dim, const SolveOptions& opts);

// Exit region for the box-exit cost.
struct ExitBall {
    enum class Mode { alpha_calibrated, plain_l1 };
    Point center;
    int64_t radius = 0;
    Mode mode = Mode::plain_l1;
};

// Killed-harmonic domain for one passage solve.
struct SolverDomain {
    const ClusterIndex* clusters = nullptr;  // margin context; may be null for lazy solves
    OpenPredicate open;
    Point source;
    Point target;
    Point ball_center;          // defaults to source if empty
    int64_t truncation_radius = 0;
    bool kill_outside = true;   // false: solve the source's whole finite cluster exactly
};

// Minimal nonnegative solution f of  f(target) = 1,
// f(v) = e^{-lambda} sum_w pi(v,w) f(w)  on the open subgraph inside the
// truncation ball, f = 0 outside; returns f(source). The killed value is a
// lower bound for e_lambda on the full configuration and the reported
// truncation_error_bound = exp(-lambda (R - |source-target|_1)) bounds the
// discarded mass.
CostResult passage_transform(const SolverDomain& domain, double lambda,
                             const SolveOptions& opts = {});

// a_lambda(x, y): builds a ball around the pair (radius
// max(rho_hat * |x-y|_1, auto) and grown until the truncation bound is below
// trunc_tol relative to the result), then runs passage_transform.
CostResult travel_cost(const ClusterIndex& clusters, const Point& x, const Point& y,
                       double lambda, const SolveOptions& opts = {});

// a^q_lambda(x, y, omega_p): anchors x and y to the giant cluster of
// omega_q and evaluates the travel cost between the anchors in omega_p.
struct ModifiedCostResult {
    CostResult cost;
    Point anchor_x, anchor_y;
};
ModifiedCostResult modified_travel_cost(const Point& x, const Point& y, double lambda, double p,
                                        double q, FieldSeed field, const SolveOptions& opts = {});

// Same, reusing a prebuilt cluster index at q (its box provides the margin
// context; the omega_p configuration is evaluated lazily from the field).
ModifiedCostResult modified_travel_cost_in(const ClusterIndex& clusters_q, const Point& x,
                                           const Point& y, double lambda, double p,
                                           const SolveOptions& opts = {});

// Box-exit cost c(v, l): the worst -log E^x[e^{-lambda T}] over open
// vertices x of the central sub-box, T the exit time of the ball.
struct BoxExitResult {
    double c = kInf;  // +inf when the sub-box meets no open vertex
    int64_t open_in_subbox = 0;
    int64_t domain_size = 0;
    int64_t iterations = 0;
    double residual = 0.0;
    ExitBall ball;
};
BoxExitResult box_exit_cost(const Point& v, int64_t ell, double lambda, const OpenConfig& config,
                            const ExitBall& ball, double r, const SolveOptions& opts = {});

// Independent oracle: forward path-sum of the walk distribution up to
// max_len steps. The true e_lambda lies in [lower, upper].
struct OracleInterval {
    double lower = 0.0;
    double upper = 0.0;
};
OracleInterval brute_force_transform(const OpenPredicate& open, const Point& source,
                                     const Point& target, double lambda, int max_len);
OracleInterval brute_force_transform(const OpenConfig& config, const Point& source,
                                     const Point& target, double lambda, int max_len);

}  // namespace percwalk
