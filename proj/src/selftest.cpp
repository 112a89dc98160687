#include <cmath>
#include <ostream>

#include "percwalk/harness.hpp"
#include "percwalk/oracles.hpp"
#include "percwalk/solver.hpp"

namespace percwalk {

namespace {

bool check(std::ostream& os, const char* name, bool ok, const std::string& detail = "") {
    os << (ok ? "[ok]   " : "[FAIL] ") << name;
    if (!detail.empty()) os << "  " << detail;
    os << "\n";
    return ok;
}

OpenPredicate full_line_p1() {
    return [](const Edge&) { return true; };
}

}  // namespace

bool selftest(std::ostream& os) {
    bool all = true;

    // closed form on the line: e(0, n) = phi(lambda)^n
    {
        double worst = 0.0;
        for (double lambda : {0.5, 1.0, 2.0}) {
            for (int64_t n : {1, 2, 5, 10}) {
                SolverDomain dom;
                dom.open = full_line_p1();
                dom.source = Point::zero(1);
                dom.target = Point({std::vector<int64_t>{n}});
                dom.truncation_radius = 64;
                SolveOptions opts;
                opts.tol = 1e-12;
                CostResult res = passage_transform(dom, lambda, opts);
                double expect = std::pow(line_passage_factor(lambda), static_cast<double>(n));
                worst = std::max(worst, std::abs(res.e_value - expect) / expect);
            }
        }
        all &= check(os, "line passage closed form", worst < 1e-8,
                     "max rel err " + format_double(worst));
    }

    // closed form for the line exit transform
    {
        double worst = 0.0;
        for (double lambda : {0.7, 1.3}) {
            for (int64_t ell : {4, 6, 10}) {
                ExitBall ball{Point::zero(1), ell, ExitBall::Mode::plain_l1};
                BoxExitResult res = box_exit_cost(Point::zero(1), ell, lambda,
                                                  OpenConfig{FieldSeed{1}, 1.0}, ball, 0.1);
                double expect = -std::log(line_exit_transform(lambda, ell));
                worst = std::max(worst, std::abs(res.c - expect));
            }
        }
        all &= check(os, "line exit closed form", worst < 1e-10,
                     "max abs err " + format_double(worst));
    }

    // iterative vs dense vs path-sum oracle on small clusters
    {
        int tried = 0, used = 0;
        double worst_dense = 0.0;
        bool interval_ok = true;
        uint64_t seed = 0x5e1f;
        while (used < 30 && tried < 4000) {
            ++tried;
            double p = 0.30 + 0.05 * static_cast<double>(tried % 4);
            auto sample = sample_small_cluster(mix64(seed + tried), p, 2, 12);
            if (!sample) continue;
            ++used;
            double lambda = 0.25 + 0.35 * edge_uniform(FieldSeed{seed + tried},
                                                       Edge::canonical(Point::zero(2),
                                                                       Point::unit(2, 0)));
            SolverDomain dom;
            OpenConfig cfg = sample->config;
            dom.open = [cfg](const Edge& e) { return cfg.open(e); };
            dom.source = sample->source;
            dom.target = sample->target;
            dom.ball_center = sample->source;
            dom.truncation_radius = 40;
            dom.kill_outside = false;

            SolveOptions iter_opts;
            iter_opts.tol = 1e-13;
            CostResult it = passage_transform(dom, lambda, iter_opts);
            SolveOptions dense_opts;
            dense_opts.dense = true;
            CostResult de = passage_transform(dom, lambda, dense_opts);
            worst_dense = std::max(worst_dense, std::abs(it.e_value - de.e_value));

            OracleInterval iv = brute_force_transform(dom.open, sample->source, sample->target,
                                                      lambda, 40);
            if (!(it.e_value >= iv.lower - 1e-13 && it.e_value <= iv.upper + 1e-13))
                interval_ok = false;
        }
        all &= check(os, "small-cluster dense agreement", used == 30 && worst_dense < 1e-10,
                     "clusters " + std::to_string(used) + ", max |diff| " +
                         format_double(worst_dense));
        all &= check(os, "small-cluster path-sum interval", interval_ok);
    }

    return all;
}

}  // namespace percwalk
