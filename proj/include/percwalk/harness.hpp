#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "percwalk/asymptotics.hpp"
#include "percwalk/graph_metrics.hpp"

namespace percwalk {

inline constexpr const char* kToolVersion = "0.1.0";

enum class ExperimentKind { cost, lyapunov, rate, sweep, rate_sweep, timeconst, goodbox, selftest };

const char* kind_name(ExperimentKind kind);
ExperimentKind kind_from_name(const std::string& name);  // throws ValidationError

// Full description of one experiment run. Every key has a default except
// `seed` and `kind`.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::selftest;
    int dimension = 2;
    std::vector<double> p_list = {0.75};
    double q = 0;  // 0 = kind default: p for single-p kinds, min(p) - 0.03 for sweeps
    std::vector<double> lambdas = {1.0};
    RateGridSpec grid;
    RationalPoint x;  // defaults to the first coordinate vector
    int64_t K = 24;
    int64_t replicates = 200;
    int64_t box_radius = 0;
    double rho_hat = 0;
    double r = 0.125;
    double tol = 1e-10;
    double trunc_tol = 1e-2;
    int64_t ell = 8;
    double epsilon = 0.3;
    std::string ball_mode = "alpha";  // "alpha" | "l1"
    double p_c_d2 = 0.5;    // literature values; used for input validation only
    double p_c_d3 = 0.2488;
    double p_c_override = -1;  // required for dimensions other than 2 and 3
    uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir = "percwalk-out";
    int threads = 0;  // 0 = runtime default; PERCWALK_THREADS overrides

    double p_c() const;
    double effective_q() const;
    void validate() const;  // throws ValidationError naming the offending field
};

struct ResultManifest {
    std::string kind;
    std::string csv_path;
    std::string manifest_path;
    int64_t records = 0;
    double wall_seconds = 0;
};

// Dispatches to the configured experiment, writing results.csv and
// manifest.json under config.out_dir. Deterministic: identical config and
// seed reproduce the CSV byte for byte.
ResultManifest run(const ExperimentConfig& config);

// Prints a per-group summary table of a results directory to `os`.
// Refuses directories whose CSV does not match the manifest's kind.
void emit_report(const std::string& results_dir, std::ostream& os);

// Quick oracle-equivalence suite (dense solve, path-sum oracle, closed
// forms). Prints one line per check; returns false on any failure.
bool selftest(std::ostream& os);

// 17-significant-digit, locale-independent formatting used for all CSV numerics.
std::string format_double(double v);
std::string csv_field(const std::string& raw);  // RFC-4180-style quoting

}  // namespace percwalk
