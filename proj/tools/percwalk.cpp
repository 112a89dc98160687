#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "percwalk/harness.hpp"

namespace {

using percwalk::ExperimentConfig;
using percwalk::ExperimentKind;
using percwalk::RationalPoint;

// Direction syntax: comma-separated rationals, e.g. "1,0", "3/2,-1", "0.5,0".
RationalPoint parse_direction(const std::string& text) {
    std::vector<int64_t> nums;
    std::vector<int64_t> dens;
    std::string token;
    std::stringstream ss(text);
    while (std::getline(ss, token, ',')) {
        if (token.empty()) throw percwalk::ValidationError("x", "empty component in '" + text + "'");
        int64_t num = 0, den = 1;
        size_t slash = token.find('/');
        size_t dot = token.find('.');
        try {
            if (slash != std::string::npos) {
                num = std::stoll(token.substr(0, slash));
                den = std::stoll(token.substr(slash + 1));
                if (den <= 0) throw percwalk::ValidationError("x", "denominator must be positive");
            } else if (dot != std::string::npos) {
                std::string frac = token.substr(dot + 1);
                if (frac.size() > 9) throw percwalk::ValidationError("x", "too many decimals");
                num = std::stoll(token.substr(0, dot) + frac);
                den = 1;
                for (size_t i = 0; i < frac.size(); ++i) den *= 10;
                if (!token.empty() && token[0] == '-' && token.substr(0, dot) == "-0")
                    num = -std::stoll(frac);
            } else {
                num = std::stoll(token);
            }
        } catch (const percwalk::ValidationError&) {
            throw;
        } catch (const std::exception&) {
            throw percwalk::ValidationError("x", "cannot parse component '" + token + "'");
        }
        nums.push_back(num);
        dens.push_back(den);
    }
    if (nums.empty()) throw percwalk::ValidationError("x", "no components in '" + text + "'");
    int64_t common = 1;
    for (int64_t d : dens) common = std::lcm(common, d);
    for (size_t i = 0; i < nums.size(); ++i) nums[i] *= common / dens[i];
    int64_t g = common;
    for (int64_t n : nums) g = std::gcd(g, std::abs(n));
    if (g > 1) {
        for (auto& n : nums) n /= g;
        common /= g;
    }
    return RationalPoint{percwalk::Point(nums), common};
}

void add_common_options(CLI::App* cmd, ExperimentConfig& cfg, std::string& x_text) {
    cmd->add_option("--seed", cfg.seed, "master seed (required)")
        ->required()
        ->each([&cfg](const std::string&) { cfg.seed_set = true; });
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--threads", cfg.threads, "worker threads (PERCWALK_THREADS overrides)");
    cmd->add_option("--dimension,-d", cfg.dimension, "lattice dimension");
    cmd->add_option("--p", cfg.p_list, "retention probability (repeat for sweeps)");
    cmd->add_option("--q", cfg.q, "anchor retention parameter (default: kind-specific)");
    cmd->add_option("--lambda", cfg.lambdas, "discount rate(s)");
    cmd->add_option("--x", x_text, "direction, e.g. '1,0' or '1/2,0'");
    cmd->add_option("--K", cfg.K, "largest multiple along the direction");
    cmd->add_option("--replicates", cfg.replicates, "Monte Carlo replicates");
    cmd->add_option("--box-radius", cfg.box_radius, "simulation box radius (0 = auto)");
    cmd->add_option("--rho-hat", cfg.rho_hat, "truncation multiplier (0 = default)");
    cmd->add_option("--r", cfg.r, "central sub-box scale for box-exit costs");
    cmd->add_option("--tol", cfg.tol, "solver tolerance");
    cmd->add_option("--trunc-tol", cfg.trunc_tol, "relative truncation-bound target");
    cmd->add_option("--ell", cfg.ell, "box-exit scale");
    cmd->add_option("--epsilon", cfg.epsilon, "good-site threshold parameter");
    cmd->add_option("--ball-mode", cfg.ball_mode, "exit ball mode: alpha | l1");
    cmd->add_option("--p-c", cfg.p_c_override, "critical probability override");
    cmd->add_option("--grid-min", cfg.grid.lambda_min, "rate grid smallest lambda");
    cmd->add_option("--grid-max", cfg.grid.lambda_max, "rate grid largest lambda");
    cmd->add_option("--grid-points", cfg.grid.points, "rate grid size");
    cmd->add_option("--grid-refine", cfg.grid.refine_rounds, "golden-section rounds");
    cmd->set_config("--config", "", "read options from a key = value file");
}

int run_kind(ExperimentKind kind, ExperimentConfig cfg, const std::string& x_text) {
    cfg.kind = kind;
    if (!x_text.empty())
        cfg.x = parse_direction(x_text);
    else if (cfg.kind != ExperimentKind::selftest)
        cfg.x = RationalPoint::integer(percwalk::Point::unit(cfg.dimension, 0));
    percwalk::ResultManifest manifest = percwalk::run(cfg);
    if (kind != ExperimentKind::selftest)
        std::cout << manifest.kind << ": " << manifest.records << " records -> "
                  << manifest.csv_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"percwalk: travel costs, Lyapunov exponents and rate functions of the "
                 "random walk on supercritical percolation clusters"};
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", percwalk::kToolVersion);

    bool selftest_flag = false;
    app.add_flag("--selftest", selftest_flag, "run the oracle-equivalence suite and exit");

    struct Sub {
        ExperimentKind kind;
        ExperimentConfig cfg;
        std::string x_text;
        CLI::App* cmd = nullptr;
    };
    std::vector<Sub> subs;
    for (ExperimentKind kind :
         {ExperimentKind::cost, ExperimentKind::lyapunov, ExperimentKind::rate,
          ExperimentKind::sweep, ExperimentKind::rate_sweep, ExperimentKind::timeconst,
          ExperimentKind::goodbox}) {
        subs.push_back(Sub{kind, {}, "", nullptr});
    }
    for (auto& sub : subs) {
        sub.cmd = app.add_subcommand(percwalk::kind_name(sub.kind),
                                     std::string("run the ") + percwalk::kind_name(sub.kind) +
                                         " experiment");
        add_common_options(sub.cmd, sub.cfg, sub.x_text);
    }

    CLI::App* selftest_cmd = app.add_subcommand("selftest", "run the oracle-equivalence suite");
    CLI::App* report_cmd = app.add_subcommand("report", "summarize a results directory");
    std::string report_dir;
    report_cmd->add_option("dir", report_dir, "results directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(percwalk::ExitCode::validation);
    }

    try {
        if (selftest_flag || selftest_cmd->parsed())
            return percwalk::selftest(std::cout) ? 0
                                                 : static_cast<int>(percwalk::ExitCode::validation);
        if (report_cmd->parsed()) {
            percwalk::emit_report(report_dir, std::cout);
            return 0;
        }
        for (auto& sub : subs)
            if (sub.cmd->parsed()) return run_kind(sub.kind, sub.cfg, sub.x_text);
        std::cout << app.help() << "\n";
        return 0;
    } catch (const percwalk::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return static_cast<int>(percwalk::ExitCode::validation);
    } catch (const percwalk::ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return static_cast<int>(percwalk::ExitCode::resource);
    } catch (const percwalk::MarginError& e) {
        std::cerr << "margin error: " << e.what() << "\n";
        return static_cast<int>(percwalk::ExitCode::margin);
    } catch (const percwalk::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return static_cast<int>(percwalk::ExitCode::io);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
