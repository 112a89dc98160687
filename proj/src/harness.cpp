#include "percwalk/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace percwalk {

namespace fs = std::filesystem;
using nlohmann::json;

const char* kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::cost: return "cost";
        case ExperimentKind::lyapunov: return "lyapunov";
        case ExperimentKind::rate: return "rate";
        case ExperimentKind::sweep: return "sweep";
        case ExperimentKind::rate_sweep: return "rate-sweep";
        case ExperimentKind::timeconst: return "timeconst";
        case ExperimentKind::goodbox: return "goodbox";
        case ExperimentKind::selftest: return "selftest";
    }
    return "unknown";
}

ExperimentKind kind_from_name(const std::string& name) {
    for (ExperimentKind k :
         {ExperimentKind::cost, ExperimentKind::lyapunov, ExperimentKind::rate,
          ExperimentKind::sweep, ExperimentKind::rate_sweep, ExperimentKind::timeconst,
          ExperimentKind::goodbox, ExperimentKind::selftest})
        if (name == kind_name(k)) return k;
    throw ValidationError("kind", "unknown experiment kind '" + name + "'");
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
    std::string out = "\"";
    for (char c : raw) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

std::string point_str(const Point& p) {
    std::string s;
    for (int i = 0; i < p.dim(); ++i) {
        if (i) s += ';';
        s += std::to_string(p.c[i]);
    }
    return s;
}

std::string rational_str(const RationalPoint& x) {
    std::string s = point_str(x.num);
    if (x.den != 1) s += "/" + std::to_string(x.den);
    return s;
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, std::vector<std::string> header) : header_(std::move(header)) {
        out_.open(path, std::ios::binary);
        if (!out_) throw IoError("cannot open " + path.string() + " for writing");
        write_row_raw(header_);
    }

    void row(const std::vector<std::string>& fields) {
        if (fields.size() != header_.size()) throw IoError("csv row width mismatch");
        write_row_raw(fields);
        ++rows_;
    }

    int64_t rows() const { return rows_; }

private:
    void write_row_raw(const std::vector<std::string>& fields) {
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_field(fields[i]);
        }
        out_ << '\n';
    }

    std::ofstream out_;
    std::vector<std::string> header_;
    int64_t rows_ = 0;
};

std::vector<std::string> csv_header_for(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::cost:
            return {"seed", "p", "q", "lambda", "x", "cost", "e_value", "trunc_bound",
                    "iters", "ball_radius"};
        case ExperimentKind::lyapunov:
        case ExperimentKind::sweep:
            return {"seed", "p", "q", "lambda", "k", "cost", "cost_per_k", "trunc_bound",
                    "iters"};
        case ExperimentKind::rate:
            return {"p", "q", "x", "lambda", "alpha_hat", "alpha_stderr", "n",
                    "trunc_slack", "refined", "h"};
        case ExperimentKind::rate_sweep:
            return {"p", "x", "I_hat", "lambda_star", "lambda_minus", "lambda_plus", "status"};
        case ExperimentKind::timeconst:
            return {"seed", "p", "k", "distance", "per_k", "boundary_warning"};
        case ExperimentKind::goodbox:
            return {"seed", "p", "lambda", "ell", "epsilon", "r", "ball_mode", "ball_radius",
                    "c", "good"};
        case ExperimentKind::selftest:
            return {};
    }
    return {};
}

json config_json(const ExperimentConfig& c) {
    json j;
    j["kind"] = kind_name(c.kind);
    j["dimension"] = c.dimension;
    j["p"] = c.p_list;
    j["q"] = c.effective_q();
    j["lambda"] = c.lambdas;
    j["grid"] = {{"lambda_min", c.grid.lambda_min},
                 {"lambda_max", c.grid.lambda_max},
                 {"points", c.grid.points},
                 {"refine_rounds", c.grid.refine_rounds}};
    j["x"] = rational_str(c.x);
    j["K"] = c.K;
    j["replicates"] = c.replicates;
    j["box_radius"] = c.box_radius;
    j["rho_hat"] = c.rho_hat;
    j["r"] = c.r;
    j["tol"] = c.tol;
    j["trunc_tol"] = c.trunc_tol;
    j["ell"] = c.ell;
    j["epsilon"] = c.epsilon;
    j["ball_mode"] = c.ball_mode;
    j["p_c"] = c.p_c();
    j["seed"] = c.seed;
    j["out"] = c.out_dir;
    return j;
}

EstimationOptions estimation_options(const ExperimentConfig& c) {
    EstimationOptions opts;
    opts.K = c.K;
    opts.replicates = c.replicates;
    opts.box_radius = c.box_radius;
    opts.solve.tol = c.tol;
    opts.solve.trunc_tol = c.trunc_tol;
    opts.solve.rho_hat = c.rho_hat;
    return opts;
}

void write_lyapunov_rows(CsvWriter& csv, const std::vector<LyapunovEstimate>& ests) {
    for (const LyapunovEstimate& est : ests) {
        for (const LyapunovRecord& r : est.records) {
            csv.row({std::to_string(r.seed), format_double(r.p), format_double(r.q),
                     format_double(r.lambda), std::to_string(r.k), format_double(r.cost),
                     format_double(r.cost_per_k), format_double(r.trunc_bound),
                     std::to_string(r.iters)});
        }
    }
}

json lyapunov_diag(const LyapunovEstimate& est) {
    json j;
    j["alpha_hat"] = est.alpha_hat;
    j["alpha_upper"] = est.alpha_upper;
    j["alpha_stderr"] = est.alpha_stderr;
    j["alpha_trunc_slack"] = est.alpha_trunc_slack;
    j["box_radius"] = est.box_radius;
    j["failed_records"] = est.failed_records;
    j["p"] = est.p;
    j["lambda"] = est.lambda;
    return j;
}

void write_rate_rows(CsvWriter& csv, const RateCurve& curve) {
    for (const RatePoint& pt : curve.points) {
        csv.row({format_double(curve.p), format_double(curve.q), rational_str(curve.x),
                 format_double(pt.lambda), format_double(pt.alpha.mean),
                 format_double(pt.alpha.stderr_), std::to_string(pt.alpha.n),
                 format_double(pt.trunc_slack), pt.refined ? "1" : "0",
                 format_double(pt.alpha.mean - pt.lambda)});
    }
}

json rate_diag(const RateCurve& curve) {
    json j;
    j["I_hat"] = curve.I_hat;
    j["lambda_star"] = curve.lambda_star;
    j["lambda_minus"] = curve.lambda_minus;
    j["lambda_plus"] = curve.lambda_plus;
    j["status"] = curve.status == RateStatus::ok ? "ok" : "DomainBoundary";
    j["p"] = curve.p;
    return j;
}

}  // namespace

double ExperimentConfig::p_c() const {
    if (p_c_override >= 0) return p_c_override;
    if (dimension == 2) return p_c_d2;
    if (dimension == 3) return p_c_d3;
    throw ValidationError("p_c", "no default critical probability for dimension " +
                                     std::to_string(dimension) + "; set p_c explicitly");
}

double ExperimentConfig::effective_q() const {
    if (q > 0) return q;
    double pmin = *std::min_element(p_list.begin(), p_list.end());
    if (kind == ExperimentKind::sweep || kind == ExperimentKind::rate_sweep)
        return pmin - 0.03;
    return pmin;
}

void ExperimentConfig::validate() const {
    if (!seed_set) throw ValidationError("seed", "required (no default)");
    if (dimension < 1 || dimension > 8)
        throw ValidationError("dimension", "must lie in [1, 8]");
    if (p_list.empty()) throw ValidationError("p", "at least one value required");
    if (kind == ExperimentKind::selftest) return;

    const double pc = p_c();
    for (double p : p_list)
        if (!(p > pc && p <= 1.0))
            throw ValidationError("p", "every p must lie in (p_c, 1] = (" + format_double(pc) +
                                           ", 1]");
    const double qe = effective_q();
    double pmin = *std::min_element(p_list.begin(), p_list.end());
    if (!(qe > pc && qe <= 1.0))
        throw ValidationError("q", "must lie in (p_c, 1] = (" + format_double(pc) + ", 1]");
    if (qe > pmin) throw ValidationError("q", "requires q <= min p");
    if ((kind == ExperimentKind::sweep || kind == ExperimentKind::rate_sweep) && qe >= pmin)
        throw ValidationError("q", "sweeps require q < min p");
    for (double l : lambdas)
        if (!(l > 0.0 && l <= 64.0)) throw ValidationError("lambda", "must lie in (0, 64]");
    if (replicates < 1) throw ValidationError("replicates", "must be >= 1");
    if (K < 1) throw ValidationError("K", "must be >= 1");
    if (!(r > 0.0 && r < 1.0)) throw ValidationError("r", "must lie in (0, 1)");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("epsilon", "must lie in (0, 1)");
    if (!(tol > 0.0 && tol < 1.0)) throw ValidationError("tol", "must lie in (0, 1)");
    if (ball_mode != "alpha" && ball_mode != "l1")
        throw ValidationError("ball_mode", "must be 'alpha' or 'l1'");
    if (x.dim() != 0 && x.dim() != dimension)
        throw ValidationError("x", "dimension mismatch with the configured lattice dimension");
    if (kind != ExperimentKind::rate && kind != ExperimentKind::rate_sweep &&
        kind != ExperimentKind::goodbox) {
        if (x.dim() == 0 || x.is_zero())
            throw ValidationError("x", "nonzero direction required for this experiment");
        if (kind != ExperimentKind::cost && x.den != 1)
            throw ValidationError("x", "integer direction required for this experiment");
    }
    if (kind == ExperimentKind::goodbox && ell < 2)
        throw ValidationError("ell", "must be >= 2");
    if ((kind == ExperimentKind::sweep || kind == ExperimentKind::rate_sweep) &&
        p_list.size() < 2)
        throw ValidationError("p", "sweeps need at least two p values");
    if (kind != ExperimentKind::sweep && kind != ExperimentKind::rate_sweep &&
        p_list.size() != 1)
        throw ValidationError("p", "this experiment takes exactly one p");
    if ((kind == ExperimentKind::cost || kind == ExperimentKind::lyapunov ||
         kind == ExperimentKind::sweep) &&
        lambdas.empty())
        throw ValidationError("lambda", "at least one value required");
}

ResultManifest run(const ExperimentConfig& config) {
    config.validate();

    int threads = config.threads;
    if (const char* env = std::getenv("PERCWALK_THREADS")) {
        threads = std::atoi(env);
        if (threads < 1) throw ValidationError("PERCWALK_THREADS", "must be a positive integer");
    }
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    const auto t0 = std::chrono::steady_clock::now();
    fs::path dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());

    FieldSeed master{config.seed};
    json diagnostics = json::object();
    int64_t records = 0;

    if (config.kind == ExperimentKind::selftest) {
        if (!selftest(std::cout)) throw ValidationError("selftest", "oracle equivalence failed");
    } else {
        CsvWriter csv(dir / "results.csv", csv_header_for(config.kind));
        switch (config.kind) {
            case ExperimentKind::cost: {
                const double p = config.p_list[0];
                const double q = config.effective_q();
                SolveOptions sopts;
                sopts.tol = config.tol;
                sopts.trunc_tol = config.trunc_tol;
                sopts.rho_hat = config.rho_hat;
                Point target = config.x.scaled(1);
                Point origin = Point::zero(config.dimension);
                for (int64_t rep = 0; rep < config.replicates; ++rep) {
                    FieldSeed fsd = replicate_seed(master, static_cast<uint64_t>(rep));
                    for (double lambda : config.lambdas) {
                        ModifiedCostResult mc =
                            modified_travel_cost(origin, target, lambda, p, q, fsd, sopts);
                        csv.row({std::to_string(fsd.seed), format_double(p), format_double(q),
                                 format_double(lambda), point_str(target),
                                 format_double(mc.cost.a_value), format_double(mc.cost.e_value),
                                 format_double(mc.cost.truncation_error_bound),
                                 std::to_string(mc.cost.iterations),
                                 std::to_string(mc.cost.ball_radius)});
                    }
                }
                break;
            }
            case ExperimentKind::lyapunov: {
                LyapunovEstimate est =
                    lyapunov_estimate(config.x.scaled(1), config.lambdas[0], config.p_list[0],
                                      config.effective_q(), master, estimation_options(config));
                write_lyapunov_rows(csv, {est});
                diagnostics = lyapunov_diag(est);
                break;
            }
            case ExperimentKind::sweep: {
                auto ests = continuity_sweep(config.x.scaled(1), config.lambdas[0],
                                             config.p_list, config.effective_q(), master,
                                             estimation_options(config));
                write_lyapunov_rows(csv, ests);
                diagnostics["per_p"] = json::array();
                for (const auto& est : ests) diagnostics["per_p"].push_back(lyapunov_diag(est));
                break;
            }
            case ExperimentKind::rate: {
                RateOptions ropts;
                ropts.q = config.q;
                ropts.grid = config.grid;
                ropts.estimation = estimation_options(config);
                RateCurve curve = rate_function(config.x, config.p_list[0], master, ropts);
                write_rate_rows(csv, curve);
                diagnostics = rate_diag(curve);
                break;
            }
            case ExperimentKind::rate_sweep: {
                RateOptions ropts;
                ropts.q = config.q;
                ropts.grid = config.grid;
                ropts.estimation = estimation_options(config);
                auto curves = rate_continuity_sweep(config.x, config.p_list, master, ropts);
                diagnostics["per_p"] = json::array();
                for (const RateCurve& curve : curves) {
                    csv.row({format_double(curve.p), rational_str(curve.x),
                             format_double(curve.I_hat), format_double(curve.lambda_star),
                             format_double(curve.lambda_minus), format_double(curve.lambda_plus),
                             curve.status == RateStatus::ok ? "ok" : "DomainBoundary"});
                    diagnostics["per_p"].push_back(rate_diag(curve));
                }
                break;
            }
            case ExperimentKind::timeconst: {
                TimeConstantOptions topts;
                topts.box_radius = config.box_radius;
                TimeConstantEstimate est =
                    time_constant_estimate(config.x.scaled(1), config.p_list[0], config.K,
                                           config.replicates, master, topts);
                for (const TimeConstantRecord& r : est.records) {
                    csv.row({std::to_string(r.seed), format_double(config.p_list[0]),
                             std::to_string(r.k), std::to_string(r.distance),
                             format_double(r.per_k), r.boundary_warning ? "1" : "0"});
                }
                diagnostics["mu_hat"] = est.mu_hat;
                diagnostics["mu_upper"] = est.mu_upper;
                diagnostics["boundary_warnings"] = est.boundary_warnings;
                diagnostics["box_radius"] = est.box_radius;
                break;
            }
            case ExperimentKind::goodbox: {
                GoodBoxOptions gopts;
                gopts.dim = config.dimension;
                gopts.solve.tol = config.tol;
                gopts.solve.rho_hat = config.rho_hat;
                ExitBall::Mode mode = config.ball_mode == "alpha"
                                          ? ExitBall::Mode::alpha_calibrated
                                          : ExitBall::Mode::plain_l1;
                GoodBoxDensity res =
                    good_box_density(config.ell, config.lambdas[0], config.epsilon,
                                     config.p_list[0], config.r, mode, config.replicates,
                                     master, gopts);
                for (const GoodBoxRecord& r : res.records) {
                    csv.row({std::to_string(r.seed), format_double(config.p_list[0]),
                             format_double(config.lambdas[0]), std::to_string(config.ell),
                             format_double(config.epsilon), format_double(config.r),
                             config.ball_mode, std::to_string(res.ball_radius),
                             format_double(r.c), r.good ? "1" : "0"});
                }
                diagnostics["density"] = res.density.mean;
                diagnostics["ci_lo"] = res.ci.lo;
                diagnostics["ci_hi"] = res.ci.hi;
                diagnostics["ball_radius"] = res.ball_radius;
                diagnostics["alpha_hat_used"] = res.alpha_hat_used;
                break;
            }
            case ExperimentKind::selftest:
                break;
        }
        records = csv.rows();
    }

    const auto t1 = std::chrono::steady_clock::now();
    ResultManifest manifest;
    manifest.kind = kind_name(config.kind);
    manifest.records = records;
    manifest.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    manifest.csv_path = (dir / "results.csv").string();
    manifest.manifest_path = (dir / "manifest.json").string();

    json j;
    j["tool"] = "percwalk";
    j["version"] = kToolVersion;
    j["kind"] = manifest.kind;
    j["config"] = config_json(config);
    j["records"] = records;
    j["wall_seconds"] = manifest.wall_seconds;
#ifdef _OPENMP
    j["threads"] = threads > 0 ? threads : omp_get_max_threads();
#else
    j["threads"] = 1;
#endif
    j["diagnostics"] = diagnostics;
    std::ofstream mf(dir / "manifest.json", std::ios::binary);
    if (!mf) throw IoError("cannot write manifest.json");
    mf << j.dump(2) << "\n";
    return manifest;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void emit_report(const std::string& results_dir, std::ostream& os) {
    fs::path dir(results_dir);
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw IoError("missing manifest.json in " + results_dir);
    json manifest;
    try {
        mf >> manifest;
    } catch (const std::exception& e) {
        throw IoError("corrupt manifest.json: " + std::string(e.what()));
    }
    const std::string kind_str = manifest.value("kind", "");
    ExperimentKind kind = kind_from_name(kind_str);

    std::ifstream cf(dir / "results.csv");
    if (!cf) throw IoError("missing results.csv in " + results_dir);
    std::string header_line;
    if (!std::getline(cf, header_line)) throw IoError("empty results.csv");
    auto header = split_csv_line(header_line);
    auto expected = csv_header_for(kind);
    if (header != expected)
        throw ValidationError("results", "CSV columns do not match experiment kind '" +
                                             kind_str + "' (mixed or foreign results directory)");

    auto col = [&](const std::string& name) {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw IoError("column missing: " + name);
    };

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(cf, line)) {
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
    }

    os << "kind: " << kind_str << "   records: " << rows.size() << "\n";
    switch (kind) {
        case ExperimentKind::lyapunov:
        case ExperimentKind::sweep: {
            // mean cost/k at the largest k per (p, lambda)
            size_t ip = col("p"), il = col("lambda"), ik = col("k"), iv = col("cost_per_k");
            int64_t kmax = 0;
            for (auto& r : rows) kmax = std::max<int64_t>(kmax, std::stoll(r[ik]));
            std::map<std::pair<double, double>, RunningStat> groups;
            for (auto& r : rows)
                if (std::stoll(r[ik]) == kmax)
                    groups[{std::stod(r[ip]), std::stod(r[il])}].add(std::stod(r[iv]));
            os << "p,lambda,k,alpha_hat,stderr,n\n";
            for (auto& [key, st] : groups)
                os << format_double(key.first) << "," << format_double(key.second) << "," << kmax
                   << "," << format_double(st.mean()) << "," << format_double(st.stderr_of_mean())
                   << "," << st.n() << "\n";
            break;
        }
        case ExperimentKind::cost: {
            size_t ip = col("p"), il = col("lambda"), iv = col("cost");
            std::map<std::pair<double, double>, RunningStat> groups;
            for (auto& r : rows)
                groups[{std::stod(r[ip]), std::stod(r[il])}].add(std::stod(r[iv]));
            os << "p,lambda,mean_cost,stderr,n\n";
            for (auto& [key, st] : groups)
                os << format_double(key.first) << "," << format_double(key.second) << ","
                   << format_double(st.mean()) << "," << format_double(st.stderr_of_mean()) << ","
                   << st.n() << "\n";
            break;
        }
        case ExperimentKind::rate: {
            size_t il = col("lambda"), ia = col("alpha_hat"), ih = col("h"), ir = col("refined");
            os << "lambda,alpha_hat,h,refined\n";
            for (auto& r : rows)
                os << r[il] << "," << r[ia] << "," << r[ih] << "," << r[ir] << "\n";
            if (manifest.contains("diagnostics"))
                os << "I_hat: " << manifest["diagnostics"].value("I_hat", 0.0) << "\n";
            break;
        }
        case ExperimentKind::rate_sweep: {
            size_t ip = col("p"), ii = col("I_hat"), is = col("status");
            os << "p,I_hat,status\n";
            for (auto& r : rows) os << r[ip] << "," << r[ii] << "," << r[is] << "\n";
            break;
        }
        case ExperimentKind::timeconst: {
            size_t ik = col("k"), iv = col("per_k");
            std::map<int64_t, RunningStat> groups;
            for (auto& r : rows) groups[std::stoll(r[ik])].add(std::stod(r[iv]));
            os << "k,mean_distance_per_k,stderr,n\n";
            for (auto& [k, st] : groups)
                os << k << "," << format_double(st.mean()) << ","
                   << format_double(st.stderr_of_mean()) << "," << st.n() << "\n";
            break;
        }
        case ExperimentKind::goodbox: {
            size_t ig = col("good");
            int64_t good = 0;
            for (auto& r : rows) good += r[ig] == "1" ? 1 : 0;
            os << "replicates,good,density\n";
            os << rows.size() << "," << good << ","
               << format_double(rows.empty() ? 0.0
                                             : static_cast<double>(good) /
                                                   static_cast<double>(rows.size()))
               << "\n";
            break;
        }
        case ExperimentKind::selftest:
            break;
    }
}

}  // namespace percwalk
