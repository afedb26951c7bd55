// prophet: command-line front end for the k-selection prophet inequality toolkit.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prophet/certificate.hpp"
#include "prophet/dp_engine.hpp"
#include "prophet/error.hpp"
#include "prophet/json_io.hpp"
#include "prophet/lp_model.hpp"
#include "prophet/nls_solver.hpp"
#include "prophet/simulator.hpp"
#include "prophet/ssap.hpp"

using nlohmann::json;
using namespace prophet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitVerify = 2;
constexpr int kExitNumeric = 3;

struct Shared {
    int n = 0;
    int k = 1;
    int M = 256;
    int m = 200000;
    double tol = 1e-10;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";
    int threads = 0;
    std::string dist = "uniform";
};

std::string csv_num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// --out wins; otherwise PROPHET_OUT_DIR/<command>.<ext>; otherwise stdout
void emit(const Shared& s, const std::string& command, const std::string& body) {
    std::string path = s.out;
    if (path.empty()) {
        if (const char* dir = std::getenv("PROPHET_OUT_DIR"); dir && *dir)
            path = (std::filesystem::path(dir) / (command + "." + s.format)).string();
    }
    if (path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write output file '" + path + "'");
    f << body;
}

void emit_json(const Shared& s, const std::string& command, json result) {
    json doc = {{"schema_version", kSchemaVersion}, {"command", command}, {"result", std::move(result)}};
    emit(s, command, doc.dump(2) + "\n");
}

void need_n_k(const Shared& s) {
    detail::require(s.n >= 1, "--n must be >= 1");
    detail::require(s.k >= 1, "--k must be >= 1");
    detail::require(s.k <= s.n, "--k must not exceed --n");
}

const double kReference[] = {0.7454, 0.8290, 0.8648, 0.8875, 0.9035};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Provable guarantees for the i.i.d. k-selection prophet inequality"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "prophet 1.0");
    Shared s;

    auto common = [&](CLI::App* sub, bool nk) {
        if (nk) {
            sub->add_option("--n", s.n, "horizon n")->capture_default_str();
            sub->add_option("--k", s.k, "selection budget k")->capture_default_str();
        }
        sub->add_option("--out", s.out, "output path (default: $PROPHET_OUT_DIR/<command>.<format>, else stdout)");
        sub->add_option("--format", s.format, "output format")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
        sub->add_option("--threads", s.threads, "worker threads, 0 means all cores")->capture_default_str();
    };

    // theta
    auto* theta = app.add_subcommand("theta", "solve the nonlinear system for theta_1..theta_k");
    common(theta, false);
    theta->add_option("--k", s.k, "number of levels k")->capture_default_str();
    theta->add_option("--m", s.m, "Euler steps")->capture_default_str();
    theta->add_option("--tol", s.tol, "bisection tolerance on theta")->capture_default_str();
    double rich_tol = 1e-3;
    bool no_rich = false, band = false;
    int stride = 100;
    long long bound_n = 0;
    theta->add_option("--richardson-tol", rich_tol, "allowed |sum theta(m) - sum theta(2m)|")->capture_default_str();
    theta->add_flag("--no-richardson", no_rich, "skip the re-solve at 2m");
    theta->add_flag("--band", band, "shoot on the band [1/m, 2/m] at m - ceil(sqrt m) instead of death at t=1");
    theta->add_option("--stride", stride, "CSV row stride for trajectories")->capture_default_str();
    theta->add_option("--bound-n", bound_n, "also evaluate the finite-n bound at this n");

    // gamma
    auto* gamma = app.add_subcommand("gamma", "solve the discretized primal LP for gamma_{n,k}");
    common(gamma, true);
    gamma->add_option("-M,--grid", s.M, "quantile grid size M")->capture_default_str();
    std::string export_path;
    bool no_refine = false, with_solution = false;
    gamma->add_option("--export", export_path, "write the full model in LP format");
    gamma->add_flag("--no-refine", no_refine, "skip the 2M refinement solve");
    gamma->add_flag("--solution", with_solution, "include f* and d* in the output");

    // dp
    auto* dp = app.add_subcommand("dp", "optimal dynamic program and approximation ratio");
    common(dp, true);
    dp->add_option("--dist", s.dist, "uniform | exponential[:rate] | twopiece:h,p | csv:path[,constant]")
        ->capture_default_str();

    // certify
    auto* cert = app.add_subcommand("certify", "build and verify the dual certificate");
    common(cert, true);
    std::string atoms = "none";
    bool sweep = false, schedule = false;
    int cov_grid = 10000;
    cert->add_option("--atoms", atoms, "atom policy on [0, 1/nbar]")
        ->check(CLI::IsMember({"none", "log"}))
        ->capture_default_str();
    cert->add_flag("--sweep", sweep, "also certify at n/2, n/4, ... and report the smallest passing n");
    cert->add_flag("--schedule", schedule, "include the epsilon schedule");
    cert->add_option("--coverage-grid", cov_grid, "u grid size for the coverage check")->capture_default_str();

    // ssap
    auto* ssap = app.add_subcommand("ssap", "sequential stochastic assignment thresholds and values");
    common(ssap, false);
    ssap->add_option("--n", s.n, "number of periods")->capture_default_str();
    ssap->add_option("--dist", s.dist, "value distribution")->capture_default_str();
    std::vector<double> rewards;
    bool alpha = false;
    int random_rewards = 100;
    ssap->add_option("--rewards", rewards, "rewards r_1 <= ... <= r_n")->delimiter(',');
    ssap->add_flag("--alpha", alpha, "compare the SSAP ratio with min_k gamma over a distribution family");
    ssap->add_option("--random-rewards", random_rewards, "random reward vectors for --alpha")->capture_default_str();
    ssap->add_option("--seed", s.seed, "seed for random reward vectors")->capture_default_str();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo evaluation of a quantile policy");
    common(sim, true);
    sim->add_option("--dist", s.dist, "value distribution")->capture_default_str();
    long reps = 100000;
    std::string policy = "dp", per_rep;
    sim->add_option("--reps", reps, "replicates")->capture_default_str();
    sim->add_option("--seed", s.seed, "master seed")->capture_default_str();
    sim->add_option("--policy", policy, "policy")
        ->check(CLI::IsMember({"dp", "reduction", "zero", "all"}))
        ->capture_default_str();
    sim->add_option("--per-replicate", per_rep, "write per-replicate rewards as CSV to this path");

    // table1
    auto* table = app.add_subcommand("table1", "constants sum theta_k against the classical bound");
    common(table, false);
    int kmax = 5;
    table->add_option("--kmax", kmax, "largest k")->check(CLI::Range(1, 8))->capture_default_str();
    table->add_option("--m", s.m, "Euler steps")->capture_default_str();
    table->add_flag("--no-richardson", no_rich, "skip the re-solve at 2m");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*theta) {
            detail::require(s.k >= 1 && s.k <= 10, "--k must lie in 1..10");
            NlsOptions o;
            o.m = s.m;
            o.theta_tol = s.tol;
            o.richardson = !no_rich;
            o.richardson_tol = rich_tol;
            o.target = band ? ShootTarget::sqrt_band : ShootTarget::death_at_one;
            const ThetaSolution ts = solve_nls(s.k, o);
            if (s.format == "csv") {
                emit(s, "theta", theta_trajectory_csv(ts, stride));
            } else {
                json r = to_json(ts);
                r["constants"] = to_json(derived_constants(ts));
                if (bound_n > 0) r["bound"] = to_json(theorem2_bound(bound_n, s.k, ts.sum_theta()));
                emit_json(s, "theta", r);
            }
        } else if (*gamma) {
            need_n_k(s);
            const DiscretizedPrimal p = build_primal(s.n, s.k, s.M);
            if (!export_path.empty()) export_lp(p, export_path);
            const PrimalSolution a = solve_primal(p);
            json r = {{"n", s.n}, {"k", s.k}, {"M", s.M}, {"value", a.value}, {"status", to_string(a.status)},
                      {"iterations", a.iterations}, {"rows_full", p.num_rows()}, {"vars", p.num_vars()},
                      {"coarse", to_json(a, with_solution)}};
            if (!no_refine) {
                const PrimalSolution b = solve_primal(build_primal(s.n, s.k, 2 * s.M));
                r["fine"] = to_json(b, with_solution);
                r["refinement_gap"] = b.value - a.value;
            }
            if (s.format == "csv") {
                std::string body = "i,u,f\n";
                for (int i = 0; i <= p.M; ++i)
                    body += std::to_string(i) + "," + csv_num(p.grid[i]) + "," + csv_num(a.f[i]) + "\n";
                emit(s, "gamma", body);
            } else {
                emit_json(s, "gamma", r);
            }
            if (a.status != SimplexStatus::optimal) return kExitNumeric;
        } else if (*dp) {
            need_n_k(s);
            const QuantileFunction f = distribution_from_spec(s.dist);
            const DPTable t = solve_dp(s.n, s.k, f);
            const double opt = opt_offline(s.n, s.k, f);
            if (s.format == "csv") {
                std::string body = "t,l,A,q\n";
                for (int tt = 1; tt <= s.n + 1; ++tt)
                    for (int l = 0; l <= s.k; ++l)
                        body += std::to_string(tt) + "," + std::to_string(l) + "," + csv_num(t.A[tt][l]) + "," +
                                csv_num(t.q[tt][l]) + "\n";
                emit(s, "dp", body);
            } else {
                json r = to_json(t);
                r["dist"] = s.dist;
                r["opt_value"] = opt;
                r["ratio"] = t.value() / opt;
                emit_json(s, "dp", r);
            }
        } else if (*cert) {
            detail::require(s.k >= 1, "--k must be >= 1");
            detail::require(s.n > s.k + 1, "certify needs n > k + 1");
            CertifyOptions o;
            o.cert.atoms = atoms == "log" ? AtomPolicy::log_density : AtomPolicy::none;
            o.coverage_grid = cov_grid;
            const CertifiedBound b = certified_lower_bound(s.n, s.k, o);
            json r = to_json(b, schedule);
            if (sweep) {
                json rows = json::array();
                long long smallest = -1;
                for (int n = s.n / 2; n > s.k + 1; n /= 2) {
                    json row = {{"n", n}};
                    try {
                        const CertifiedBound c = certified_lower_bound(n, s.k, o);
                        row["pass"] = c.pass;
                        row["v_star"] = c.v_star;
                        row["min_slack"] = std::min({c.budget_k.min_slack, c.budget_j.checked ? c.budget_j.min_slack : 0.0,
                                                     c.coverage.min_slack});
                        if (c.pass && c.v_star > 0.0) smallest = n;
                    } catch (const NumericalError& e) {
                        row["pass"] = false;
                        row["error"] = e.what();
                    }
                    rows.push_back(row);
                }
                r["sweep"] = rows;
                // smallest n in the sweep with a passing, non-vacuous certificate
                r["smallest_passing_n"] = smallest > 0 ? json(smallest) : json(nullptr);
            }
            if (s.format == "csv") {
                std::string body = "t,budget_k_slack,budget_j_slack\n";
                for (int t = 1; t <= b.cert.nbar; ++t)
                    body += std::to_string(t) + "," + csv_num(b.budget_k.per_t[t - 1]) + "," +
                            (b.budget_j.per_t.empty() ? std::string() : csv_num(b.budget_j.per_t[t - 1])) + "\n";
                emit(s, "certify", body);
            } else {
                emit_json(s, "certify", r);
            }
            if (!b.pass) {
                std::cerr << "certificate failed: " << b.failure << "\n";
                return kExitVerify;
            }
        } else if (*ssap) {
            detail::require(s.n >= 1, "--n must be >= 1");
            const QuantileFunction f = distribution_from_spec(s.dist);
            const SSAPThresholds th = solve_thresholds(s.n, f);
            json r = to_json(th);
            r["dist"] = s.dist;
            if (!rewards.empty()) {
                const double v = optimal_value(th, rewards);
                const auto ex = order_statistic_means(s.n, f);
                double den = 0.0;
                for (int t = 1; t <= s.n; ++t) den += rewards[t - 1] * ex[t];
                r["rewards"] = rewards;
                r["value"] = v;
                if (den > 0.0) r["ratio"] = v / den;
            }
            if (alpha) {
                std::vector<QuantileFunction> family{uniform01(), exponential(1.0), f};
                for (double h : {10.0, 100.0, 1000.0, 4000.0})
                    for (double p = 0.1; p < 0.95; p += 0.1) family.push_back(two_piece(h, p));
                for (int k = 1; k <= s.n && s.n <= 8; ++k) {
                    const PrimalSolution lp = solve_primal(build_primal(s.n, k, 256));
                    family.push_back(QuantileFunction(build_primal(s.n, k, 256).grid, lp.f));
                }
                r["alpha"] = to_json(alpha_ratio(s.n, family, reward_family(s.n, random_rewards, s.seed), 1e-9));
            }
            if (s.format == "csv") {
                std::string body = "t,i,mu\n";
                for (int t = 1; t <= s.n + 1; ++t)
                    for (int i = 0; i < t; ++i)
                        body += std::to_string(t) + "," + std::to_string(i) + "," + csv_num(th.mu[t][i]) + "\n";
                emit(s, "ssap", body);
            } else {
                emit_json(s, "ssap", r);
            }
        } else if (*sim) {
            need_n_k(s);
            detail::require(reps >= 1, "--reps must be >= 1");
            const QuantileFunction f = distribution_from_spec(s.dist);
            SimOptions o;
            o.reps = reps;
            o.seed = s.seed;
            o.threads = s.threads;
            o.keep_rewards = !per_rep.empty();
            std::vector<QuantilePolicy> policies;
            const DPTable t = solve_dp(s.n, s.k, f);
            if (policy == "dp" || policy == "all") policies.push_back(policy_from_dp(t));
            if (policy == "reduction" || policy == "all") policies.push_back(reduction_policy(s.n, s.k, f).quantile_policy(f));
            if (policy == "zero" || policy == "all") policies.push_back(constant_policy(s.n, s.k, 0.0));
            json list = json::array();
            std::string csv = "policy,mean,std_error,opt,ratio,ratio_se,dp_value\n";
            std::string per = "policy,replicate,reward\n";
            for (const auto& pol : policies) {
                const SimReport rep = simulate(pol, f, s.n, s.k, o);
                json j = to_json(rep);
                j["policy"] = pol.provenance == "custom" ? "zero" : pol.provenance;
                j["dp_value"] = t.value();
                j["z_score"] = rep.std_error > 0.0 ? (rep.mean - t.value()) / rep.std_error : 0.0;
                list.push_back(j);
                csv += j["policy"].get<std::string>() + "," + csv_num(rep.mean) + "," + csv_num(rep.std_error) + "," +
                       csv_num(rep.opt) + "," + csv_num(rep.ratio) + "," + csv_num(rep.ratio_se) + "," +
                       csv_num(t.value()) + "\n";
                for (std::size_t i = 0; i < rep.rewards.size(); ++i)
                    per += j["policy"].get<std::string>() + "," + std::to_string(i) + "," + csv_num(rep.rewards[i]) + "\n";
            }
            if (!per_rep.empty()) {
                std::ofstream pf(per_rep, std::ios::binary);
                if (!pf) throw InputError("cannot write '" + per_rep + "'");
                pf << per;
            }
            if (s.format == "csv") emit(s, "simulate", csv);
            else emit_json(s, "simulate", {{"n", s.n}, {"k", s.k}, {"dist", s.dist}, {"runs", list}});
        } else if (*table) {
            NlsOptions o;
            o.m = s.m;
            o.richardson = !no_rich;
            json rows = json::array();
            std::string csv = "k,sum_theta,classical,reference\n";
            for (int k = 1; k <= kmax; ++k) {
                const ThetaSolution ts = solve_nls(k, o);
                const double classical = 1.0 - std::exp(k * std::log(static_cast<double>(k)) - k -
                                                        std::lgamma(k + 1.0));
                json row = {{"k", k}, {"sum_theta", ts.sum_theta()}, {"theta", ts.theta},
                            {"classical", classical}, {"grid_m", ts.grid_m}};
                if (k <= 5) {
                    row["reference"] = kReference[k - 1];
                    row["difference"] = ts.sum_theta() - kReference[k - 1];
                }
                rows.push_back(row);
                csv += std::to_string(k) + "," + csv_num(ts.sum_theta()) + "," + csv_num(classical) + "," +
                       (k <= 5 ? json(kReference[k - 1]).dump() : std::string()) + "\n";
            }
            if (s.format == "csv") emit(s, "table1", csv);
            else emit_json(s, "table1", {{"rows", rows}});
        }
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
