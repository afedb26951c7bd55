// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "prophet/certificate.hpp"
#include "prophet/dp_engine.hpp"
#include "prophet/lp_model.hpp"
#include "prophet/nls_solver.hpp"
#include "prophet/simulator.hpp"
#include "prophet/special_fn.hpp"
#include "prophet/ssap.hpp"

using namespace prophet;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("criterion %2d %-5s %s: %s\n", id, ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

std::vector<ThetaSolution> table;

void c1_table() {
    const double ref[] = {0.7454, 0.8290, 0.8648, 0.8875, 0.9035};
    const auto t0 = std::chrono::steady_clock::now();
    NlsOptions o;
    o.m = 200000;
    bool ok = true;
    std::string detail;
    for (int k = 1; k <= 5; ++k) {
        table.push_back(solve_nls(k, o));
        const double s = table.back().sum_theta();
        const bool hit = std::abs(s - ref[k - 1]) <= 5e-4;
        ok = ok && hit;
        detail += fmt("k=%d %.6f (ref %.4f, %+.1e)%s; ", k, s, ref[k - 1], s - ref[k - 1], hit ? "" : " MISS");
    }
    const double secs = seconds_since(t0);
    ok = ok && secs <= 600.0;
    report(1, "table", ok, detail + fmt("%.0f s", secs));
}

void c2_k2() {
    const auto& th = table[1].theta;
    const bool ok = std::abs(th[0] - 0.346) <= 2e-3 && std::abs(th[1] - 0.483) <= 2e-3;
    report(2, "k2", ok, fmt("theta = (%.6f, %.6f)", th[0], th[1]));
}

void c3_hill_kertz() {
    const double th = table[0].theta[0];
    const double I = oracle::integrate_singular(
        [&](double y) { return 1.0 / (1.0 / th - 1.0 + y * (1.0 - std::log(y))); }, 0.0, 1.0);
    double worst = 0.0;
    for (int i = 1; i < 1000; ++i) {
        const double y = i / 1000.0;
        worst = std::max(worst, std::abs(gamma_upper(2, -std::log(y)) - y * (1.0 - std::log(y))));
    }
    const bool ok = std::abs(I - 1.0) <= 1e-6 && worst <= 1e-14;
    report(3, "k1-integral", ok, fmt("integral - 1 = %.2e, identity error %.1e", I - 1.0, worst));
}

void c4_certificates() {
    bool ok = true;
    std::string detail;
    for (int k = 1; k <= 3; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        const CertifiedBound b = certified_lower_bound(100000, k);
        const double secs = seconds_since(t0);
        const double nb = 100000.0 - k - 1;
        const double formula = (1.0 - 12.0 * k * std::log(nb) * std::log(nb) / nb) * b.sum_theta;
        double slack = std::min(b.budget_k.min_slack, b.coverage.min_slack);
        if (k > 1) slack = std::min(slack, b.budget_j.min_slack);
        const bool hit = b.pass && slack >= -1e-9 && b.v_star == formula && secs <= 300.0;
        ok = ok && hit;
        detail += fmt("k=%d v*=%.6f min slack %.1e %.1f s%s; ", k, b.v_star, slack, secs,
                      hit ? "" : (" " + b.failure).c_str());
    }
    report(4, "certificate", ok, detail);
}

void c5_theorem1() {
    bool ok = true;
    int cases = 0;
    double worst_lower = -1.0, worst_recon = -1.0;
    for (int n = 1; n <= 4; ++n)
        for (int k = 1; k <= n; ++k) {
            const DiscretizedPrimal p = build_primal(n, k, 1024);
            const Theorem1Report r = verify_theorem1(n, k, 1024, sample_grid_instances(p, 50, 100 + 10 * n + k), 1e-4);
            ok = ok && r.pass();
            for (const auto& c : r.cases) worst_lower = std::max(worst_lower, c.lp_value - c.dp_value);
            worst_recon = std::max(worst_recon, r.reconstructed_dp - r.lp_value);
            cases += static_cast<int>(r.cases.size());
        }
    report(5, "theorem1", ok,
           fmt("%d instances, max(LP - A) = %.2e, max(A(G) - d*) = %.2e", cases, worst_lower, worst_recon));
}

void c6_dp() {
    const RatioReport r = approx_ratio(2, 1, uniform01());
    double worst = 0.0;
    for (int n = 1; n <= 6; ++n)
        for (const QuantileFunction& f : {uniform01(), exponential(1.0), two_piece(50.0, 0.3)})
            worst = std::max(worst, std::abs(approx_ratio(n, n, f).ratio - 1.0));
    const bool ok = std::abs(r.dp_value - 0.625) <= 1e-9 && std::abs(r.ratio - 0.9375) <= 1e-9 && worst <= 1e-9;
    report(6, "dp", ok, fmt("A=%.12f ratio=%.12f, k=n max |ratio-1| = %.1e", r.dp_value, r.ratio, worst));
}

void c7_identities() {
    double rec = 0.0, fd = 0.0, shift = 0.0, quad = 0.0;
    for (int l = 1; l <= 8; ++l)
        for (double x : {0.0, 0.1, 1.0, 3.0, 10.0, 30.0})
            rec = std::max(rec, rel(gamma_upper(l + 1, x), l * gamma_upper(l, x) + std::pow(x, l) * std::exp(-x)));
    for (int n : {3, 6, 20, 80})
        for (int k : {1, 2, n / 2, n - 1})
            for (double u : {0.02, 0.1, 0.3, 0.5, 0.7}) {
                GWeightParams p(n, k);
                const double d = g_weight_deriv(p, u);
                fd = std::max(fd, rel(d, oracle::g_derivative_fd(n, k, u)));
                GWeightParams up(n + 1, k + 1);
                const double lhs = g_weight_deriv(up, u), rhs = (n + 1.0) / k * u * d;
                if (lhs != 0.0 || rhs != 0.0) shift = std::max(shift, rel(lhs, rhs));
                for (double b : {u + 0.05, u + 0.3}) {
                    const double bb = std::min(b, 1.0);
                    const double ref = oracle::integrate([&](double v) { return -v * g_weight_deriv(p, v); }, u, bb);
                    quad = std::max(quad, std::abs(integral_q_neg_gprime(p, u, bb) - ref));
                }
            }
    const bool ok = rec <= 1e-12 && fd <= 1e-6 && shift <= 1e-12 && quad <= 1e-8;
    report(7, "identities", ok,
           fmt("recurrence %.1e, g' vs differences %.1e, shift %.1e, q-integral %.1e", rec, fd, shift, quad));
}

void c8_structure() {
    bool ok = true;
    std::string detail;
    for (int k = 1; k <= 5; ++k) {
        const ThetaSolution& ts = table[k - 1];
        for (int j = 1; j < k; ++j) ok = ok && ts.theta[j - 1] < ts.theta[j];
        ok = ok && ts.theta.back() < 1.0 / k;
        for (const auto& lv : ts.levels) {
            std::size_t t0 = 1;
            while (t0 < lv.Y.size() && lv.Y[t0] == 1.0) ++t0;
            for (std::size_t t = t0 + 1; t < lv.Y.size(); ++t)
                if (lv.Y[t - 1] > 0.0 && !(lv.Y[t] < lv.Y[t - 1])) ok = false;
        }
    }
    double lo = 1e9, hi = 0.0;
    for (int k = 1; k <= 3; ++k) {
        const ThetaSolution a = solve_nls_fixed(k, 20000), b = solve_nls_fixed(k, 40000);
        for (int j = 1; j <= k; ++j) {
            const double r = euler_residual(a, j) / euler_residual(b, j);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    }
    ok = ok && lo >= 1.6 && hi <= 2.4;
    report(8, "nls-structure", ok, fmt("monotone theta and Y for k<=5; residual ratio m->2m in [%.3f, %.3f]", lo, hi));
}

void c9_ssap() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.05, 1.0);
    auto sorted_random = [&](int n) {
        std::vector<double> r(n);
        for (auto& x : r) x = U(rng);
        std::sort(r.begin(), r.end());
        return r;
    };
    // brute force over all assignment policies
    double bf = 0.0;
    int bf_cases = 0;
    for (int n : {1, 2, 3})
        for (int s : {2, 3, 4})
            for (int rep = 0; rep < 3; ++rep) {
                oracle::Discrete d;
                double tot = 0.0;
                for (int i = 0; i < s; ++i) d.probs.push_back(U(rng)), tot += d.probs.back();
                for (auto& p : d.probs) p /= tot;
                for (int i = 0; i < s; ++i) d.values.push_back(10 * U(rng));
                std::sort(d.values.begin(), d.values.end(), std::greater<>());
                std::vector<double> grid{0.0}, vals{d.values[0]};
                double c = 0.0;
                for (int i = 0; i < s; ++i) {
                    c += d.probs[i];
                    grid.push_back(i + 1 == s ? 1.0 : c);
                    vals.push_back(d.values[i]);
                }
                const auto r = sorted_random(n);
                const double v = optimal_value(solve_thresholds(n, QuantileFunction(grid, vals, Interp::constant)), r);
                bf = std::max(bf, std::abs(v - oracle::ssap_bruteforce(d, r)));
                ++bf_cases;
            }
    // decomposition: SSAP ratio >= min_k gamma for random rewards
    double decomp = 1.0;
    for (int n : {3, 4})
        for (const QuantileFunction& f : {uniform01(), exponential(1.0), two_piece(80.0, 0.25)}) {
            double g = 1.0;
            for (int k = 1; k <= n; ++k) g = std::min(g, approx_ratio(n, k, f).ratio);
            const SSAPThresholds th = solve_thresholds(n, f);
            const auto ex = order_statistic_means(n, f);
            for (int i = 0; i < 100; ++i) {
                const auto r = sorted_random(n);
                double den = 0.0;
                for (int t = 1; t <= n; ++t) den += r[t - 1] * ex[t];
                decomp = std::min(decomp, optimal_value(th, r) / den - g);
            }
        }
    // alpha = min gamma on a family containing the LP worst cases
    double alpha_gap = 0.0;
    std::string alpha_detail;
    for (int n : {2, 3}) {
        std::vector<QuantileFunction> fam{uniform01(), exponential(1.0)};
        for (double h : {10.0, 100.0, 1000.0})
            for (double p : {0.1, 0.3, 0.6}) fam.push_back(two_piece(h, p));
        for (int k = 1; k <= n; ++k) {
            const DiscretizedPrimal p = build_primal(n, k, 512);
            fam.emplace_back(p.grid, solve_primal(p).f);
        }
        const AlphaReport a = alpha_ratio(n, fam, reward_family(n, 100, 77 + n));
        alpha_gap = std::max(alpha_gap, std::abs(a.alpha_hat - a.min_gamma));
        if (!a.decomposition_ok || !a.tail_ok) alpha_gap = 1.0;
        alpha_detail += fmt("n=%d alpha=%.6f min gamma=%.6f; ", n, a.alpha_hat, a.min_gamma);
    }
    const bool ok = bf <= 1e-6 && decomp >= -1e-9 && alpha_gap <= 1e-3;
    report(9, "ssap", ok,
           fmt("brute force %d cases max err %.1e; min(ratio - min gamma) = %.2e; ", bf_cases, bf, decomp) +
               alpha_detail);
}

void c10_simulator() {
    struct Cell {
        int n, k;
        const char* name;
        QuantileFunction f;
    };
    const std::vector<Cell> cells = {
        {2, 1, "uniform", uniform01()},          {3, 1, "uniform", uniform01()},
        {5, 2, "uniform", uniform01()},          {8, 3, "uniform", uniform01()},
        {2, 1, "exponential", exponential(1.0)}, {4, 2, "exponential", exponential(1.0)},
        {6, 3, "exponential", exponential(1.0)}, {10, 4, "exponential", exponential(1.0)},
        {2, 1, "twopiece", two_piece(20.0, 0.4)}, {3, 2, "twopiece", two_piece(50.0, 0.2)},
        {5, 1, "twopiece", two_piece(200.0, 0.5)}, {7, 7, "twopiece", two_piece(5.0, 0.7)}};
    bool ok = true;
    double worst_z = 0.0;
    bool identical = true;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Cell& c = cells[i];
        const DPTable t = solve_dp(c.n, c.k, c.f);
        SimOptions o;
        o.reps = 200000;
        o.seed = 1000 + i;
        o.keep_rewards = true;
        const QuantilePolicy pol = policy_from_dp(t);
        const SimReport a = simulate(pol, c.f, c.n, c.k, o);
        o.threads = 1;
        const SimReport b = simulate(pol, c.f, c.n, c.k, o);
        identical = identical && a.mean == b.mean && a.std_error == b.std_error && a.rewards == b.rewards;
        const double z = a.std_error > 0.0 ? std::abs(a.mean - t.value()) / a.std_error : 0.0;
        worst_z = std::max(worst_z, z);
        ok = ok && z <= 3.0;
    }
    ok = ok && identical;
    report(10, "simulator", ok,
           fmt("12 cells, max |z| = %.2f, reruns %s", worst_z, identical ? "bit-identical" : "DIFFER"));
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        c1_table();
        c2_k2();
        c3_hill_kertz();
        c4_certificates();
        c5_theorem1();
        c6_dp();
        c7_identities();
        c8_structure();
        c9_ssap();
        c10_simulator();
    } catch (const std::exception& e) {
        std::printf("aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%d of 10 criteria failed, %.0f s total\n", failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
