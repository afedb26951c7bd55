#include "prophet/lp_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "prophet/dp_engine.hpp"
#include "prophet/error.hpp"

namespace prophet {

using detail::require;

DiscretizedPrimal build_primal(int n, int k, int M, std::int64_t row_cap) {
    require(n >= 1 && k >= 1 && k <= n, "primal needs 1 <= k <= n");
    require(M >= 1, "primal needs M >= 1");
    DiscretizedPrimal p;
    p.n = n;
    p.k = k;
    p.M = M;
    require(p.num_rows() <= row_cap, "primal has " + std::to_string(p.num_rows()) +
                                         " rows, above the cap of " + std::to_string(row_cap));
    p.grid.resize(M + 1);
    for (int i = 0; i <= M; ++i) p.grid[i] = static_cast<double>(i) / M;
    p.grid[M] = 1.0;
    // w_i = int g(u) phi_i(u) du with the hat basis phi_i, same rule as opt_offline
    const QuadratureRule rule = opt_quadrature(n, k, p.grid);
    p.weights.assign(M + 1, 0.0);
    for (std::size_t r = 0; r < rule.nodes.size(); ++r) {
        const double u = rule.nodes[r];
        int i = std::min(M - 1, static_cast<int>(u * M));
        const double w = (u - p.grid[i]) / (p.grid[i + 1] - p.grid[i]);
        p.weights[i] += rule.weights[r] * (1.0 - w);
        p.weights[i + 1] += rule.weights[r] * w;
    }
    return p;
}

LinearRow DiscretizedPrimal::budget_row(int t, int l, int j) const {
    LinearRow row;
    row.name = "budget_" + std::to_string(t) + "_" + std::to_string(l) + "_" + std::to_string(j);
    row.sense = RowSense::ge;
    row.rhs = 0.0;
    const double q = grid[j];
    row.terms.emplace_back(d_index(t, l), 1.0);
    // int_0^{u_j} f by the trapezoid rule on the grid
    for (int i = 0; i <= j && j > 0; ++i) {
        const double left = i > 0 ? grid[i] - grid[i - 1] : 0.0;
        const double right = i < j ? grid[i + 1] - grid[i] : 0.0;
        row.terms.emplace_back(f_index(i), -0.5 * (left + right));
    }
    if (q != 0.0) row.terms.emplace_back(d_index(t + 1, l - 1), -q);
    if (q != 1.0) row.terms.emplace_back(d_index(t + 1, l), -(1.0 - q));
    return row;
}

LinearRow DiscretizedPrimal::benchmark_row() const {
    LinearRow row;
    row.name = "benchmark";
    row.sense = RowSense::ge;
    row.rhs = 1.0;
    for (int i = 0; i <= M; ++i) row.terms.emplace_back(f_index(i), weights[i]);
    return row;
}

LinearRow DiscretizedPrimal::monotone_row(int i) const {
    LinearRow row;
    row.name = "monotone_" + std::to_string(i);
    row.sense = RowSense::ge;
    row.rhs = 0.0;
    row.terms = {{f_index(i), 1.0}, {f_index(i + 1), -1.0}};
    return row;
}

std::vector<std::string> DiscretizedPrimal::var_names() const {
    std::vector<std::string> v(num_vars());
    for (int i = 0; i <= M; ++i) v[f_index(i)] = "f_" + std::to_string(i);
    for (int t = 1; t <= n + 1; ++t)
        for (int l = 0; l <= k; ++l) v[d_index(t, l)] = "d_" + std::to_string(t) + "_" + std::to_string(l);
    return v;
}

LinearProgram DiscretizedPrimal::to_linear_program() const {
    LinearProgram lp;
    lp.vars = var_names();
    lp.objective.assign(num_vars(), 0.0);
    lp.objective[d_index(1, k)] = 1.0;
    lp.rows.reserve(static_cast<std::size_t>(num_rows()));
    for (int t = 1; t <= n; ++t)
        for (int l = 1; l <= k; ++l)
            for (int j = 0; j <= M; ++j) lp.rows.push_back(budget_row(t, l, j));
    lp.rows.push_back(benchmark_row());
    for (int i = 0; i < M; ++i) lp.rows.push_back(monotone_row(i));
    return lp;
}

namespace {

// partial masses S_j = int_0^{u_j} f for grid-linear f
std::vector<double> prefix_mass(const std::vector<double>& grid, const std::vector<double>& f) {
    std::vector<double> s(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i) s[i] = s[i - 1] + 0.5 * (grid[i] - grid[i - 1]) * (f[i - 1] + f[i]);
    return s;
}

// worst budget row for (t,l): returns (violation, j)
std::pair<double, int> worst_row(const DiscretizedPrimal& p, const std::vector<double>& S,
                                 const std::vector<std::vector<double>>& d, int t, int l) {
    double worst = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int j = 0; j <= p.M; ++j) {
        const double q = p.grid[j];
        const double v = S[j] + q * d[t + 1][l - 1] + (1.0 - q) * d[t + 1][l] - d[t][l];
        if (v > worst) {
            worst = v;
            arg = j;
        }
    }
    return {worst, arg};
}

}  // namespace

double primal_violation(const DiscretizedPrimal& p, const std::vector<double>& f,
                        const std::vector<std::vector<double>>& d) {
    const auto S = prefix_mass(p.grid, f);
    double worst = 0.0;
    for (int t = 1; t <= p.n; ++t)
        for (int l = 1; l <= p.k; ++l) worst = std::max(worst, worst_row(p, S, d, t, l).first);
    long double bench = 0.0L;
    for (int i = 0; i <= p.M; ++i) bench += p.weights[i] * f[i];
    worst = std::max(worst, 1.0 - static_cast<double>(bench));
    for (int i = 0; i < p.M; ++i) worst = std::max(worst, f[i + 1] - f[i]);
    for (double x : f) worst = std::max(worst, -x);
    return worst;
}

PrimalSolution solve_primal(const DiscretizedPrimal& p, const SimplexOptions& opt) {
    const int M = p.M;
    // working model: delta_0..delta_M, then the d block at the same offsets
    LinearProgram lp;
    lp.vars = p.var_names();
    for (int i = 0; i <= M; ++i) lp.vars[i] = "delta_" + std::to_string(i);
    lp.objective.assign(p.num_vars(), 0.0);
    lp.objective[p.d_index(1, p.k)] = 1.0;

    auto to_delta = [&](const LinearRow& row) {
        // coefficient of delta_m is sum_{i <= m} coefficient of f_i
        LinearRow out;
        out.name = row.name;
        out.sense = row.sense;
        out.rhs = row.rhs;
        std::vector<double> fc(M + 1, 0.0);
        for (const auto& [j, a] : row.terms) {
            if (j <= M) fc[j] += a;
            else out.terms.emplace_back(j, a);
        }
        double run = 0.0;
        for (int m = 0; m <= M; ++m) {
            run += fc[m];
            if (run != 0.0) out.terms.emplace_back(m, run);
        }
        return out;
    };

    lp.rows.push_back(to_delta(p.benchmark_row()));
    const int seeds = std::min(M, 8);
    for (int t = 1; t <= p.n; ++t)
        for (int l = 1; l <= p.k; ++l)
            for (int s = 0; s <= seeds; ++s) lp.rows.push_back(to_delta(p.budget_row(t, l, s * M / seeds)));

    PrimalSolution out;
    std::vector<double> f(M + 1);
    std::vector<std::vector<double>> d(p.n + 2, std::vector<double>(p.k + 1, 0.0));
    const double add_tol = 1e-10;
    for (int round = 1;; ++round) {
        const SimplexResult r = simplex_solve(lp, opt);
        out.iterations += r.iterations;
        out.rounds = round;
        out.status = r.status;
        if (r.status != SimplexStatus::optimal) break;
        double acc = 0.0;
        for (int i = M; i >= 0; --i) {
            acc += r.x[i];
            f[i] = acc;
        }
        for (int t = 1; t <= p.n + 1; ++t)
            for (int l = 0; l <= p.k; ++l) d[t][l] = r.x[p.d_index(t, l)];
        out.value = r.value;
        const auto S = prefix_mass(p.grid, f);
        int added = 0;
        for (int t = 1; t <= p.n; ++t)
            for (int l = 1; l <= p.k; ++l) {
                const auto [viol, j] = worst_row(p, S, d, t, l);
                if (viol > add_tol) {
                    lp.rows.push_back(to_delta(p.budget_row(t, l, j)));
                    ++added;
                }
            }
        if (added == 0) break;
        if (round >= 10000) throw NumericalError("solve_primal: row generation did not settle");
    }
    out.f = f;
    out.d = d;
    out.working_rows = static_cast<int>(lp.rows.size());
    out.max_violation = primal_violation(p, f, d);
    return out;
}

void export_lp(const DiscretizedPrimal& p, const std::string& path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "cannot write LP file '" + path + "'");
    write_lp(p.to_linear_program(), out,
             "discretized primal n=" + std::to_string(p.n) + " k=" + std::to_string(p.k) +
                 " M=" + std::to_string(p.M));
    require(static_cast<bool>(out), "write failed for LP file '" + path + "'");
}

GammaEstimate estimate_gamma(int n, int k, int M, const SimplexOptions& opt) {
    GammaEstimate g;
    g.n = n;
    g.k = k;
    g.M = M;
    g.coarse = solve_primal(build_primal(n, k, M), opt);
    g.fine = solve_primal(build_primal(n, k, 2 * M), opt);
    return g;
}

std::vector<QuantileFunction> sample_grid_instances(const DiscretizedPrimal& p, int count,
                                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<QuantileFunction> out;
    out.reserve(count);
    for (int c = 0; c < count; ++c) {
        // a few random knots on the grid with random non-increasing values
        const int knots = 1 + static_cast<int>(rng() % 5);
        std::vector<int> idx{0, p.M};
        for (int i = 0; i < knots; ++i) idx.push_back(1 + static_cast<int>(rng() % (p.M - 1)));
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        std::vector<double> kv(idx.size());
        double v = 0.0;
        for (std::size_t i = idx.size(); i-- > 0;) {
            // occasional large head jump, otherwise modest increments
            const double step = unit(rng) < 0.2 ? 20.0 * unit(rng) : unit(rng);
            if (i + 1 < idx.size() || unit(rng) < 0.5) v += step;
            kv[i] = v;
        }
        if (kv.front() <= 0.0) kv.front() = 1.0;
        std::vector<double> vals(p.M + 1);
        for (std::size_t s = 1; s < idx.size(); ++s)
            for (int j = idx[s - 1]; j <= idx[s]; ++j) {
                const double w = static_cast<double>(j - idx[s - 1]) / (idx[s] - idx[s - 1]);
                vals[j] = kv[s - 1] + w * (kv[s] - kv[s - 1]);
            }
        for (int j = 1; j <= p.M; ++j) vals[j] = std::min(vals[j], vals[j - 1]);
        out.push_back(normalize(p.n, p.k, QuantileFunction(p.grid, vals)));
    }
    return out;
}

Theorem1Report verify_theorem1(int n, int k, int M, const std::vector<QuantileFunction>& instances,
                               double tol, const SimplexOptions& opt) {
    require(n <= 6, "verify_theorem1 is meant for n <= 6");
    const DiscretizedPrimal p = build_primal(n, k, M);
    const PrimalSolution sol = solve_primal(p, opt);
    if (sol.status != SimplexStatus::optimal)
        throw NumericalError(std::string("verify_theorem1: LP status ") + to_string(sol.status));
    Theorem1Report rep;
    rep.n = n;
    rep.k = k;
    rep.M = M;
    rep.tol = tol;
    rep.lp_value = sol.value;
    rep.lower_pass = true;
    for (const auto& f : instances) {
        Theorem1Case c;
        c.lp_value = sol.value;
        c.dp_value = solve_dp(n, k, f).value();
        c.pass = sol.value <= c.dp_value + tol;
        rep.lower_pass = rep.lower_pass && c.pass;
        rep.cases.push_back(c);
    }
    const QuantileFunction G(p.grid, sol.f);
    rep.reconstructed_dp = solve_dp(n, k, G).value();
    rep.reconstructed_opt = opt_offline(n, k, G);
    rep.reconstructed_pass = sol.d[1][k] >= rep.reconstructed_dp - tol;
    return rep;
}

}  // namespace prophet
