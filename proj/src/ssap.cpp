#include "prophet/ssap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "prophet/dp_engine.hpp"
#include "prophet/error.hpp"

namespace prophet {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

SSAPThresholds solve_thresholds(int n, const QuantileFunction& f) {
    detail::require(n >= 1, "ssap needs n >= 1");
    SSAPThresholds th;
    th.n = n;
    th.mu.resize(n + 2);
    th.mu[1] = {0.0, kInf};
    const double mean = f.mean();
    for (int t = 1; t <= n; ++t) {
        const auto& cur = th.mu[t];
        auto& nxt = th.mu[t + 1];
        nxt.assign(t + 2, 0.0);
        nxt[t + 1] = kInf;
        for (int i = 1; i <= t; ++i) {
            const double a = cur[i - 1], b = cur[i];
            // E[X 1{a <= X <= b}] + a Pr[X < a] + b Pr[X > b]
            const double q_lo = a > 0.0 ? f.prob_at_least(a) : 1.0;
            const double q_hi = std::isinf(b) ? 0.0 : f.prob_greater(b);
            double v = f.partial_mass(q_lo) - f.partial_mass(q_hi);
            if (a > 0.0) v += a * (1.0 - q_lo);
            if (!std::isinf(b)) v += b * q_hi;
            nxt[i] = v;
        }
        const double scale = std::max(1.0, mean);
        for (int i = 1; i <= t + 1; ++i)
            if (nxt[i] < nxt[i - 1] - 1e-12 * scale)
                throw NumericalError("solve_thresholds: mu not sorted at t=" + std::to_string(t + 1));
        for (int i = 1; i <= t; ++i) nxt[i] = std::max(nxt[i], nxt[i - 1]);
    }
    return th;
}

double optimal_value(const SSAPThresholds& th, const std::vector<double>& rewards) {
    detail::require(static_cast<int>(rewards.size()) == th.n, "need exactly n rewards");
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        detail::require(std::isfinite(rewards[i]) && rewards[i] >= 0.0, "rewards must be finite and >= 0");
        detail::require(i == 0 || rewards[i] >= rewards[i - 1], "rewards must be sorted non-decreasing");
    }
    long double s = 0.0L;
    for (int t = 1; t <= th.n; ++t) s += rewards[t - 1] * th.mu[th.n + 1][t];
    return static_cast<double>(s);
}

double optimal_value(const SSAPInstance& inst) {
    return optimal_value(solve_thresholds(static_cast<int>(inst.rewards.size()), inst.f), inst.rewards);
}

int assign_index(const SSAPThresholds& th, int remaining, double x) {
    detail::require(remaining >= 1 && remaining <= th.n, "remaining count out of range");
    const auto& mu = th.mu[remaining];
    // smallest i with x <= mu[i]
    const auto it = std::lower_bound(mu.begin() + 1, mu.end(), x);
    return static_cast<int>(it - mu.begin());
}

bool ReductionPolicy::select(int remaining, int ones_left, double x) const {
    if (ones_left <= 0) return false;
    const int low = remaining - ones_left;  // eps rewards still unassigned
    return assign_index(thresholds, remaining, x) > low;
}

QuantilePolicy ReductionPolicy::quantile_policy(const QuantileFunction& f) const {
    QuantilePolicy p;
    p.n = n;
    p.k = k;
    p.provenance = "reduction";
    p.q.assign(n + 1, std::vector<double>(k + 1, 0.0));
    for (int t = 1; t <= n; ++t) {
        const int remaining = n - t + 1;
        for (int l = 1; l <= k; ++l) {
            const int low = remaining - l;
            // x gets a 1 iff x > mu[remaining][low]
            p.q[t][l] = low <= 0 ? f.prob_greater(0.0) : f.prob_greater(thresholds.mu[remaining][low]);
        }
    }
    return p;
}

ReductionPolicy reduction_policy(int n, int k, const QuantileFunction& f, double eps) {
    detail::require(n >= 1 && k >= 1 && k <= n, "reduction needs 1 <= k <= n");
    if (eps < 0.0) eps = 1.0 / (10.0 * n * n);
    detail::require(eps > 0.0 && eps < 1.0 / (static_cast<double>(n) * n), "reduction eps must lie in (0, 1/n^2)");
    ReductionPolicy r;
    r.n = n;
    r.k = k;
    r.eps = eps;
    r.rewards.resize(n);
    for (int i = 1; i <= n; ++i) r.rewards[i - 1] = i <= n - k ? eps * i : 1.0;
    r.thresholds = solve_thresholds(n, f);
    return r;
}

std::vector<double> order_statistic_means(int n, const QuantileFunction& f) {
    std::vector<double> opt(n + 1, 0.0), out(n + 1, 0.0);
    for (int k = 1; k <= n; ++k) opt[k] = opt_offline(n, k, f);
    for (int t = 1; t <= n; ++t) out[t] = opt[n - t + 1] - opt[n - t];
    return out;
}

std::vector<std::vector<double>> reward_family(int n, int random_count, std::uint64_t seed) {
    std::vector<std::vector<double>> out;
    for (int tau = 1; tau <= n; ++tau) {
        std::vector<double> r(n, 0.0);
        for (int t = tau; t <= n; ++t) r[t - 1] = 1.0;
        out.push_back(r);
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int c = 0; c < random_count; ++c) {
        std::vector<double> r(n);
        for (double& x : r) x = unit(rng) < 0.3 ? 0.0 : unit(rng) * (unit(rng) < 0.2 ? 100.0 : 1.0);
        std::sort(r.begin(), r.end());
        if (r.back() == 0.0) r.back() = 1.0;
        out.push_back(r);
    }
    return out;
}

AlphaReport alpha_ratio(int n, const std::vector<QuantileFunction>& family,
                        const std::vector<std::vector<double>>& rewards, double tol) {
    detail::require(n >= 1 && !family.empty(), "alpha_ratio needs n >= 1 and a non-empty family");
    AlphaReport rep;
    rep.n = n;
    rep.gamma_hat.assign(n + 1, std::numeric_limits<double>::infinity());
    rep.gamma_hat[0] = 0.0;
    struct Cached {
        std::vector<double> mu;    // mu_{t,n+1}, t = 1..n
        std::vector<double> ex;    // E[X_(t)]
        std::vector<double> dp;    // A_{1,k}
        std::vector<double> opt;   // OPT_{n,k}
    };
    std::vector<Cached> cache;
    for (const auto& f : family) {
        Cached c;
        const SSAPThresholds th = solve_thresholds(n, f);
        c.mu.assign(th.mu[n + 1].begin(), th.mu[n + 1].begin() + n + 1);
        c.dp.assign(n + 1, 0.0);
        c.opt.assign(n + 1, 0.0);
        for (int k = 1; k <= n; ++k) {
            c.dp[k] = solve_dp(n, k, f).value();
            c.opt[k] = opt_offline(n, k, f);
            rep.gamma_hat[k] = std::min(rep.gamma_hat[k], c.dp[k] / c.opt[k]);
        }
        c.ex.assign(n + 1, 0.0);
        for (int t = 1; t <= n; ++t) c.ex[t] = c.opt[n - t + 1] - c.opt[n - t];
        cache.push_back(std::move(c));
    }
    rep.min_gamma = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n; ++k)
        if (rep.gamma_hat[k] < rep.min_gamma) {
            rep.min_gamma = rep.gamma_hat[k];
            rep.argmin_k = k;
        }

    rep.alpha_hat = std::numeric_limits<double>::infinity();
    rep.worst_decomposition_gap = std::numeric_limits<double>::infinity();
    rep.worst_tail_gap = std::numeric_limits<double>::infinity();
    for (const auto& c : cache) {
        // tail sums: sum_{t>=tau} mu_t and their benchmarks OPT_{n, n-tau+1}
        std::vector<double> tail(n + 2, 0.0);
        for (int t = n; t >= 1; --t) tail[t] = tail[t + 1] + c.mu[t];
        double bound = std::numeric_limits<double>::infinity();
        for (int tau = 1; tau <= n; ++tau) {
            const int k = n - tau + 1;
            bound = std::min(bound, tail[tau] / c.opt[k]);
            rep.worst_tail_gap = std::min(rep.worst_tail_gap, tail[tau] - rep.gamma_hat[k] * c.opt[k]);
            rep.max_tail_identity_error = std::max(rep.max_tail_identity_error, std::fabs(tail[tau] - c.dp[k]));
        }
        for (const auto& r : rewards) {
            detail::require(static_cast<int>(r.size()) == n, "reward vector length differs from n");
            long double num = 0.0L, den = 0.0L;
            for (int t = 1; t <= n; ++t) {
                num += r[t - 1] * c.mu[t];
                den += r[t - 1] * c.ex[t];
            }
            if (den <= 0.0L) continue;
            const double ratio = static_cast<double>(num / den);
            ++rep.instances;
            rep.alpha_hat = std::min(rep.alpha_hat, ratio);
            rep.worst_decomposition_gap = std::min(rep.worst_decomposition_gap, ratio - bound);
        }
    }
    rep.decomposition_ok = rep.worst_decomposition_gap >= -tol;
    rep.tail_ok = rep.worst_tail_gap >= -tol;
    return rep;
}

}  // namespace prophet
