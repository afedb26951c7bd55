#include "prophet/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "prophet/dp_engine.hpp"
#include "prophet/error.hpp"

namespace prophet {

void QuantilePolicy::validate() const {
    detail::require(n >= 1 && k >= 1, "policy needs n >= 1 and k >= 1");
    detail::require(static_cast<int>(q.size()) >= n + 1, "policy table is shorter than the horizon");
    for (int t = 1; t <= n; ++t) {
        detail::require(static_cast<int>(q[t].size()) == k + 1, "policy row has the wrong budget width");
        for (double x : q[t]) detail::require(x >= 0.0 && x <= 1.0, "policy quantiles must lie in [0,1]");
    }
}

QuantilePolicy policy_from_dp(const DPTable& dp) {
    QuantilePolicy p;
    p.n = dp.n;
    p.k = dp.k;
    p.q = dp.q;
    p.q.resize(dp.n + 1);
    p.provenance = "dp";
    return p;
}

QuantilePolicy constant_policy(int n, int k, double q) {
    QuantilePolicy p;
    p.n = n;
    p.k = k;
    p.q.assign(n + 1, std::vector<double>(k + 1, q));
    for (auto& row : p.q) row[0] = 0.0;
    p.provenance = "custom";
    p.validate();
    return p;
}

namespace {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t rep, std::uint64_t draw) {
    std::uint64_t z = mix64(seed + 0x9e3779b97f4a7c15ULL);
    z = mix64(z ^ (rep * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
    z = mix64(z ^ (draw * 0xabc98388fb8fac03ULL + 0x8cb92ba72f3d8dd7ULL));
    return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

double pairwise_sum(const double* x, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

SimReport simulate(const QuantilePolicy& policy, const QuantileFunction& f, int n, int k,
                   const SimOptions& opt) {
    detail::require(opt.reps >= 1, "simulate needs reps >= 1");
    detail::require(policy.n == n && policy.k == k, "policy was built for a different (n, k)");
    policy.validate();
    std::vector<double> rewards(static_cast<std::size_t>(opt.reps));
    std::vector<int> picked(static_cast<std::size_t>(opt.reps));
    auto run = [&](long lo, long hi) {
        for (long r = lo; r < hi; ++r) {
            int left = k;
            double total = 0.0;
            for (int t = 1; t <= n && left > 0; ++t) {
                const double u = counter_uniform(opt.seed, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(t));
                if (u <= policy.q[t][left]) {
                    total += f(u);
                    --left;
                }
            }
            rewards[r] = total;
            picked[r] = k - left;
        }
    };
    int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = static_cast<int>(std::max<long>(1, std::min<long>(threads, opt.reps / 1000 + 1)));
    if (threads == 1) {
        run(0, opt.reps);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (opt.reps + threads - 1) / threads;
        for (int i = 0; i < threads; ++i) {
            const long lo = i * chunk, hi = std::min(opt.reps, lo + chunk);
            if (lo < hi) pool.emplace_back(run, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    SimReport rep;
    rep.reps = opt.reps;
    rep.seed = opt.seed;
    rep.max_selected = *std::max_element(picked.begin(), picked.end());
    if (rep.max_selected > k) throw NumericalError("simulate: budget exceeded");
    rep.mean = pairwise_sum(rewards.data(), rewards.size()) / static_cast<double>(opt.reps);
    std::vector<double> dev(rewards.size());
    for (std::size_t i = 0; i < rewards.size(); ++i) dev[i] = (rewards[i] - rep.mean) * (rewards[i] - rep.mean);
    const double var = opt.reps > 1 ? pairwise_sum(dev.data(), dev.size()) / static_cast<double>(opt.reps - 1) : 0.0;
    rep.std_error = std::sqrt(var / static_cast<double>(opt.reps));
    rep.opt = opt_offline(n, k, f);
    if (rep.opt > 0.0) {
        rep.ratio = rep.mean / rep.opt;
        rep.ratio_se = rep.std_error / rep.opt;
    }
    if (opt.keep_rewards) rep.rewards = std::move(rewards);
    return rep;
}

RatioEstimate empirical_ratio(const QuantilePolicy& policy, const QuantileFunction& f, int n, int k,
                              const SimOptions& opt) {
    const SimReport r = simulate(policy, f, n, k, opt);
    if (!(r.opt > 0.0)) throw InputError("empirical_ratio: zero benchmark");
    return {r.ratio, r.ratio_se};
}

}  // namespace prophet
