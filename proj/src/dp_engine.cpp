#include "prophet/dp_engine.hpp"

#include "prophet/error.hpp"

namespace prophet {

DPTable solve_dp(int n, int k, const QuantileFunction& f) {
    detail::require(n >= 1 && k >= 1 && k <= n, "dp needs 1 <= k <= n");
    DPTable dp;
    dp.n = n;
    dp.k = k;
    dp.A.assign(n + 2, std::vector<double>(k + 1, 0.0));
    dp.q.assign(n + 2, std::vector<double>(k + 1, 0.0));
    for (int t = n; t >= 1; --t) {
        const auto& next = dp.A[t + 1];
        for (int l = 1; l <= k; ++l) {
            // first-order condition f(q) = A[t+1][l] - A[t+1][l-1]; left end of the root set
            const double c = next[l] - next[l - 1];
            const double q = f.prob_greater(c);
            dp.q[t][l] = q;
            dp.A[t][l] = f.partial_mass(q) - q * c + next[l];
        }
    }
    return dp;
}

double dp_stage_objective(const DPTable& dp, const QuantileFunction& f, int t, int l, double q) {
    detail::require(t >= 1 && t <= dp.n && l >= 1 && l <= dp.k, "stage index out of range");
    const auto& next = dp.A[t + 1];
    return f.partial_mass(q) + q * next[l - 1] + (1.0 - q) * next[l];
}

RatioReport approx_ratio(int n, int k, const QuantileFunction& f) {
    RatioReport r;
    r.dp_value = solve_dp(n, k, f).value();
    r.opt_value = opt_offline(n, k, f);
    if (!(r.opt_value > 0.0)) throw InputError("approx_ratio: zero benchmark");
    r.ratio = r.dp_value / r.opt_value;
    return r;
}

}  // namespace prophet
