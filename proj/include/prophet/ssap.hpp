#pragma once

#include <cstdint>
#include <vector>

#include "prophet/distributions.hpp"
#include "prophet/simulator.hpp"

namespace prophet {

// mu[t][i] for 1 <= t <= n+1 and 0 <= i <= t: with t-1 periods left, the expected
// value that ends up matched to the i-th smallest remaining reward.
// mu[t][0] = 0 and mu[t][t] = +inf.
struct SSAPThresholds {
    int n = 0;
    std::vector<std::vector<double>> mu;

    double at(int i, int t) const { return mu[t][i]; }
};

struct SSAPInstance {
    std::vector<double> rewards;  // sorted non-decreasing, length n
    QuantileFunction f;
};

SSAPThresholds solve_thresholds(int n, const QuantileFunction& f);

double optimal_value(const SSAPThresholds& th, const std::vector<double>& rewards);
double optimal_value(const SSAPInstance& inst);

// Interval policy: with `remaining` rewards (sorted) left, a value x gets the
// 1-based index i with mu[remaining][i-1] < x <= mu[remaining][i].
int assign_index(const SSAPThresholds& th, int remaining, double x);

// Rewards eps*i for i <= n-k and 1 afterwards; select when the SSAP policy assigns a 1.
struct ReductionPolicy {
    int n = 0;
    int k = 0;
    double eps = 0.0;
    std::vector<double> rewards;
    SSAPThresholds thresholds;

    // remaining ones l out of `remaining` rewards; true when x would receive a 1
    bool select(int remaining, int ones_left, double x) const;
    QuantilePolicy quantile_policy(const QuantileFunction& f) const;
};

ReductionPolicy reduction_policy(int n, int k, const QuantileFunction& f, double eps = -1.0);

// E[X_(t)], the t-th smallest of n draws, for t = 1..n (index 0 unused)
std::vector<double> order_statistic_means(int n, const QuantileFunction& f);

struct AlphaReport {
    int n = 0;
    std::vector<double> gamma_hat;  // gamma_hat[k] = min over the family of the dp ratio, k = 1..n
    double min_gamma = 1.0;
    int argmin_k = 1;
    double alpha_hat = 1.0;  // min SSAP ratio over family x rewards
    long instances = 0;
    double worst_decomposition_gap = 0.0;  // min over instances of ratio - min_tau bound
    double worst_tail_gap = 0.0;           // min over tau of sum_{t>=tau} mu - gamma_hat * OPT
    double max_tail_identity_error = 0.0;  // |sum_{t>=tau} mu - A_{1,n-tau+1}|
    bool decomposition_ok = false;
    bool tail_ok = false;
};

// Vertex vectors (0,..,0,1,..,1) for every tau, then `random_count` random sorted vectors.
std::vector<std::vector<double>> reward_family(int n, int random_count, std::uint64_t seed);

AlphaReport alpha_ratio(int n, const std::vector<QuantileFunction>& family,
                        const std::vector<std::vector<double>>& rewards, double tol = 1e-9);

}  // namespace prophet
