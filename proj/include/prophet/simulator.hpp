#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prophet/distributions.hpp"

namespace prophet {

struct DPTable;

// Accept a value with quantile u at time t with l picks left iff u <= q[t][l].
struct QuantilePolicy {
    int n = 0;
    int k = 0;
    std::vector<std::vector<double>> q;  // q[t][l], t = 1..n, l = 0..k
    std::string provenance = "custom";   // dp | nls-derived | reduction | custom

    void validate() const;
};

QuantilePolicy policy_from_dp(const DPTable& dp);
QuantilePolicy constant_policy(int n, int k, double q);

struct SimOptions {
    long reps = 100000;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 means hardware concurrency
    bool keep_rewards = false;
};

struct SimReport {
    long reps = 0;
    std::uint64_t seed = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double opt = 0.0;
    double ratio = 0.0;
    double ratio_se = 0.0;
    int max_selected = 0;
    std::vector<double> rewards;  // per replicate, when requested
};

// Uniform in (0,1) from the counter (seed, replicate, draw).
double counter_uniform(std::uint64_t seed, std::uint64_t rep, std::uint64_t draw);

SimReport simulate(const QuantilePolicy& policy, const QuantileFunction& f, int n, int k,
                   const SimOptions& opt = {});

struct RatioEstimate {
    double ratio = 0.0;
    double std_error = 0.0;
};
RatioEstimate empirical_ratio(const QuantilePolicy& policy, const QuantileFunction& f, int n, int k,
                              const SimOptions& opt = {});

// Order-independent sum used for replicate aggregation.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace prophet
