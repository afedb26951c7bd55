#pragma once

#include <vector>

#include "prophet/distributions.hpp"

namespace prophet {

// A[t][l] for t = 1..n+1 and l = 0..k; row 0 is unused so indices match t.
struct DPTable {
    int n = 0;
    int k = 0;
    std::vector<std::vector<double>> A;
    std::vector<std::vector<double>> q;  // optimal acceptance quantile, q[n+1][*] = 0

    double value() const { return A[1][k]; }
};

struct RatioReport {
    double dp_value = 0.0;
    double opt_value = 0.0;
    double ratio = 0.0;
};

DPTable solve_dp(int n, int k, const QuantileFunction& f);

// Stage objective int_0^q f + q A[t+1][l-1] + (1-q) A[t+1][l].
double dp_stage_objective(const DPTable& dp, const QuantileFunction& f, int t, int l, double q);

RatioReport approx_ratio(int n, int k, const QuantileFunction& f);

}  // namespace prophet
