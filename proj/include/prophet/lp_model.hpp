#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "prophet/distributions.hpp"

namespace prophet {

enum class RowSense { ge, le, eq };

struct LinearRow {
    std::string name;
    std::vector<std::pair<int, double>> terms;
    RowSense sense = RowSense::ge;
    double rhs = 0.0;
};

// minimize objective . x subject to rows, x >= 0
struct LinearProgram {
    std::vector<std::string> vars;
    std::vector<double> objective;
    std::vector<LinearRow> rows;
};

enum class SimplexStatus { optimal, unbounded, infeasible, iteration_limit };
const char* to_string(SimplexStatus s);

struct SimplexOptions {
    long max_iterations = 500000;
    double tol = 1e-9;
    int bland_after = 30;  // consecutive degenerate pivots before switching to Bland's rule
    double perturb = 1e-7;  // relative rhs jitter against degeneracy, removed before returning
};

struct SimplexResult {
    SimplexStatus status = SimplexStatus::iteration_limit;
    double value = 0.0;
    std::vector<double> x;
    long iterations = 0;
    double max_residual = 0.0;  // worst row violation against the original data
};

// Dense two-phase tableau simplex.
SimplexResult simplex_solve(const LinearProgram& lp, const SimplexOptions& opt = {});

void write_lp(const LinearProgram& lp, std::ostream& out, const std::string& comment = "");
LinearProgram parse_lp(std::istream& in);

struct DiscretizedPrimal {
    int n = 0;
    int k = 0;
    int M = 0;
    std::vector<double> grid;     // u_0..u_M
    std::vector<double> weights;  // benchmark weights w_i, sum_i w_i f_i = OPT for grid-linear f

    int f_index(int i) const { return i; }
    int d_index(int t, int l) const { return M + 1 + (t - 1) * (k + 1) + l; }
    int num_vars() const { return (M + 1) + (n + 1) * (k + 1); }
    std::int64_t num_rows() const {
        return static_cast<std::int64_t>(n) * k * (M + 1) + 1 + M;
    }

    LinearRow budget_row(int t, int l, int j) const;
    LinearRow benchmark_row() const;
    LinearRow monotone_row(int i) const;
    std::vector<std::string> var_names() const;
    LinearProgram to_linear_program() const;
};

DiscretizedPrimal build_primal(int n, int k, int M, std::int64_t row_cap = 2000000);

struct PrimalSolution {
    SimplexStatus status = SimplexStatus::iteration_limit;
    double value = 0.0;
    std::vector<double> f;
    std::vector<std::vector<double>> d;  // d[t][l], t = 1..n+1
    long iterations = 0;
    int rounds = 0;
    int working_rows = 0;
    double max_violation = 0.0;  // over every grid row of the full model
};

// Row generation over the budget rows; monotonicity is built in through f_i = sum_{j>=i} delta_j.
PrimalSolution solve_primal(const DiscretizedPrimal& p, const SimplexOptions& opt = {});

// Largest violation of the full model at (f, d).
double primal_violation(const DiscretizedPrimal& p, const std::vector<double>& f,
                        const std::vector<std::vector<double>>& d);

void export_lp(const DiscretizedPrimal& p, const std::string& path);

struct GammaEstimate {
    int n = 0, k = 0, M = 0;
    PrimalSolution coarse;  // at M
    PrimalSolution fine;    // at 2M
    double gap() const { return fine.value - coarse.value; }
};
GammaEstimate estimate_gamma(int n, int k, int M, const SimplexOptions& opt = {});

// Normalized random instances that are linear on the grid of p.
std::vector<QuantileFunction> sample_grid_instances(const DiscretizedPrimal& p, int count,
                                                    std::uint64_t seed);

struct Theorem1Case {
    double lp_value = 0.0;
    double dp_value = 0.0;
    bool pass = false;
};

struct Theorem1Report {
    int n = 0, k = 0, M = 0;
    double tol = 0.0;
    double lp_value = 0.0;
    std::vector<Theorem1Case> cases;  // LP value <= A_{1,k}(F) + tol
    bool lower_pass = false;
    double reconstructed_dp = 0.0;    // A_{1,k}(G) for G built from f*
    double reconstructed_opt = 0.0;
    bool reconstructed_pass = false;  // d*_{1,k} >= A_{1,k}(G) - tol
    bool pass() const { return lower_pass && reconstructed_pass; }
};

Theorem1Report verify_theorem1(int n, int k, int M, const std::vector<QuantileFunction>& instances,
                               double tol = 1e-4, const SimplexOptions& opt = {});

}  // namespace prophet
