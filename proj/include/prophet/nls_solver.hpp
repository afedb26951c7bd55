#pragma once

#include <string>
#include <vector>

namespace prophet {

// One level of the Euler iterate on the grid t = 0, 1/m, ..., 1.
struct Trajectory {
    std::vector<double> Y;        // Y(t/m)
    std::vector<double> neg_log;  // -ln Y(t/m); +inf once the trajectory died
    int death_index = -1;         // first index with Y = 0, or -1
};

struct ThetaSolution {
    int k = 0;
    int grid_m = 0;
    std::vector<double> theta;        // theta_1..theta_k (index 0 is level 1)
    std::vector<Trajectory> levels;   // levels[j-1] holds Y_j
    std::vector<double> residual_max; // per equation, see euler_residual
    // Richardson diagnostics; zero when the check was skipped.
    int check_m = 0;
    double check_sum_theta = 0.0;

    double sum_theta() const;
};

struct DerivedConstants {
    double b_k = 0.0;
    double c_k = 0.0;
    double cbar_k = 0.0;
    double d_k = 0.0;        // min_l theta_{l+1}/theta_l - 1
    double d_k_proof = 0.0;  // d_k / 4, the constant the lower-bound argument uses
    std::vector<double> B;   // B_1..B_k
};

// Terminal condition for the lower levels.
//   death_at_one: Gamma_k(-ln y_{m,j,m}) = 0, i.e. the trajectory is exhausted
//                 exactly at the last grid step.
//   sqrt_band:    y_{m,j,m-ceil(sqrt m)} in [1/m, 2/m].
enum class ShootTarget { death_at_one, sqrt_band };

struct NlsOptions {
    int m = 200000;
    double theta_tol = 1e-10;
    double richardson_tol = 1e-3;
    bool richardson = true;
    int max_m = 3200000;
    ShootTarget target = ShootTarget::death_at_one;
};

// 1 = int_0^inf s^{k-1} e^{-s} / (k!/(k theta) - gamma(k+1, s)) ds, solved for
// theta in (0, 1/k). Returns theta_k only.
double solve_theta_top_value(int k, double tol = 1e-12);

// Left side of the integral equation evaluated at theta.
double theta_top_integral(int k, double theta);

struct TopLevel {
    double theta;
    Trajectory Y;
};
TopLevel solve_theta_top(int k, int m, double tol = 1e-12);

// Euler iterate for level j (1-based) of NLS_k. For j = k, upper is ignored and
// the constant k!/(k theta_j) drives the update. Stops after `steps` updates
// (default m) or when the trajectory dies.
Trajectory euler_step_sequence(int k, int j, double theta_j, double theta_up,
                               const Trajectory* upper, int m, int steps = -1);

// Bisection on theta_j in (0, theta_up); the trajectory grows with theta_j.
// For sqrt_band the bisection aims at the band midpoint 1.5/m.
double shoot_theta(int k, int j, double theta_up, const Trajectory& upper, int m,
                   double tol = 1e-10, ShootTarget target = ShootTarget::death_at_one);

// Index of the terminal sample used by shoot_theta.
int shooting_index(int m);

// Single solve at grid m (no Richardson check).
ThetaSolution solve_nls_fixed(int k, int m, double theta_tol = 1e-10,
                              ShootTarget target = ShootTarget::death_at_one);

// Solve at opt.m and, when requested, at 2m; doubles m until the two sums agree.
ThetaSolution solve_nls(int k, const NlsOptions& opt = {});

// max over grid points with t/m in (0, t_max] of the centred-difference defect
// |(phi_{t+1} - phi_{t-1})/(2/m) - R_t| of level j, where R_t is the
// right-hand side of the level-j equation.
double euler_residual(const ThetaSolution& ts, int j, double t_max = 0.9);

DerivedConstants derived_constants(const ThetaSolution& ts);

struct Theorem2Bound {
    double theorem_form;  // (1 - 24 k ln(n)^2 / n) sum theta
    double refined_form;  // (1 - 12 k ln(nbar)^2 / nbar) sum theta
    bool vacuous;         // theorem_form <= 0
    long long first_positive_n;  // smallest n with a positive theorem factor
};
Theorem2Bound theorem2_bound(long long n, int k, double sum_theta);

// CSV with header t,Y_1,...,Y_k; every `stride`-th grid point plus the last.
std::string theta_trajectory_csv(const ThetaSolution& ts, int stride = 1);

}  // namespace prophet
