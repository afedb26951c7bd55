#include "prophet/nls_solver.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "prophet/error.hpp"
#include "prophet/special_fn.hpp"

namespace prophet {

namespace {

constexpr long double kInf = std::numeric_limits<long double>::infinity();

void check_k(int k) {
    if (k < 1 || k > kMaxGammaOrder - 1) throw InputError("k must lie in [1, 63]");
}

void check_m(int m) {
    if (m < 4) throw InputError("Euler grid m must be at least 4");
}

// gamma(k+1, x) for each sample of a trajectory; k! once it died.
std::vector<double> lower_next(int k, const Trajectory& tr) {
    std::vector<double> out(tr.neg_log.size());
    const double kfact = static_cast<double>(factorial_ld(k));
    for (std::size_t t = 0; t < out.size(); ++t) {
        const double x = tr.neg_log[t];
        out[t] = std::isinf(x) ? kfact : detail::gamma_eval(k, x).lower_k1;
    }
    return out;
}

// Core Euler loop. With up_lower == nullptr the drive is the constant
// drive_const (top level); otherwise drive_t = ratio * up_lower[t].
Trajectory euler_core(int k, int m, int steps, double drive_const, double ratio,
                      const std::vector<double>* up_lower) {
    const double h = 1.0 / m;
    const double top = static_cast<double>(factorial_ld(k - 1));
    Trajectory tr;
    tr.Y.assign(steps + 1, 0.0);
    tr.neg_log.assign(steps + 1, std::numeric_limits<double>::infinity());
    double upper = top, lower = 0.0, x = 0.0, x_prev = 0.0;
    detail::GammaEval at = detail::gamma_eval(k, 0.0);
    tr.Y[0] = 1.0;
    tr.neg_log[0] = 0.0;
    for (int t = 0; t < steps; ++t) {
        const double drive = up_lower ? ratio * (*up_lower)[t] : drive_const;
        const double inc = at.lower_k1 - drive;
        upper += h * inc;
        lower -= h * inc;
        if (upper <= 0.0) {
            tr.death_index = t + 1;
            return tr;
        }
        if (lower <= 0.0) {
            upper = top;
            lower = 0.0;
            x_prev = x = 0.0;
            at = detail::gamma_eval(k, 0.0);
        } else {
            const double hint = x > 0.0 && x_prev > 0.0 ? 2.0 * x - x_prev : x;
            x_prev = x;
            x = detail::gamma_invert_fast(k, upper, lower, hint, &at);
        }
        tr.neg_log[t + 1] = x;
        tr.Y[t + 1] = std::exp(-x);
    }
    return tr;
}

}  // namespace

double ThetaSolution::sum_theta() const {
    double s = 0.0;
    for (double v : theta) s += v;
    return s;
}

double theta_top_integral(int k, double theta) {
    check_k(k);
    if (!(theta > 0.0 && theta < 1.0 / k)) throw InputError("theta outside (0, 1/k)");
    const long double kfact = factorial_ld(k);
    const long double head = kfact / (static_cast<long double>(k) * theta);
    const long double d_inf = head - kfact;
    auto integrand = [&](double s) {
        if (s <= 0.0) return k == 1 ? static_cast<double>(1.0L / head) : 0.0;
        const long double ls = s;
        const long double num = expl((k - 1) * logl(ls) - ls);
        return static_cast<double>(num / (head - gamma_lower_ld(k + 1, ls)));
    };
    double S = 2.0 * k + 20.0;
    while (static_cast<long double>(gamma_upper(k, S)) > 1e-16L * d_inf) S *= 1.5;
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double cuts[] = {0.0, static_cast<double>(k), 2.0 * k + 4.0, 4.0 * k + 12.0, S};
    double total = 0.0;
    for (int i = 0; i + 1 < 5; ++i) {
        const double a = cuts[i], b = std::min(cuts[i + 1], S);
        if (b <= a) continue;
        total += GK::integrate(integrand, a, b, 15, 1e-15);
    }
    // Tail bound: the integrand is below s^{k-1}e^{-s}/d_inf past S.
    return total + static_cast<double>(gamma_upper_ld(k, S) / d_inf);
}

double solve_theta_top_value(int k, double tol) {
    check_k(k);
    double lo = 0.0, hi = 1.0 / k;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (theta_top_integral(k, mid) < 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

TopLevel solve_theta_top(int k, int m, double tol) {
    check_m(m);
    TopLevel out;
    out.theta = solve_theta_top_value(k, tol);
    out.Y = euler_step_sequence(k, k, out.theta, 0.0, nullptr, m);
    return out;
}

Trajectory euler_step_sequence(int k, int j, double theta_j, double theta_up,
                               const Trajectory* upper, int m, int steps) {
    check_k(k);
    check_m(m);
    if (j < 1 || j > k) throw InputError("level j outside [1, k]");
    if (!(theta_j > 0.0)) throw InputError("theta_j must be positive");
    if (steps < 0 || steps > m) steps = m;
    if (j == k) {
        const double drive = static_cast<double>(factorial_ld(k) / (static_cast<long double>(k) * theta_j));
        return euler_core(k, m, steps, drive, 0.0, nullptr);
    }
    if (!upper || static_cast<int>(upper->neg_log.size()) < steps + 1)
        throw InputError("upper trajectory missing or shorter than the grid");
    const auto up = lower_next(k, *upper);
    return euler_core(k, m, steps, 0.0, theta_up / theta_j, &up);
}

int shooting_index(int m) {
    return m - static_cast<int>(std::ceil(std::sqrt(static_cast<double>(m))));
}

double shoot_theta(int k, int j, double theta_up, const Trajectory& upper, int m, double tol,
                   ShootTarget target) {
    check_k(k);
    check_m(m);
    if (j < 1 || j >= k) throw InputError("shoot_theta needs 1 <= j < k");
    if (!(theta_up > 0.0)) throw InputError("theta_up must be positive");
    const auto up = lower_next(k, upper);
    const double ratio_scale = theta_up;
    double lo = 0.0, hi = theta_up;

    if (target == ShootTarget::death_at_one) {
        // true when the trajectory is exhausted by step m (theta too small)
        auto dies = [&](double th) {
            return euler_core(k, m, m, 0.0, ratio_scale / th, &up).death_index >= 0;
        };
        if (dies(theta_up))
            throw NumericalError("shoot_theta: trajectory dies even at theta_{j+1}");
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (dies(mid) ? lo : hi) = mid;
        }
        return lo > 0.0 ? lo : hi;
    }

    const int idx = shooting_index(m);
    const double band_mid = 1.5 / m;
    auto terminal = [&](double th) {
        const auto tr = euler_core(k, m, idx, 0.0, ratio_scale / th, &up);
        return tr.death_index >= 0 ? 0.0 : tr.Y[idx];
    };
    if (terminal(theta_up) <= 2.0 / m)
        throw NumericalError("shoot_theta: bracket failure at theta_{j+1} (m too small?)");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (terminal(mid) < band_mid ? lo : hi) = mid;
    }
    const double th = 0.5 * (lo + hi);
    const double y = terminal(th);
    if (y < 1.0 / m || y > 2.0 / m)
        throw NumericalError("shoot_theta: terminal sample left the band [1/m, 2/m]");
    return th;
}

ThetaSolution solve_nls_fixed(int k, int m, double theta_tol, ShootTarget target) {
    check_k(k);
    check_m(m);
    ThetaSolution ts;
    ts.k = k;
    ts.grid_m = m;
    ts.theta.assign(k, 0.0);
    ts.levels.resize(k);
    auto top = solve_theta_top(k, m, std::min(theta_tol, 1e-12));
    ts.theta[k - 1] = top.theta;
    ts.levels[k - 1] = std::move(top.Y);
    for (int j = k - 1; j >= 1; --j) {
        const double th = shoot_theta(k, j, ts.theta[j], ts.levels[j], m, theta_tol, target);
        ts.theta[j - 1] = th;
        ts.levels[j - 1] = euler_step_sequence(k, j, th, ts.theta[j], &ts.levels[j], m);
    }
    ts.residual_max.resize(k);
    for (int j = 1; j <= k; ++j) ts.residual_max[j - 1] = euler_residual(ts, j);
    return ts;
}

ThetaSolution solve_nls(int k, const NlsOptions& opt) {
    int m = opt.m;
    while (true) {
        ThetaSolution ts = solve_nls_fixed(k, m, opt.theta_tol, opt.target);
        if (!opt.richardson) return ts;
        const ThetaSolution fine = solve_nls_fixed(k, 2 * m, opt.theta_tol, opt.target);
        ts.check_m = 2 * m;
        ts.check_sum_theta = fine.sum_theta();
        if (std::fabs(ts.sum_theta() - ts.check_sum_theta) <= opt.richardson_tol) return ts;
        if (2 * m > opt.max_m)
            throw NumericalError("solve_nls: sum of theta did not settle up to m = " +
                                 std::to_string(2 * m));
        m *= 2;
    }
}

double euler_residual(const ThetaSolution& ts, int j, double t_max) {
    const int k = ts.k, m = ts.grid_m;
    if (j < 1 || j > k) throw InputError("level j outside [1, k]");
    const Trajectory& tr = ts.levels[j - 1];
    const long double kfact = factorial_ld(k);
    auto phi = [&](int t) {
        const double x = tr.neg_log[t];
        return std::isinf(x) ? 0.0L : gamma_upper_ld(k, static_cast<long double>(x));
    };
    auto lower1 = [&](const Trajectory& z, int t) {
        const double x = z.neg_log[t];
        return std::isinf(x) ? kfact : gamma_lower_ld(k + 1, static_cast<long double>(x));
    };
    const int last = std::min(static_cast<int>(t_max * m), m - 1);
    double worst = 0.0;
    for (int t = 1; t <= last; ++t) {
        if (std::isinf(tr.neg_log[t + 1])) break;
        long double rhs = lower1(tr, t);
        if (j == k)
            rhs -= kfact / (static_cast<long double>(k) * ts.theta[k - 1]);
        else
            rhs -= static_cast<long double>(ts.theta[j]) / ts.theta[j - 1] *
                   lower1(ts.levels[j], t);
        const long double cd = (phi(t + 1) - phi(t - 1)) * m / 2.0L;
        worst = std::max(worst, static_cast<double>(fabsl(cd - rhs)));
    }
    return worst;
}

DerivedConstants derived_constants(const ThetaSolution& ts) {
    const int k = ts.k;
    DerivedConstants dc;
    double max_ratio = 1.0, min_ratio = kInf;
    for (int l = 1; l < k; ++l) {
        const double r = ts.theta[l] / ts.theta[l - 1];
        max_ratio = l == 1 ? r : std::max(max_ratio, r);
        min_ratio = std::min(min_ratio, r);
    }
    // k = 1 has no ratio; the top-level constant 1/(k theta_k) plays its part.
    if (k == 1) min_ratio = 1.0 / ts.theta[0];
    const double kfact = static_cast<double>(factorial_ld(k));
    dc.b_k = 4.0 * kfact * max_ratio;
    dc.c_k = 6.0 * dc.b_k;
    dc.cbar_k = std::pow(k * dc.c_k, 1.0 / k);
    dc.d_k = min_ratio - 1.0;
    dc.d_k_proof = dc.d_k / 4.0;
    dc.B.resize(k);
    for (int l = 1; l <= k; ++l)
        dc.B[l - 1] = (l - 1) * (4.0 * std::pow(dc.c_k, k) + dc.c_k / kfact);
    return dc;
}

Theorem2Bound theorem2_bound(long long n, int k, double sum_theta) {
    if (k < 1) throw InputError("k must be positive");
    if (n <= k + 1) throw InputError("theorem2_bound needs n > k + 1");
    auto factor = [k](double nn) { return 1.0 - 24.0 * k * std::log(nn) * std::log(nn) / nn; };
    Theorem2Bound b;
    const double nd = static_cast<double>(n);
    const double nbar = static_cast<double>(n - k - 1);
    b.theorem_form = factor(nd) * sum_theta;
    b.refined_form = (1.0 - 12.0 * k * std::log(nbar) * std::log(nbar) / nbar) * sum_theta;
    b.vacuous = b.theorem_form <= 0.0;
    // 24k ln(n)^2/n exceeds 1 for every 2 <= n <= 8 and decreases afterwards.
    long long lo = 8, hi = 16;
    while (factor(static_cast<double>(hi)) <= 0.0) hi *= 2;
    while (hi - lo > 1) {
        const long long mid = lo + (hi - lo) / 2;
        if (factor(static_cast<double>(mid)) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    b.first_positive_n = std::max<long long>(hi, k + 2);
    return b;
}

std::string theta_trajectory_csv(const ThetaSolution& ts, int stride) {
    if (stride < 1) stride = 1;
    std::ostringstream os;
    os.precision(17);
    os << "t";
    for (int j = 1; j <= ts.k; ++j) os << ",Y_" << j;
    os << "\n";
    auto row = [&](int t) {
        os << static_cast<double>(t) / ts.grid_m;
        for (int j = 0; j < ts.k; ++j) {
            const auto& y = ts.levels[j].Y;
            os << "," << (t < static_cast<int>(y.size()) ? y[t] : 0.0);
        }
        os << "\n";
    };
    for (int t = 0; t <= ts.grid_m; t += stride) row(t);
    if (ts.grid_m % stride != 0) row(ts.grid_m);
    return os.str();
}

}  // namespace prophet
