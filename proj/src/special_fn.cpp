#include "prophet/special_fn.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "prophet/error.hpp"

namespace prophet {

namespace {

constexpr int kFactTable = kMaxGammaOrder + 2;

const std::array<long double, kFactTable>& fact_table() {
    static const auto table = [] {
        std::array<long double, kFactTable> t{};
        t[0] = 1.0L;
        for (int i = 1; i < kFactTable; ++i) t[i] = t[i - 1] * static_cast<long double>(i);
        return t;
    }();
    return table;
}

void check_order(int l) {
    if (l < 1 || l > kMaxGammaOrder + 1)
        throw InputError("gamma order " + std::to_string(l) + " outside [1, " +
                         std::to_string(kMaxGammaOrder + 1) + "]");
}

// Neumaier summation.
struct CompensatedSum {
    long double s = 0.0L, c = 0.0L;
    void add(long double v) {
        long double t = s + v;
        if (fabsl(s) >= fabsl(v))
            c += (s - t) + v;
        else
            c += (v - t) + s;
        s = t;
    }
    long double value() const { return s + c; }
};

// x^{l-1} e^{-x}, the magnitude of the derivative of Gamma_l.
long double gamma_density(int l, long double x) {
    if (x <= 0.0L) return l == 1 ? 1.0L : 0.0L;
    return expl(static_cast<long double>(l - 1) * logl(x) - x);
}

}  // namespace

long double factorial_ld(int m) {
    if (m < 0 || m >= kFactTable) throw InputError("factorial argument out of range");
    return fact_table()[m];
}

long double gamma_upper_ld(int l, long double x) {
    check_order(l);
    if (!(x >= 0.0L)) throw InputError("gamma_upper: x must be non-negative");
    if (std::isinf(x)) return 0.0L;
    CompensatedSum sum;
    if (x < 10000.0L) {
        long double term = expl(-x);
        sum.add(term);
        for (int r = 1; r < l; ++r) {
            term *= x / static_cast<long double>(r);
            sum.add(term);
        }
    } else {
        const long double lx = logl(x);
        for (int r = 0; r < l; ++r) sum.add(expl(r * lx - lgammal(r + 1.0L) - x));
    }
    return fact_table()[l - 1] * sum.value();
}

double gamma_upper(int l, double x) {
    return static_cast<double>(gamma_upper_ld(l, static_cast<long double>(x)));
}

long double gamma_lower_ld(int l, long double x) {
    check_order(l);
    if (!(x >= 0.0L)) throw InputError("gamma_lower: x must be non-negative");
    if (x == 0.0L) return 0.0L;
    if (x >= static_cast<long double>(l) - 0.5L) return fact_table()[l - 1] - gamma_upper_ld(l, x);
    // (l-1)! e^{-x} sum_{r>=l} x^r / r!
    long double term = expl(static_cast<long double>(l) * logl(x) - x - lgammal(l + 1.0L));
    CompensatedSum sum;
    for (int i = 0; i < 2000; ++i) {
        sum.add(term);
        term *= x / static_cast<long double>(l + i + 1);
        if (term <= sum.value() * 1e-22L) break;
    }
    return fact_table()[l - 1] * sum.value();
}

long double gamma_invert_split(int l, long double upper, long double lower, long double hint) {
    check_order(l);
    if (upper <= 0.0L) return std::numeric_limits<long double>::infinity();
    if (lower <= 0.0L) return 0.0L;
    const bool use_lower = lower <= upper;
    const long double log_target = logl(use_lower ? lower : upper);

    // r(x) is increasing in x and vanishes at the root.
    auto residual = [&](long double x, long double& slope) {
        const long double dens = gamma_density(l, x);
        if (use_lower) {
            const long double g = gamma_lower_ld(l, x);
            if (g <= 0.0L) {
                slope = std::numeric_limits<long double>::infinity();
                return -std::numeric_limits<long double>::infinity();
            }
            slope = dens / g;
            return logl(g) - log_target;
        }
        const long double g = gamma_upper_ld(l, x);
        if (g <= 0.0L) {
            slope = 1.0L;
            return std::numeric_limits<long double>::infinity();
        }
        slope = dens / g;
        return log_target - logl(g);
    };

    long double lo = 0.0L, hi = 1.0L, slope = 0.0L;
    while (residual(hi, slope) < 0.0L) {
        lo = hi;
        hi *= 2.0L;
        if (hi > 1e6L) throw NumericalError("gamma inverse: bracket failure");
    }
    long double x = hint;
    if (!(x > lo && x < hi)) {
        x = use_lower ? powl(static_cast<long double>(l) * lower, 1.0L / l) : 0.5L * (lo + hi);
        if (!(x > lo && x < hi)) x = 0.5L * (lo + hi);
    }
    for (int it = 0; it < 300; ++it) {
        const long double r = residual(x, slope);
        if (r == 0.0L) return x;
        if (r < 0.0L)
            lo = x;
        else
            hi = x;
        long double next = x - r / slope;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5L * (lo + hi);
        if (fabsl(next - x) <= 4.0L * std::numeric_limits<long double>::epsilon() * x ||
            hi - lo <= 4.0L * std::numeric_limits<long double>::epsilon() * hi)
            return next;
        x = next;
    }
    throw NumericalError("gamma inverse: no convergence");
}

double gamma_upper_inverse(int l, double target, double tol_abs) {
    check_order(l);
    const long double top = fact_table()[l - 1];
    if (!(target > 0.0) || static_cast<long double>(target) > top)
        throw InputError("gamma_upper_inverse: target outside (0, (l-1)!]");
    const long double t = target;
    const long double x = gamma_invert_split(l, t, top - t, -1.0L);
    const double xd = static_cast<double>(x);
    if (std::fabs(gamma_upper(l, xd) - target) > tol_abs &&
        fabsl(gamma_upper_ld(l, x) - t) > tol_abs)
        throw NumericalError("gamma_upper_inverse: tolerance not met");
    return xd;
}

long double log_binomial(std::int64_t n, std::int64_t i) {
    if (i < 0 || i > n) return -std::numeric_limits<long double>::infinity();
    if (i > n - i) i = n - i;
    if (i <= 64) {
        long double prod = 1.0L;
        for (std::int64_t r = 0; r < i; ++r)
            prod *= static_cast<long double>(n - r) / static_cast<long double>(r + 1);
        return logl(prod);
    }
    return lgammal(n + 1.0L) - lgammal(i + 1.0L) - lgammal(static_cast<long double>(n - i) + 1.0L);
}

GWeightParams::GWeightParams(int n_, int k_) : n(n_), k(k_) {
    if (n < 1 || k < 1 || k > n)
        throw InputError("g weight needs 1 <= k <= n (got n=" + std::to_string(n) +
                         ", k=" + std::to_string(k) + ")");
}

namespace {

void check_unit(double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw InputError("g weight: u outside [0,1]");
}

// a * log(base) with 0 * log(0) = 0.
long double xlogy(long double a, long double logbase) { return a == 0.0L ? 0.0L : a * logbase; }

}  // namespace

double g_weight(const GWeightParams& p, double u) {
    check_unit(u);
    const long double lu = u > 0.0 ? logl(static_cast<long double>(u))
                                   : -std::numeric_limits<long double>::infinity();
    const long double l1u = u < 1.0 ? log1pl(-static_cast<long double>(u))
                                    : -std::numeric_limits<long double>::infinity();
    long double sum = 0.0L;
    for (int j = p.n - p.k + 1; j <= p.n; ++j) {
        const long double a = j - 1, b = p.n - j;
        const long double lg = logl(static_cast<long double>(j)) + log_binomial(p.n, p.n - j) +
                               xlogy(a, l1u) + xlogy(b, lu);
        sum += expl(lg);
    }
    return static_cast<double>(sum);
}

double g_weight_deriv(const GWeightParams& p, double u) {
    check_unit(u);
    if (p.k == p.n) return 0.0;
    const long double lu = u > 0.0 ? logl(static_cast<long double>(u))
                                   : -std::numeric_limits<long double>::infinity();
    const long double l1u = u < 1.0 ? log1pl(-static_cast<long double>(u))
                                    : -std::numeric_limits<long double>::infinity();
    const long double c = static_cast<long double>(p.n - p.k + 1) * (p.n - p.k);
    const long double lg = log_binomial(p.n, p.k - 1) + xlogy(p.n - p.k - 1.0L, l1u) +
                           xlogy(p.k - 1.0L, lu);
    return static_cast<double>(-c * expl(lg));
}

double integral_neg_gprime(const GWeightParams& p, double a, double b) {
    check_unit(a);
    check_unit(b);
    if (a > b) throw InputError("integral_neg_gprime: a > b");
    if (a == b) return 0.0;
    return g_weight(p, a) - g_weight(p, b);
}

double integral_q_neg_gprime(const GWeightParams& p, double a, double b) {
    check_unit(a);
    check_unit(b);
    if (a > b) throw InputError("integral_q_neg_gprime: a > b");
    if (a == b) return 0.0;
    const GWeightParams up(p.n + 1, p.k + 1);
    return static_cast<double>(p.k) / (p.n + 1.0) * (g_weight(up, a) - g_weight(up, b));
}

}  // namespace prophet

namespace prophet::detail {

namespace {

const std::array<double, kFactTable>& log_fact_table() {
    static const auto table = [] {
        std::array<double, kFactTable> t{};
        for (int i = 0; i < kFactTable; ++i) t[i] = static_cast<double>(logl(fact_table()[i]));
        return t;
    }();
    return table;
}

}  // namespace

GammaEval gamma_eval(int k, double x) {
    const auto& lf = log_fact_table();
    const double fk1 = static_cast<double>(fact_table()[k - 1]);
    const double fk = static_cast<double>(fact_table()[k]);
    GammaEval e{};
    if (x <= 0.0) {
        e.upper_k = fk1;
        e.lower_k = 0.0;
        e.lower_k1 = 0.0;
        e.density = k == 1 ? 1.0 : 0.0;
        return e;
    }
    const double lx = std::log(x);
    if (x < k - 0.5) {
        // tail series sum_{r>=k} e^{-x} x^r / r!
        const double first = std::exp(k * lx - x - lf[k]);
        double term = first, tail = 0.0, comp = 0.0;
        for (int r = k + 1; r < k + 4000; ++r) {
            term *= x / r;
            const double y = term - comp;
            const double t = tail + y;
            comp = (t - tail) - y;
            tail = t;
            if (term <= tail * 1e-18) break;
        }
        e.lower_k1 = fk * tail;
        e.lower_k = fk1 * (first + tail);
        e.upper_k = fk1 - e.lower_k;
        e.density = std::exp((k - 1) * lx - x);
        return e;
    }
    // head series sum_{r<=k} e^{-x} x^r / r!
    double head = 0.0, last = 0.0, prev = 0.0;
    for (int r = 0; r <= k; ++r) {
        const double term = std::exp(r * lx - x - lf[r]);
        if (r == k - 1) prev = term;
        if (r < k) head += term;
        last = term;
    }
    e.upper_k = fk1 * head;
    e.lower_k = fk1 - e.upper_k;
    e.lower_k1 = fk - fk * (head + last);
    e.density = fk1 * prev;
    return e;
}

double gamma_invert_fast(int k, double upper, double lower, double hint, GammaEval* at) {
    if (upper <= 0.0) return std::numeric_limits<double>::infinity();
    if (lower <= 0.0) {
        if (at) *at = gamma_eval(k, 0.0);
        return 0.0;
    }
    const bool use_lower = lower <= upper;
    const double log_target = std::log(use_lower ? lower : upper);
    double x = hint > 0.0 ? hint : std::pow(k * lower, 1.0 / k);
    if (!(x > 0.0) || !std::isfinite(x)) x = 1.0;
    GammaEval e{};
    for (int it = 0; it < 60; ++it) {
        e = gamma_eval(k, x);
        double step;
        if (use_lower) {
            // Newton in log x on ln(lower_k(x)) = ln(lower)
            if (e.lower_k <= 0.0) {
                x *= 2.0;
                continue;
            }
            const double r = std::log(e.lower_k) - log_target;
            const double slope = x * e.density / e.lower_k;
            step = r / slope;
            step = std::clamp(step, -2.0, 2.0);
            if (std::fabs(step) < 1e-15) {
                if (at) *at = e;
                return x;
            }
            x *= std::exp(-step);
        } else {
            if (e.upper_k <= 0.0) {
                x *= 0.5;
                continue;
            }
            const double r = log_target - std::log(e.upper_k);
            const double slope = e.density / e.upper_k;
            step = r / slope;
            step = std::clamp(step, -0.5 * x, 4.0);
            if (std::fabs(step) < 1e-15 * x) {
                if (at) *at = e;
                return x;
            }
            x -= step;
        }
    }
    // Fall back to the bracketed extended-precision solver.
    x = static_cast<double>(gamma_invert_split(k, upper, lower, x));
    if (at) *at = gamma_eval(k, x);
    return x;
}

}  // namespace prophet::detail
