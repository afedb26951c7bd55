#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "prophet/error.hpp"
#include "prophet/special_fn.hpp"

using namespace prophet;
using doctest::Approx;

TEST_CASE("gamma_upper closed values") {
    CHECK(gamma_upper(1, 0.0) == Approx(1.0).epsilon(1e-15));
    CHECK(gamma_upper(1, 1.0) == Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(gamma_upper(3, 2.0) == Approx(10.0 * std::exp(-2.0)).epsilon(1e-14));
    CHECK(gamma_upper(5, 0.0) == Approx(24.0).epsilon(1e-15));
}

TEST_CASE("gamma_upper against quadrature") {
    for (int l : {1, 2, 3, 5, 8})
        for (double x : {0.01, 0.5, 2.0, 7.5, 20.0}) {
            const double ref = oracle::integrate([&](double t) { return std::pow(t, l - 1) * std::exp(-t); }, x,
                                                 x + 200.0);
            CHECK(gamma_upper(l, x) == Approx(ref).epsilon(1e-11));
        }
}

TEST_CASE("gamma recurrence") {
    for (int l = 1; l <= 7; ++l)
        for (double x : {0.0, 0.3, 1.0, 4.0, 12.0, 40.0}) {
            const double lhs = gamma_upper(l + 1, x);
            const double rhs = l * gamma_upper(l, x) + std::pow(x, l) * std::exp(-x);
            CHECK(lhs == Approx(rhs).epsilon(1e-13));
        }
}

TEST_CASE("gamma_upper_inverse") {
    CHECK(gamma_upper_inverse(1, std::exp(-1.0)) == Approx(1.0).epsilon(1e-12));
    CHECK(gamma_upper_inverse(3, 2.0) == Approx(0.0).epsilon(1e-12));
    const double x = oracle::bisect([](double t) { return std::exp(-t) * (1 + t) - 0.5; }, 0.0, 10.0);
    CHECK(gamma_upper_inverse(2, 0.5) == Approx(x).epsilon(1e-11));
    for (int l : {1, 2, 4, 6})
        for (double frac : {1e-12, 1e-6, 0.01, 0.5, 0.999}) {
            const double target = frac * std::tgamma(l);
            CHECK(gamma_upper(l, gamma_upper_inverse(l, target)) == Approx(target).epsilon(1e-9));
        }
    CHECK_THROWS_AS(gamma_upper_inverse(2, 1.5), InputError);
    CHECK_THROWS_AS(gamma_upper_inverse(2, -0.1), InputError);
}

TEST_CASE("gamma_eval keeps both tails accurate") {
    for (int k : {1, 3, 5})
        for (double x : {1e-8, 1e-3, 0.5, 5.0, 30.0}) {
            const detail::GammaEval e = detail::gamma_eval(k, x);
            const double lower = oracle::integrate([&](double t) { return std::pow(t, k - 1) * std::exp(-t); }, 0, x);
            CHECK(e.lower_k == Approx(lower).epsilon(1e-10));
            CHECK(e.upper_k == Approx(gamma_upper(k, x)).epsilon(1e-12));
        }
}

TEST_CASE("g_weight boundary values and small cases") {
    for (int n : {2, 5, 17})
        for (int k = 1; k < n; ++k) {
            GWeightParams p(n, k);
            CHECK(g_weight(p, 0.0) == Approx(n).epsilon(1e-14));
            CHECK(g_weight(p, 1.0) == Approx(0.0));
        }
    GWeightParams p21(2, 1);
    for (double u : {0.0, 0.3, 0.77}) CHECK(g_weight(p21, u) == Approx(2 * (1 - u)).epsilon(1e-14));
    CHECK(g_weight_deriv(p21, 0.3) == Approx(-2.0).epsilon(1e-14));
    CHECK_THROWS_AS(GWeightParams(2, 3), InputError);
    CHECK_THROWS_AS(GWeightParams(3, 0), InputError);
}

TEST_CASE("g_weight matches the binomial tail form") {
    for (int n : {3, 10, 40, 200})
        for (int k : {1, 2, n / 2, n - 1})
            for (double u : {0.001, 0.05, 0.3, 0.5, 0.9}) {
                GWeightParams p(n, k);
                CHECK(g_weight(p, u) == Approx(oracle::g_binomial(n, k, u)).epsilon(1e-10).scale(1e-300));
            }
}

TEST_CASE("g derivative against central differences") {
    for (int n : {3, 8, 30, 80})
        for (int k : {1, 2, n / 2, n - 1})
            for (double u : {0.02, 0.2, 0.5, 0.7, 0.95}) {
                GWeightParams p(n, k);
                const double fd = oracle::g_derivative_fd(n, k, u);
                CHECK(std::abs(g_weight_deriv(p, u) - fd) <= 1e-6 * std::abs(fd));
            }
}

TEST_CASE("g derivative shift identity") {
    for (int n : {2, 5, 11, 50})
        for (int k = 1; k < n; k += std::max(1, n / 5))
            for (double u : {0.01, 0.2, 0.6, 0.95}) {
                GWeightParams a(n + 1, k + 1), b(n, k);
                const double lhs = g_weight_deriv(a, u);
                const double rhs = (n + 1.0) / k * u * g_weight_deriv(b, u);
                CHECK(lhs == Approx(rhs).epsilon(1e-12).scale(1e-300));
            }
}

TEST_CASE("integrals of -g'") {
    GWeightParams p(7, 3);
    CHECK(integral_neg_gprime(p, 0.0, 1.0) == Approx(7.0).epsilon(1e-13));
    CHECK(integral_neg_gprime(p, 0.4, 0.4) == 0.0);
    CHECK(integral_q_neg_gprime(p, 0.4, 0.4) == 0.0);
    GWeightParams p21(2, 1), p32(3, 2);
    CHECK(integral_q_neg_gprime(p21, 0.0, 0.5) ==
          Approx((g_weight(p32, 0.0) - g_weight(p32, 0.5)) / 3.0).epsilon(1e-13));
    for (int n : {4, 12, 60})
        for (int k : {1, 3})
            for (auto [a, b] : {std::pair{0.0, 0.1}, {0.1, 0.35}, {0.3, 1.0}}) {
                GWeightParams q(n, k);
                const double ref1 = oracle::integrate([&](double u) { return -g_weight_deriv(q, u); }, a, b);
                const double ref2 = oracle::integrate([&](double u) { return -u * g_weight_deriv(q, u); }, a, b);
                CHECK(integral_neg_gprime(q, a, b) == Approx(ref1).epsilon(1e-8).scale(1e-12));
                CHECK(integral_q_neg_gprime(q, a, b) == Approx(ref2).epsilon(1e-8).scale(1e-12));
            }
}

TEST_CASE("log_binomial") {
    CHECK(static_cast<double>(log_binomial(10, 3)) == Approx(std::log(120.0)).epsilon(1e-14));
    CHECK(static_cast<double>(log_binomial(5, 0)) == Approx(0.0));
}
