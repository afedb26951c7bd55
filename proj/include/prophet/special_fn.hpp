#pragma once

#include <cstdint>

namespace prophet {

inline constexpr int kMaxGammaOrder = 64;

// (l-1)! in extended precision, 1 <= l <= kMaxGammaOrder + 1.
long double factorial_ld(int l_minus_1);

// Upper incomplete gamma of integer order: (l-1)! e^{-x} sum_{r<l} x^r/r!.
double gamma_upper(int l, double x);
long double gamma_upper_ld(int l, long double x);

// Lower incomplete gamma (l-1)! - Gamma_l(x), accurate for small x.
long double gamma_lower_ld(int l, long double x);

// x >= 0 with |Gamma_l(x) - target| <= tol_abs.
double gamma_upper_inverse(int l, double target, double tol_abs = 1e-12);

// Solves Gamma_l(x) = upper, where lower = (l-1)! - upper is carried
// separately so either side is known to full relative precision.
// `hint` is any starting point; returns x >= 0.
long double gamma_invert_split(int l, long double upper, long double lower, long double hint);

struct GWeightParams {
    int n;
    int k;
    GWeightParams(int n, int k);
    // n - k - 1; only meaningful when n > k + 1.
    int nbar() const { return n - k - 1; }
};

// g_{n,k}(u) = sum_{j=n-k+1}^{n} j C(n,j) (1-u)^{j-1} u^{n-j}
double g_weight(const GWeightParams& p, double u);
double g_weight_deriv(const GWeightParams& p, double u);

// int_a^b -g'(q) dq and int_a^b q (-g'(q)) dq, closed forms.
double integral_neg_gprime(const GWeightParams& p, double a, double b);
double integral_q_neg_gprime(const GWeightParams& p, double a, double b);

// log C(n, i); exact products for small i, lgamma otherwise.
long double log_binomial(std::int64_t n, std::int64_t i);

}  // namespace prophet

namespace prophet::detail {

// Everything the Euler iterate needs about Gamma_k at one point, in double.
struct GammaEval {
    double upper_k;   // Gamma_k(x)
    double lower_k;   // (k-1)! - Gamma_k(x)
    double lower_k1;  // k! - Gamma_{k+1}(x)
    double density;   // x^{k-1} e^{-x}
};

GammaEval gamma_eval(int k, double x);

// Solves Gamma_k(x) = upper with lower = (k-1)! - upper carried separately.
// Writes the evaluation at the returned point to *at.
double gamma_invert_fast(int k, double upper, double lower, double hint, GammaEval* at);

}  // namespace prophet::detail
