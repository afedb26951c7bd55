#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "prophet/dp_engine.hpp"
#include "prophet/error.hpp"
#include "prophet/ssap.hpp"

using namespace prophet;
using doctest::Approx;

namespace {

// values sorted decreasing, probs summing to 1
QuantileFunction atomic(const oracle::Discrete& d) {
    std::vector<double> grid{0.0}, vals{d.values[0]};
    double c = 0.0;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        c += d.probs[i];
        grid.push_back(i + 1 == d.values.size() ? 1.0 : c);
        vals.push_back(d.values[i]);
    }
    return QuantileFunction(grid, vals, Interp::constant);
}

std::vector<double> sorted_random(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> r(n);
    for (auto& x : r) x = U(rng);
    std::sort(r.begin(), r.end());
    return r;
}

}  // namespace

TEST_CASE("thresholds small cases") {
    const SSAPThresholds one = solve_thresholds(1, uniform01());
    CHECK(one.at(1, 2) == Approx(0.5));
    const SSAPThresholds two = solve_thresholds(2, uniform01());
    CHECK(two.at(2, 3) == Approx(0.625).epsilon(1e-12));
    CHECK(two.at(1, 3) == Approx(0.375).epsilon(1e-12));
    CHECK(two.at(2, 3) == Approx(solve_dp(2, 1, uniform01()).value()).epsilon(1e-12));
    CHECK(std::isinf(two.at(2, 2)));
    CHECK(two.at(0, 3) == 0.0);
}

TEST_CASE("threshold column sums") {
    const QuantileFunction fs[] = {uniform01(), exponential(1.0), two_piece(25.0, 0.4)};
    for (const auto& f : fs) {
        const SSAPThresholds th = solve_thresholds(6, f);
        for (int t = 1; t <= 6; ++t) {
            double s = 0.0;
            for (int i = 1; i <= t; ++i) s += th.at(i, t + 1);
            CHECK(s == Approx(t * f.mean()).epsilon(1e-6));
        }
    }
}

TEST_CASE("optimal value special rewards") {
    const QuantileFunction e = exponential(1.0);
    const SSAPThresholds th = solve_thresholds(4, e);
    CHECK(optimal_value(th, {0, 0, 0, 1}) == Approx(solve_dp(4, 1, e).value()).epsilon(1e-9));
    CHECK(optimal_value(th, {0, 0, 1, 1}) == Approx(solve_dp(4, 2, e).value()).epsilon(1e-9));
    CHECK(optimal_value(th, {1, 1, 1, 1}) == Approx(4 * e.mean()).epsilon(1e-9));
    CHECK(optimal_value(solve_thresholds(2, uniform01()), {0, 1}) == Approx(0.625).epsilon(1e-12));
    CHECK(optimal_value(SSAPInstance{{0.0, 1.0}, uniform01()}) == Approx(0.625).epsilon(1e-12));
    CHECK_THROWS_AS(optimal_value(th, {1, 0, 0, 0}), InputError);
    CHECK_THROWS_AS(optimal_value(th, {0, 1}), InputError);
}

TEST_CASE("brute-force policy search agrees") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.05, 1.0);
    int trials = 0;
    for (int n : {2, 3})
        for (int s : {2, 3, 4})
            for (int rep = 0; rep < (n == 3 && s == 4 ? 2 : 4); ++rep) {
                oracle::Discrete d;
                double tot = 0.0;
                for (int i = 0; i < s; ++i) d.probs.push_back(U(rng)), tot += d.probs.back();
                for (auto& p : d.probs) p /= tot;
                for (int i = 0; i < s; ++i) d.values.push_back(U(rng) * 10);
                std::sort(d.values.begin(), d.values.end(), std::greater<>());
                const std::vector<double> r = sorted_random(n, rng);
                const double bf = oracle::ssap_bruteforce(d, r);
                const double v = optimal_value(solve_thresholds(n, atomic(d)), r);
                CHECK(std::abs(bf - v) < 1e-6);
                ++trials;
            }
    CHECK(trials == 22);
}

TEST_CASE("assign_index intervals") {
    const SSAPThresholds th = solve_thresholds(2, uniform01());
    CHECK(assign_index(th, 2, 0.2) == 1);
    CHECK(assign_index(th, 2, 0.9) == 2);
    CHECK(assign_index(th, 1, 0.9) == 1);
}

TEST_CASE("ratio is no worse than the worst k-selection ratio") {
    std::mt19937_64 rng(17);
    const QuantileFunction fs[] = {uniform01(), exponential(1.0), two_piece(60.0, 0.3)};
    for (int n : {3, 4})
        for (const auto& f : fs) {
            double gmin = 1.0;
            for (int k = 1; k <= n; ++k) gmin = std::min(gmin, approx_ratio(n, k, f).ratio);
            const SSAPThresholds th = solve_thresholds(n, f);
            const auto ex = order_statistic_means(n, f);
            for (int i = 0; i < 100; ++i) {
                const auto r = sorted_random(n, rng);
                double den = 0.0;
                for (int t = 1; t <= n; ++t) den += r[t - 1] * ex[t];
                CHECK(optimal_value(th, r) / den >= gmin - 1e-9);
            }
        }
}

TEST_CASE("order statistic means") {
    const auto ex = order_statistic_means(4, uniform01());
    for (int t = 1; t <= 4; ++t) CHECK(ex[t] == Approx(t / 5.0).epsilon(1e-9));
}

TEST_CASE("alpha equals the smallest gamma") {
    for (int n : {2, 3}) {
        std::vector<QuantileFunction> fam{uniform01(), exponential(1.0)};
        for (double h : {5.0, 50.0, 500.0})
            for (double p : {0.2, 0.5, 0.8}) fam.push_back(two_piece(h, p));
        const AlphaReport a = alpha_ratio(n, fam, reward_family(n, 50, 9));
        CHECK(a.decomposition_ok);
        CHECK(a.tail_ok);
        CHECK(std::abs(a.alpha_hat - a.min_gamma) < 1e-3);
        double g = 1.0;
        for (const auto& f : fam)
            for (int k = 1; k <= n; ++k) g = std::min(g, approx_ratio(n, k, f).ratio);
        CHECK(a.min_gamma == Approx(g).epsilon(1e-12));
        if (n == 2) CHECK(a.min_gamma == Approx(std::min(a.gamma_hat[1], 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("reduction policy") {
    const ReductionPolicy rp = reduction_policy(2, 1, uniform01());
    CHECK(rp.eps == Approx(1.0 / 40));
    CHECK(rp.rewards == std::vector<double>{rp.eps, 1.0});
    CHECK(rp.select(2, 1, 0.9));
    CHECK_FALSE(rp.select(2, 1, 0.1));
    const ReductionPolicy all = reduction_policy(3, 3, uniform01());
    for (double x : {0.01, 0.5, 0.99}) CHECK(all.select(3, 3, x));
    // the induced quantile policy coincides with the optimal dp policy
    const QuantileFunction f = exponential(1.0);
    const QuantilePolicy qp = reduction_policy(4, 2, f).quantile_policy(f);
    const DPTable dp = solve_dp(4, 2, f);
    for (int t = 1; t <= 4; ++t)
        for (int l = 1; l <= 2; ++l)
            if (l <= 4 - t + 1) CHECK(qp.q[t][l] == Approx(dp.q[t][l]).epsilon(1e-6));
}
