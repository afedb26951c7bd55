#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "prophet/certificate.hpp"
#include "prophet/error.hpp"
#include "prophet/special_fn.hpp"

using namespace prophet;
using doctest::Approx;

TEST_CASE("epsilon schedule") {
    const ThetaSolution ts = solve_nls_fixed(2, 997);
    const EpsilonSchedule s = epsilon_schedule(ts, 1000);
    CHECK(s.nbar == 997);
    for (int l = 1; l <= 2; ++l) {
        const auto& e = s.eps[l - 1];
        CHECK(e[0] == 0.0);
        for (std::size_t t = 1; t < e.size(); ++t) {
            CHECK(e[t] >= e[t - 1]);
            CHECK(e[t] <= 1.0);
        }
        // eps = -ln Y on the aligned grid while the trajectory is alive
        const auto& Y = ts.levels[l - 1].Y;
        for (int t : {10, 200, 500})
            if (Y[t] > 0.0) CHECK(e[t] == Approx(-std::log(Y[t]) / 997.0).epsilon(1e-12));
    }
}

TEST_CASE("certificate construction basics") {
    const ThetaSolution ts1 = solve_nls_fixed(1, 9998);
    const DualCertificate c1 = build_certificate(10000, 1, ts1);
    CHECK(c1.nbar == 9998);
    CHECK(c1.constants.B[0] == 0.0);
    const ThetaSolution ts = solve_nls_fixed(2, 9997);
    const DualCertificate c = build_certificate(10000, 2, ts);
    const double nb = 9997.0;
    CHECK(c.v_star == Approx((1 - 24 * std::log(nb) * std::log(nb) / nb) * ts.sum_theta()).epsilon(1e-14));
    CHECK(c.first_active(2) == 1);
    CHECK(c.first_active(1) == 2);
    CHECK(c.mass(1, 1) == 0.0);  // level 1 is silent before its first active step
    CHECK_THROWS_AS(build_certificate(3, 2, ts), InputError);
}

TEST_CASE("piece masses agree with quadrature") {
    const ThetaSolution ts = solve_nls_fixed(2, 997);
    const DualCertificate c = build_certificate(1000, 2, ts);
    GWeightParams p(1000, 2);
    for (int t : {3, 50, 400})
        for (int l = 1; l <= 2; ++l) {
            const auto [a, b] = c.piece(t, l);
            if (b <= a) continue;
            const double ref = oracle::integrate([&](double u) { return -g_weight_deriv(p, u); }, a, b);
            CHECK(c.mass(t, l) == Approx(c.scale[l - 1] * ts.theta[l - 1] * ref).epsilon(1e-8).scale(1e-14));
        }
}

TEST_CASE("certified bounds") {
    for (int k : {1, 2, 3}) {
        const CertifiedBound b = certified_lower_bound(20000, k);
        CHECK(b.pass);
        CHECK(b.failure.empty());
        CHECK(b.budget_k.min_slack >= kSlackTolerance);
        if (k > 1) CHECK(b.budget_j.min_slack >= kSlackTolerance);
        CHECK(b.coverage.min_slack >= kSlackTolerance);
        const double nb = 20000.0 - k - 1;
        CHECK(b.v_star == (1 - 12.0 * k * std::log(nb) * std::log(nb) / nb) * b.sum_theta);
    }
}

TEST_CASE("log-density atoms break the budget rows") {
    CertifyOptions o;
    o.cert.atoms = AtomPolicy::log_density;
    const CertifiedBound b = certified_lower_bound(20000, 2, o);
    CHECK_FALSE(b.pass);
    CHECK(b.failure.rfind("budget_k", 0) == 0);
}

TEST_CASE("certificate input validation") {
    CHECK_THROWS_AS(certified_lower_bound(3, 2), InputError);  // nbar = 0
    CHECK_THROWS_AS(certified_lower_bound(100, 0), InputError);
}
