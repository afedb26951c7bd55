#include "prophet/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "prophet/error.hpp"
#include "prophet/special_fn.hpp"

namespace prophet {

EpsilonSchedule epsilon_schedule(const ThetaSolution& ts, int n) {
    const int k = ts.k;
    if (n <= k + 1) throw InputError("certificate needs n > k + 1");
    const int nbar = n - k - 1;
    const int m = ts.grid_m;
    if (m < nbar) throw InputError("trajectory grid m is coarser than nbar");
    EpsilonSchedule sc;
    sc.k = k;
    sc.nbar = nbar;
    sc.eps.assign(k, std::vector<double>(nbar + 1, 0.0));
    const bool aligned = m % nbar == 0;
    for (int l = 0; l < k; ++l) {
        const Trajectory& tr = ts.levels[l];
        auto& e = sc.eps[l];
        for (int t = 1; t < nbar; ++t) {
            double x;
            if (aligned) {
                x = tr.neg_log[static_cast<std::size_t>(t) * (m / nbar)];
            } else {
                const double pos = static_cast<double>(t) * m / nbar;
                const auto i = static_cast<std::size_t>(pos);
                const double w = pos - static_cast<double>(i);
                const double y = i + 1 < tr.Y.size() ? (1.0 - w) * tr.Y[i] + w * tr.Y[i + 1] : tr.Y[i];
                x = y > 0.0 ? -std::log(y) : std::numeric_limits<double>::infinity();
            }
            e[t] = std::max(e[t - 1], std::min(1.0, x / nbar));
        }
        e[nbar] = 1.0;
    }
    return sc;
}

std::pair<double, double> DualCertificate::piece(int t, int l) const {
    const int t0 = first_active(l);
    if (t < t0 || t > nbar) return {0.0, 0.0};
    const auto& e = schedule.eps[l - 1];
    if (t == t0) return {0.0, e[t]};
    return {e[t - 1], e[t]};
}

double DualCertificate::mass(int t, int l) const {
    const int t0 = first_active(l);
    if (t < t0 || t > nbar) return 0.0;
    const auto& g = g_at[l - 1];
    const double a = t == t0 ? static_cast<double>(n) : g[t - 1];
    double v = theta[l - 1] * (a - g[t]);
    if (t == t0) v += atom_coef[l - 1] / nbar;
    return scale[l - 1] * v;
}

double DualCertificate::qmass(int t, int l) const {
    const int t0 = first_active(l);
    if (t < t0 || t > nbar) return 0.0;
    const auto& G = g_up_at[l - 1];
    const double a = t == t0 ? static_cast<double>(n + 1) : G[t - 1];
    double v = theta[l - 1] * static_cast<double>(k) / (n + 1.0) * (a - G[t]);
    if (t == t0) v += atom_coef[l - 1] / (2.0 * nbar * static_cast<double>(nbar));
    return scale[l - 1] * v;
}

DualCertificate build_certificate(int n, int k, const ThetaSolution& ts,
                                  const CertificateOptions& opt) {
    if (ts.k != k) throw InputError("theta solution solved for a different k");
    DualCertificate c;
    c.n = n;
    c.k = k;
    c.schedule = epsilon_schedule(ts, n);
    c.nbar = c.schedule.nbar;
    c.theta = ts.theta;
    c.source_m = ts.grid_m;
    c.constants = derived_constants(ts);
    c.atoms = opt.atoms;
    const double L = std::log(static_cast<double>(c.nbar));
    const double rho = 1.0 + 12.0 * L * L / c.nbar;
    c.scale.resize(k);
    c.atom_coef.assign(k, 0.0);
    for (int l = 1; l <= k; ++l) {
        c.scale[l - 1] = std::pow(rho, -(k - l + 1));
        if (opt.atoms == AtomPolicy::log_density) c.atom_coef[l - 1] = c.constants.B[l - 1] * L;
    }
    const GWeightParams p(n, k), pu(n + 1, k + 1);
    c.g_at.assign(k, {});
    c.g_up_at.assign(k, {});
    for (int l = 0; l < k; ++l) {
        const auto& e = c.schedule.eps[l];
        auto& g = c.g_at[l];
        auto& G = c.g_up_at[l];
        g.resize(e.size());
        G.resize(e.size());
        for (std::size_t t = 0; t < e.size(); ++t) {
            g[t] = g_weight(p, e[t]);
            G[t] = g_weight(pu, e[t]);
        }
    }
    double sum = 0.0;
    for (double th : c.theta) sum += th;
    c.v_star = (1.0 - 12.0 * k * L * L / c.nbar) * sum;
    return c;
}

namespace {

void note(SlackReport& r, double slack, int t, int l) {
    ++r.checked;
    if (r.checked == 1 || slack < r.min_slack) {
        r.min_slack = slack;
        r.worst_t = t;
        r.worst_l = l;
    }
    double& pt = r.per_t[t - 1];
    pt = std::min(pt, slack);
}

}  // namespace

SlackReport verify_budget_k(const DualCertificate& c) {
    SlackReport r;
    r.per_t.assign(c.nbar, std::numeric_limits<double>::infinity());
    long double prefix = 0.0L;
    for (int t = 1; t <= c.nbar; ++t) {
        const long double lhs = c.mass(t, c.k) + prefix;
        note(r, static_cast<double>(1.0L - lhs), t, c.k);
        prefix += c.qmass(t, c.k);
    }
    r.pass = r.min_slack >= kSlackTolerance;
    return r;
}

SlackReport verify_budget_j(const DualCertificate& c) {
    SlackReport r;
    r.per_t.assign(c.nbar, std::numeric_limits<double>::infinity());
    for (int l = 1; l < c.k; ++l) {
        long double own = 0.0L, above = 0.0L;
        for (int t = 1; t <= c.nbar; ++t) {
            const long double lhs = c.mass(t, l) + own;
            note(r, static_cast<double>(above - lhs), t, l);
            own += c.qmass(t, l);
            above += c.qmass(t, l + 1);
        }
    }
    if (c.k == 1) std::fill(r.per_t.begin(), r.per_t.end(), 0.0);
    r.pass = r.checked == 0 || r.min_slack >= kSlackTolerance;
    return r;
}

CoverageReport verify_coverage(const DualCertificate& c, int grid_size) {
    if (grid_size < 4) throw InputError("coverage grid needs at least 4 points");
    const GWeightParams p(c.n, c.k);
    // u grid: geometric from 1e-6/nbar up to 1, then uniform on (0, 1].
    std::vector<double> us{0.0};
    const int half = grid_size / 2;
    const double lo = 1e-6 / c.nbar;
    for (int i = 0; i < half; ++i) us.push_back(lo * std::pow(1.0 / lo, static_cast<double>(i) / (half - 1)));
    for (int i = 1; i <= grid_size - half - 1; ++i)
        us.push_back(static_cast<double>(i) / (grid_size - half - 1));
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end()), us.end());

    // Per level: piece right ends and suffix masses of the density parts.
    struct Level {
        std::vector<double> a, b, ga, gb;
        std::vector<long double> suffix;
    };
    std::vector<Level> lv(c.k);
    for (int l = 1; l <= c.k; ++l) {
        Level& L = lv[l - 1];
        for (int t = c.first_active(l); t <= c.nbar; ++t) {
            const auto [a, b] = c.piece(t, l);
            if (b <= a) continue;
            L.a.push_back(a);
            L.b.push_back(b);
            L.ga.push_back(t == c.first_active(l) ? static_cast<double>(c.n) : c.g_at[l - 1][t - 1]);
            L.gb.push_back(c.g_at[l - 1][t]);
        }
        L.suffix.assign(L.a.size() + 1, 0.0L);
        for (std::size_t i = L.a.size(); i-- > 0;) L.suffix[i] = L.suffix[i + 1] + (L.ga[i] - L.gb[i]);
    }

    CoverageReport rep;
    rep.points = static_cast<int>(us.size());
    bool first = true;
    for (double u : us) {
        const double gu = g_weight(p, u);
        long double rhs = 0.0L;
        for (int l = 1; l <= c.k; ++l) {
            const Level& L = lv[l - 1];
            long double dens = 0.0L;
            const auto it = std::upper_bound(L.b.begin(), L.b.end(), u);
            const auto i = static_cast<std::size_t>(it - L.b.begin());
            if (i < L.b.size()) {
                const double from = u > L.a[i] ? gu : L.ga[i];
                dens = (from - L.gb[i]) + L.suffix[i + 1];
            }
            const double atom = c.atom_coef[l - 1] * std::max(0.0, 1.0 / c.nbar - u);
            rhs += c.scale[l - 1] * (c.theta[l - 1] * dens + atom);
        }
        const long double lhs = static_cast<long double>(c.v_star) * gu;
        const double slack = static_cast<double>(rhs - lhs);
        const double ratio = lhs > 0.0L ? static_cast<double>(rhs / lhs)
                                        : std::numeric_limits<double>::infinity();
        if (first || slack < rep.min_slack) {
            rep.min_slack = slack;
            rep.worst_u = u;
        }
        if (first || ratio < rep.min_ratio) rep.min_ratio = ratio;
        first = false;
    }
    rep.pass = rep.min_slack >= kSlackTolerance;
    return rep;
}

CertifiedBound certified_lower_bound(int n, int k, const CertifyOptions& opt) {
    if (k < 1) throw InputError("k must be positive");
    if (n <= k + 1) throw InputError("certificate needs n > k + 1 (nbar >= 1)");
    const int nbar = n - k - 1;
    int m = opt.m;
    if (m <= 0) {
        m = nbar;
        while (m < 4) m += nbar;
    }
    CertifiedBound out;
    out.n = n;
    out.k = k;
    const ThetaSolution ts = solve_nls_fixed(k, m, opt.theta_tol);
    out.sum_theta = ts.sum_theta();
    out.cert = build_certificate(n, k, ts, opt.cert);
    out.v_star = out.cert.v_star;
    out.budget_k = verify_budget_k(out.cert);
    out.budget_j = verify_budget_j(out.cert);
    out.coverage = verify_coverage(out.cert, opt.coverage_grid);
    if (!out.budget_k.pass)
        out.failure = "budget_k at t=" + std::to_string(out.budget_k.worst_t);
    else if (!out.budget_j.pass)
        out.failure = "budget_j at t=" + std::to_string(out.budget_j.worst_t) +
                      ", l=" + std::to_string(out.budget_j.worst_l);
    else if (!out.coverage.pass)
        out.failure = "coverage at u=" + std::to_string(out.coverage.worst_u);
    out.pass = out.failure.empty();
    return out;
}

}  // namespace prophet
