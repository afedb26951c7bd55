#pragma once

#include <string>
#include <vector>

#include "prophet/nls_solver.hpp"

namespace prophet {

// eps[l-1][t] for t = 0..nbar; eps[.][0] = 0 and eps[.][nbar] = 1.
struct EpsilonSchedule {
    int k = 0;
    int nbar = 0;
    std::vector<std::vector<double>> eps;
};

// How the atom B_l ln(nbar) 1_[0,1/nbar] enters alpha*_{k-l+1,l}.
//   none:  B_l is replaced by 0.
//   log_density: B_l = (l-1)(4 c_k^k + c_k/k!) as a constant density on [0, 1/nbar].
enum class AtomPolicy { none, log_density };

struct CertificateOptions {
    AtomPolicy atoms = AtomPolicy::none;
};

struct DualCertificate {
    int n = 0, k = 0, nbar = 0;
    std::vector<double> theta;       // theta_1..theta_k used by the construction
    std::vector<double> scale;       // s_l
    std::vector<double> atom_coef;   // density height of the atom, per level
    EpsilonSchedule schedule;
    DerivedConstants constants;
    AtomPolicy atoms = AtomPolicy::none;
    int source_m = 0;
    double v_star = 0.0;
    // g_{n,k} and g_{n+1,k+1} at every breakpoint, filled by build_certificate.
    std::vector<std::vector<double>> g_at, g_up_at;

    // First t with a non-zero alpha*_{t,l}.
    int first_active(int l) const { return k - l + 1; }
    // int_0^1 alpha*_{t,l} and int_0^1 q alpha*_{t,l}, closed forms.
    double mass(int t, int l) const;
    double qmass(int t, int l) const;
    // The breakpoints (a, b) of the density piece of alpha*_{t,l}; a == b if empty.
    std::pair<double, double> piece(int t, int l) const;
};

struct SlackReport {
    double min_slack = 0.0;
    int worst_t = 0;
    int worst_l = 0;
    long long checked = 0;
    std::vector<double> per_t;  // min slack over l at each t (index t-1)
    bool pass = false;
};

struct CoverageReport {
    double min_ratio = 0.0;
    double min_slack = 0.0;
    double worst_u = 0.0;
    int points = 0;
    bool pass = false;
};

EpsilonSchedule epsilon_schedule(const ThetaSolution& ts, int n);

DualCertificate build_certificate(int n, int k, const ThetaSolution& ts,
                                  const CertificateOptions& opt = {});

inline constexpr double kSlackTolerance = -1e-9;

SlackReport verify_budget_k(const DualCertificate& cert);
SlackReport verify_budget_j(const DualCertificate& cert);
CoverageReport verify_coverage(const DualCertificate& cert, int grid_size = 10000);

struct CertifiedBound {
    int n = 0, k = 0;
    bool pass = false;
    double v_star = 0.0;
    double sum_theta = 0.0;
    std::string failure;  // first violated family, empty on success
    SlackReport budget_k, budget_j;
    CoverageReport coverage;
    DualCertificate cert;
};

struct CertifyOptions {
    CertificateOptions cert;
    // Euler grid; 0 picks m = nbar so that Y_j(t/nbar) are grid samples.
    int m = 0;
    double theta_tol = 1e-10;
    int coverage_grid = 10000;
};

CertifiedBound certified_lower_bound(int n, int k, const CertifyOptions& opt = {});

}  // namespace prophet
