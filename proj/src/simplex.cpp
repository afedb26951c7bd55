#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

#include "prophet/error.hpp"
#include "prophet/lp_model.hpp"

namespace prophet {

const char* to_string(SimplexStatus s) {
    switch (s) {
        case SimplexStatus::optimal: return "optimal";
        case SimplexStatus::unbounded: return "unbounded";
        case SimplexStatus::infeasible: return "infeasible";
        case SimplexStatus::iteration_limit: return "iteration-limit";
    }
    return "unknown";
}

namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Standard form [A | b] with one tableau kept in sync; rebuilt from the basis
// every few pivots so rounding does not accumulate.
struct Solver {
    Mat A;                  // m x ncols constraint matrix
    Eigen::VectorXd b;      // rhs in use (possibly perturbed)
    Eigen::VectorXd b_orig;
    Mat T;                  // (m+1) x (ncols+1), last row holds reduced costs
    std::vector<int> basis;
    std::vector<char> allowed;
    std::vector<double> cost;
    const SimplexOptions& opt;
    long iterations = 0;
    int since_refactor = 0;

    explicit Solver(const SimplexOptions& o) : opt(o) {}
    int m() const { return static_cast<int>(A.rows()); }
    int n() const { return static_cast<int>(A.cols()); }

    void pivot(int pr, int pc) {
        const int w = n() + 1;
        double* p = T.row(pr).data();
        const double inv = 1.0 / p[pc];
        for (int c = 0; c < w; ++c) p[c] *= inv;
        p[pc] = 1.0;
        for (int r = 0; r <= m(); ++r) {
            if (r == pr) continue;
            double* q = T.row(r).data();
            const double f = q[pc];
            if (f == 0.0) continue;
            for (int c = 0; c < w; ++c) q[c] -= f * p[c];
            q[pc] = 0.0;
        }
        basis[pr] = pc;
        ++iterations;
        if (++since_refactor >= 64) refactor();
    }

    void objective_row() {
        const int M = m(), N = n();
        for (int c = 0; c < N; ++c) T(M, c) = cost[c];
        T(M, N) = 0.0;
        for (int r = 0; r < M; ++r) {
            const double cb = cost[basis[r]];
            if (cb != 0.0) T.row(M) -= cb * T.row(r);
        }
    }

    void refactor() {
        since_refactor = 0;
        const int M = m(), N = n();
        if (M == 0) return;
        Mat B(M, M);
        for (int r = 0; r < M; ++r) B.col(r) = A.col(basis[r]);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
        Eigen::MatrixXd rhs(M, N + 1);
        rhs.leftCols(N) = A;
        rhs.col(N) = b;
        const Eigen::MatrixXd sol = lu.solve(rhs);
        T.topRows(M) = sol;
        for (int r = 0; r < M; ++r) {
            for (int c = 0; c <= N; ++c)
                if (std::fabs(T(r, c)) < 1e-14) T(r, c) = 0.0;
            T(r, basis[r]) = 1.0;
        }
        objective_row();
    }

    // primal simplex on the current phase; Dantzig pricing, Bland's rule after a degenerate run
    SimplexStatus primal() {
        const int M = m(), N = n();
        int degenerate = 0;
        bool bland = false;
        while (iterations < opt.max_iterations) {
            int e = -1;
            double best = -opt.tol;
            for (int c = 0; c < N; ++c) {
                const double z = T(M, c);
                if (!allowed[c] || z >= -opt.tol) continue;
                if (bland) {
                    e = c;
                    break;
                }
                if (z < best) {
                    best = z;
                    e = c;
                }
            }
            if (e < 0) return SimplexStatus::optimal;
            int pr = -1;
            double ratio = std::numeric_limits<double>::infinity();
            for (int r = 0; r < M; ++r) {
                const double a = T(r, e);
                if (a <= 1e-9) continue;
                const double v = std::max(0.0, T(r, N)) / a;
                if (v < ratio * (1.0 - 1e-12) - 1e-300 || (v <= ratio * (1.0 + 1e-12) && pr >= 0 && basis[r] < basis[pr])) {
                    ratio = std::min(ratio, v);
                    pr = r;
                }
            }
            if (pr < 0) return SimplexStatus::unbounded;
            if (ratio <= 1e-12) {
                if (++degenerate >= opt.bland_after) bland = true;
            } else {
                degenerate = 0;
                bland = false;
            }
            pivot(pr, e);
        }
        return SimplexStatus::iteration_limit;
    }

    // dual simplex until the basic solution is non-negative; reduced costs stay >= 0
    SimplexStatus dual() {
        const int M = m(), N = n();
        while (iterations < opt.max_iterations) {
            int pr = -1;
            double worst = -opt.tol;
            for (int r = 0; r < M; ++r)
                if (T(r, N) < worst) {
                    worst = T(r, N);
                    pr = r;
                }
            if (pr < 0) return SimplexStatus::optimal;
            int e = -1;
            double ratio = std::numeric_limits<double>::infinity();
            for (int c = 0; c < N; ++c) {
                const double a = T(pr, c);
                if (!allowed[c] || a >= -1e-9) continue;
                const double v = std::max(0.0, T(M, c)) / -a;
                if (v < ratio) {
                    ratio = v;
                    e = c;
                }
            }
            if (e < 0) return SimplexStatus::infeasible;
            pivot(pr, e);
        }
        return SimplexStatus::iteration_limit;
    }
};

// deterministic perturbation in (0,1) per row
double row_jitter(int r) {
    std::uint64_t z = 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(r) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

SimplexResult simplex_solve(const LinearProgram& lp, const SimplexOptions& opt) {
    const int nx = static_cast<int>(lp.vars.size());
    detail::require(static_cast<int>(lp.objective.size()) == nx, "objective length differs from variable count");
    const int m = static_cast<int>(lp.rows.size());

    // normalize to rhs >= 0; zero-rhs >= rows flip to <= so their slack starts basic
    std::vector<double> sign(m);
    std::vector<RowSense> sense(m);
    int n_slack = 0, n_art = 0;
    for (int r = 0; r < m; ++r) {
        const auto& row = lp.rows[r];
        for (const auto& [j, a] : row.terms) detail::require(j >= 0 && j < nx, "row references unknown variable");
        double s = row.rhs < 0.0 ? -1.0 : 1.0;
        RowSense sn = row.sense;
        if (s < 0.0 && sn != RowSense::eq) sn = sn == RowSense::ge ? RowSense::le : RowSense::ge;
        if (sn == RowSense::ge && row.rhs == 0.0) {
            s = -s;
            sn = RowSense::le;
        }
        sign[r] = s;
        sense[r] = sn;
        if (sn != RowSense::eq) ++n_slack;
        if (sn != RowSense::le) ++n_art;
    }
    // equilibrate: rows to unit max norm, then structural columns
    std::vector<double> rscale(m, 1.0), cscale(nx, 1.0);
    for (int r = 0; r < m; ++r) {
        double mx = 0.0;
        for (const auto& [j, a] : lp.rows[r].terms) mx = std::max(mx, std::fabs(a));
        if (mx > 0.0) rscale[r] = 1.0 / mx;
    }
    {
        std::vector<double> cmax(nx, 0.0);
        for (int r = 0; r < m; ++r)
            for (const auto& [j, a] : lp.rows[r].terms) cmax[j] = std::max(cmax[j], std::fabs(a) * rscale[r]);
        for (int j = 0; j < nx; ++j)
            if (cmax[j] > 0.0) cscale[j] = 1.0 / cmax[j];
    }
    const int ncols = nx + n_slack + n_art;
    Solver S(opt);
    S.A = Mat::Zero(m, ncols);
    S.b_orig = Eigen::VectorXd::Zero(m);
    S.basis.assign(m, -1);
    std::vector<char> is_art(ncols, 0);
    int next_slack = nx, next_art = nx + n_slack;
    double bmax = 1.0;
    for (int r = 0; r < m; ++r) {
        const auto& row = lp.rows[r];
        for (const auto& [j, a] : row.terms) S.A(r, j) += sign[r] * a * rscale[r] * cscale[j];
        S.b_orig(r) = sign[r] * row.rhs * rscale[r];
        bmax = std::max(bmax, std::fabs(S.b_orig(r)));
        if (sense[r] == RowSense::le) {
            S.A(r, next_slack) = 1.0;
            S.basis[r] = next_slack++;
        } else {
            if (sense[r] == RowSense::ge) S.A(r, next_slack++) = -1.0;
            S.A(r, next_art) = 1.0;
            is_art[next_art] = 1;
            S.basis[r] = next_art++;
        }
    }
    S.b = S.b_orig;
    if (opt.perturb > 0.0)
        for (int r = 0; r < m; ++r) S.b(r) += opt.perturb * (1.0 + std::fabs(S.b(r))) * row_jitter(r);
    S.T = Mat::Zero(m + 1, ncols + 1);
    S.T.topLeftCorner(m, ncols) = S.A;
    S.T.block(0, ncols, m, 1) = S.b;
    S.allowed.assign(ncols, 1);

    SimplexResult res;
    auto finish = [&](SimplexStatus st) {
        res.status = st;
        res.iterations = S.iterations;
        return res;
    };
    if (n_art > 0) {
        S.cost.assign(ncols, 0.0);
        for (int c = 0; c < ncols; ++c) S.cost[c] = is_art[c] ? 1.0 : 0.0;
        S.objective_row();
        const SimplexStatus s1 = S.primal();
        if (s1 == SimplexStatus::iteration_limit) return finish(s1);
        S.refactor();
        if (-S.T(m, ncols) > 1e-7 * bmax) return finish(SimplexStatus::infeasible);
        // drive remaining artificials out of the basis
        for (int r = 0; r < m; ++r) {
            if (!is_art[S.basis[r]]) continue;
            int best = -1;
            for (int c = 0; c < ncols; ++c) {
                if (is_art[c] || std::fabs(S.T(r, c)) <= 1e-7) continue;
                if (best < 0 || std::fabs(S.T(r, c)) > std::fabs(S.T(r, best))) best = c;
            }
            if (best >= 0) S.pivot(r, best);
        }
        for (int c = 0; c < ncols; ++c)
            if (is_art[c]) S.allowed[c] = 0;
    }
    S.cost.assign(ncols, 0.0);
    for (int j = 0; j < nx; ++j) S.cost[j] = lp.objective[j] * cscale[j];
    S.refactor();
    SimplexStatus st = S.primal();
    // back to the unperturbed rhs, then restore primal feasibility
    for (int pass = 0; st == SimplexStatus::optimal && pass < 20; ++pass) {
        S.b = S.b_orig;
        S.refactor();
        st = S.dual();
        if (st != SimplexStatus::optimal) break;
        bool dual_ok = true;
        for (int c = 0; c < ncols; ++c)
            if (S.allowed[c] && S.T(m, c) < -opt.tol) dual_ok = false;
        if (dual_ok) break;
        st = S.primal();
    }
    res.x.assign(nx, 0.0);
    for (int r = 0; r < m; ++r)
        if (S.basis[r] < nx) res.x[S.basis[r]] = std::max(0.0, S.T(r, ncols)) * cscale[S.basis[r]];
    long double v = 0.0L;
    for (int j = 0; j < nx; ++j) v += lp.objective[j] * res.x[j];
    res.value = static_cast<double>(v);
    for (const auto& row : lp.rows) {
        long double a = 0.0L;
        for (const auto& [j, c] : row.terms) a += c * res.x[j];
        const double lhs = static_cast<double>(a);
        double viol = 0.0;
        if (row.sense != RowSense::le) viol = std::max(viol, row.rhs - lhs);
        if (row.sense != RowSense::ge) viol = std::max(viol, lhs - row.rhs);
        res.max_residual = std::max(res.max_residual, viol);
    }
    double rhs_max = 1.0;
    for (const auto& row : lp.rows) rhs_max = std::max(rhs_max, std::fabs(row.rhs));
    if (st == SimplexStatus::optimal && res.max_residual > 1e-6 * rhs_max)
        throw NumericalError("simplex: residual " + std::to_string(res.max_residual) + " after refactorization");
    return finish(st);
}

void write_lp(const LinearProgram& lp, std::ostream& out, const std::string& comment) {
    auto num = [](double x) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    auto terms = [&](const std::vector<std::pair<int, double>>& ts) {
        std::string s;
        int on_line = 0;
        for (const auto& [j, a] : ts) {
            if (a == 0.0) continue;
            if (on_line == 6) {
                s += "\n  ";
                on_line = 0;
            }
            s += a < 0.0 ? " - " : (s.empty() ? " " : " + ");
            s += num(std::fabs(a)) + " " + lp.vars[j];
            ++on_line;
        }
        return s.empty() ? std::string(" 0 ") + lp.vars.front() : s;
    };
    if (!comment.empty()) out << "\\ " << comment << "\n";
    out << "Minimize\n obj:";
    std::vector<std::pair<int, double>> obj;
    for (std::size_t j = 0; j < lp.objective.size(); ++j)
        if (lp.objective[j] != 0.0) obj.emplace_back(static_cast<int>(j), lp.objective[j]);
    out << terms(obj) << "\nSubject To\n";
    for (const auto& row : lp.rows) {
        const char* op = row.sense == RowSense::ge ? ">=" : row.sense == RowSense::le ? "<=" : "=";
        out << " " << row.name << ":" << terms(row.terms) << " " << op << " " << num(row.rhs) << "\n";
    }
    out << "Bounds\n";
    for (const auto& v : lp.vars) out << " " << v << " >= 0\n";
    out << "End\n";
}

LinearProgram parse_lp(std::istream& in) {
    LinearProgram lp;
    std::map<std::string, int> index;
    auto var = [&](const std::string& name) {
        auto it = index.find(name);
        if (it != index.end()) return it->second;
        const int id = static_cast<int>(lp.vars.size());
        index.emplace(name, id);
        lp.vars.push_back(name);
        lp.objective.push_back(0.0);
        return id;
    };
    auto is_num = [](const std::string& s, double& x) {
        char* end = nullptr;
        x = std::strtod(s.c_str(), &end);
        return end != s.c_str() && *end == '\0';
    };
    std::string line;
    enum { none, objective, constraints, bounds } section = none;
    std::vector<std::string> stmt;
    auto flush_constraint = [&]() {
        if (stmt.empty()) return;
        LinearRow row;
        std::size_t i = 0;
        if (stmt.size() > 1 && stmt[1] == ":") {
            row.name = stmt[0];
            i = 2;
        } else if (!stmt[0].empty() && stmt[0].back() == ':') {
            row.name = stmt[0].substr(0, stmt[0].size() - 1);
            i = 1;
        }
        double sign = 1.0, coef = 1.0;
        bool have_coef = false;
        for (; i < stmt.size(); ++i) {
            const std::string& s = stmt[i];
            double x;
            if (s == ">=" || s == "<=" || s == "=") {
                row.sense = s == ">=" ? RowSense::ge : s == "<=" ? RowSense::le : RowSense::eq;
                if (i + 1 >= stmt.size() || !is_num(stmt[i + 1], x)) throw InputError("LP: missing rhs in " + row.name);
                row.rhs = x;
                break;
            }
            if (s == "+") sign = 1.0;
            else if (s == "-") sign = -1.0;
            else if (is_num(s, x)) {
                coef = x;
                have_coef = true;
            } else {
                const int id = var(s);
                const double a = sign * (have_coef ? coef : 1.0);
                if (section == objective) lp.objective[id] += a;
                else if (a != 0.0) row.terms.emplace_back(id, a);
                sign = 1.0;
                have_coef = false;
            }
        }
        if (section == constraints) lp.rows.push_back(std::move(row));
        stmt.clear();
    };
    while (std::getline(in, line)) {
        const auto bs = line.find('\\');
        if (bs != std::string::npos) line.erase(bs);
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head)) continue;
        std::string lower = head;
        std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
        std::string rest;
        std::getline(ls, rest);
        if (lower == "minimize" || lower == "min") { section = objective; continue; }
        if (lower == "subject" || lower == "st" || lower == "s.t.") {
            if (section == objective) flush_constraint();
            section = constraints;
            continue;
        }
        if (lower == "bounds") {
            flush_constraint();
            section = bounds;
            continue;
        }
        if (lower == "end") {
            flush_constraint();
            break;
        }
        if (section == bounds) {
            std::istringstream bs2(line);
            std::string v, op, val;
            bs2 >> v >> op >> val;
            detail::require(op == ">=" && val == "0", "LP: only x >= 0 bounds are supported");
            var(v);
            continue;
        }
        // a new named statement starts a new constraint
        std::istringstream ts(line);
        std::string tok;
        std::vector<std::string> toks;
        while (ts >> tok) {
            const auto c = tok.find(':');
            if (c != std::string::npos && c + 1 < tok.size()) {
                toks.push_back(tok.substr(0, c + 1));
                toks.push_back(tok.substr(c + 1));
            } else {
                toks.push_back(tok);
            }
        }
        if (!toks.empty() && toks[0].back() == ':' && section == constraints) flush_constraint();
        stmt.insert(stmt.end(), toks.begin(), toks.end());
    }
    flush_constraint();
    return lp;
}

}  // namespace prophet
