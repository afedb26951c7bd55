#include "prophet/json_io.hpp"

namespace prophet {

using nlohmann::json;

json to_json(const ThetaSolution& ts) {
    return {{"k", ts.k},
            {"grid_m", ts.grid_m},
            {"theta", ts.theta},
            {"sum_theta", ts.sum_theta()},
            {"residual_max", ts.residual_max},
            {"check_m", ts.check_m},
            {"check_sum_theta", ts.check_sum_theta}};
}

json to_json(const DerivedConstants& c) {
    return {{"b_k", c.b_k}, {"c_k", c.c_k}, {"cbar_k", c.cbar_k},
            {"d_k", c.d_k}, {"d_k_proof", c.d_k_proof}, {"B", c.B}};
}

json to_json(const Theorem2Bound& b) {
    return {{"theorem_form", b.theorem_form},
            {"refined_form", b.refined_form},
            {"vacuous", b.vacuous},
            {"first_positive_n", b.first_positive_n}};
}

json to_json(const DPTable& dp) {
    return {{"n", dp.n}, {"k", dp.k}, {"A", dp.A}, {"q", dp.q}, {"value", dp.value()}};
}

json to_json(const RatioReport& r) {
    return {{"dp_value", r.dp_value}, {"opt_value", r.opt_value}, {"ratio", r.ratio}};
}

json to_json(const PrimalSolution& s, bool with_solution) {
    json j = {{"value", s.value},
              {"status", to_string(s.status)},
              {"iterations", s.iterations},
              {"rounds", s.rounds},
              {"working_rows", s.working_rows},
              {"max_violation", s.max_violation}};
    if (with_solution) {
        j["f"] = s.f;
        j["d"] = s.d;
    }
    return j;
}

json to_json(const SlackReport& r, bool with_per_t) {
    json j = {{"min_slack", r.min_slack}, {"worst_t", r.worst_t}, {"worst_l", r.worst_l},
              {"checked", r.checked}, {"pass", r.pass}};
    if (with_per_t) j["per_t"] = r.per_t;
    return j;
}

json to_json(const CoverageReport& r) {
    return {{"min_ratio", r.min_ratio}, {"min_slack", r.min_slack}, {"worst_u", r.worst_u},
            {"points", r.points}, {"pass", r.pass}};
}

json to_json(const CertifiedBound& b, bool with_schedule) {
    json j = {{"n", b.n},
              {"k", b.k},
              {"nbar", b.cert.nbar},
              {"pass", b.pass},
              {"v_star", b.v_star},
              {"sum_theta", b.sum_theta},
              {"theta", b.cert.theta},
              {"scale", b.cert.scale},
              {"atoms", b.cert.atoms == AtomPolicy::none ? "none" : "log"},
              {"atom_coef", b.cert.atom_coef},
              {"source_m", b.cert.source_m},
              {"constants", to_json(b.cert.constants)},
              {"budget_k", to_json(b.budget_k)},
              {"budget_j", to_json(b.budget_j)},
              {"coverage", to_json(b.coverage)}};
    if (!b.pass) j["failure"] = b.failure;
    if (with_schedule) j["epsilon"] = b.cert.schedule.eps;
    return j;
}

json to_json(const SSAPThresholds& th) {
    // mu[t][t] is +inf and is left out
    json rows = json::array();
    for (int t = 1; t <= th.n + 1; ++t) {
        std::vector<double> r(th.mu[t].begin(), th.mu[t].begin() + t);
        rows.push_back(r);
    }
    return {{"n", th.n}, {"mu", rows}, {"top", std::vector<double>(th.mu[th.n + 1].begin() + 1,
                                                                    th.mu[th.n + 1].begin() + th.n + 1)}};
}

json to_json(const SimReport& r) {
    return {{"reps", r.reps},
            {"seed", r.seed},
            {"mean", r.mean},
            {"std_error", r.std_error},
            {"opt", r.opt},
            {"ratio", r.ratio},
            {"ratio_se", r.ratio_se},
            {"max_selected", r.max_selected}};
}

json to_json(const AlphaReport& r) {
    return {{"n", r.n},
            {"gamma_hat", std::vector<double>(r.gamma_hat.begin() + 1, r.gamma_hat.end())},
            {"min_gamma", r.min_gamma},
            {"argmin_k", r.argmin_k},
            {"alpha_hat", r.alpha_hat},
            {"instances", r.instances},
            {"worst_decomposition_gap", r.worst_decomposition_gap},
            {"worst_tail_gap", r.worst_tail_gap},
            {"max_tail_identity_error", r.max_tail_identity_error},
            {"decomposition_ok", r.decomposition_ok},
            {"tail_ok", r.tail_ok}};
}

}  // namespace prophet
