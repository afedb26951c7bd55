#include "prophet/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "prophet/error.hpp"
#include "prophet/special_fn.hpp"

namespace prophet {

using detail::require;

QuantileFunction::QuantileFunction(std::vector<double> grid, std::vector<double> values,
                                   Interp interp)
    : grid_(std::move(grid)), values_(std::move(values)), interp_(interp) {
    require(grid_.size() >= 2, "quantile function needs at least two grid points");
    require(grid_.size() == values_.size(), "quantile grid and values differ in length");
    require(grid_.front() == 0.0 && grid_.back() == 1.0, "quantile grid must start at 0 and end at 1");
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        require(std::isfinite(values_[i]) && values_[i] >= 0.0, "quantile values must be finite and >= 0");
        if (i == 0) continue;
        require(grid_[i] > grid_[i - 1], "quantile grid must be strictly increasing");
        require(values_[i] <= values_[i - 1], "quantile values must be non-increasing");
    }
    prefix_.assign(grid_.size(), 0.0);
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        const double h = grid_[i] - grid_[i - 1];
        const double piece = interp_ == Interp::linear ? 0.5 * h * (values_[i - 1] + values_[i])
                                                       : h * values_[i];
        prefix_[i] = prefix_[i - 1] + piece;
    }
}

std::size_t QuantileFunction::cell(double u) const {
    // index i >= 1 with grid[i-1] <= u <= grid[i]
    auto it = std::lower_bound(grid_.begin(), grid_.end(), u);
    if (it == grid_.begin()) ++it;
    if (it == grid_.end()) --it;
    return static_cast<std::size_t>(it - grid_.begin());
}

double QuantileFunction::operator()(double u) const {
    require(u >= 0.0 && u <= 1.0, "quantile argument outside [0,1]");
    if (u == 0.0) return values_.front();
    const std::size_t i = cell(u);
    if (interp_ == Interp::constant) return values_[i];
    const double w = (u - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
    return values_[i - 1] + w * (values_[i] - values_[i - 1]);
}

double QuantileFunction::partial_mass(double q) const {
    require(q >= 0.0 && q <= 1.0, "partial_mass needs q in [0,1]");
    if (q == 0.0) return 0.0;
    const std::size_t i = cell(q);
    const double h = q - grid_[i - 1];
    if (interp_ == Interp::constant) return prefix_[i - 1] + h * values_[i];
    const double fq = (*this)(q);
    return prefix_[i - 1] + 0.5 * h * (values_[i - 1] + fq);
}

namespace {

// sup{u : f(u) > x} (strict) or sup{u : f(u) >= x}
double level_edge(const std::vector<double>& g, const std::vector<double>& v, Interp interp,
                  double x, bool strict) {
    auto above = [&](double y) { return strict ? y > x : y >= x; };
    // values are non-increasing, so the set {i : above(v[i])} is a prefix
    const auto it = std::partition_point(v.begin(), v.end(), above);
    const auto cnt = static_cast<std::size_t>(it - v.begin());
    if (cnt == v.size()) return 1.0;
    if (interp == Interp::constant) return cnt == 0 ? 0.0 : g[cnt - 1];
    if (cnt == 0) return 0.0;
    const std::size_t i = cnt - 1;
    const double w = (v[i] - x) / (v[i] - v[i + 1]);
    return g[i] + std::clamp(w, 0.0, 1.0) * (g[i + 1] - g[i]);
}

}  // namespace

double QuantileFunction::prob_greater(double x) const {
    return level_edge(grid_, values_, interp_, x, true);
}

double QuantileFunction::prob_at_least(double x) const {
    if (interp_ == Interp::linear) return level_edge(grid_, values_, interp_, x, false);
    if (x <= values_.back()) return 1.0;
    return level_edge(grid_, values_, interp_, x, false);
}

QuantileFunction QuantileFunction::scaled(double c) const {
    require(c > 0.0 && std::isfinite(c), "scale factor must be positive");
    std::vector<double> v = values_;
    for (double& x : v) x *= c;
    return QuantileFunction(grid_, std::move(v), interp_);
}

QuantileFunction uniform01() { return QuantileFunction({0.0, 1.0}, {1.0, 0.0}); }

QuantileFunction exponential(double rate) {
    require(rate > 0.0 && std::isfinite(rate), "exponential rate must be positive");
    // u = exp(-s) on s in [0, 36] with step 1e-3; the cut-off mass below e^-36 is < 1e-14.
    const int steps = 36000;
    std::vector<double> g(steps + 2), v(steps + 2);
    g[0] = 0.0;
    v[0] = 36.0 / rate;
    for (int i = 0; i <= steps; ++i) {
        const double s = 36.0 - i * 1e-3;
        g[i + 1] = i == steps ? 1.0 : std::exp(-s);
        v[i + 1] = i == steps ? 0.0 : s / rate;
    }
    return QuantileFunction(std::move(g), std::move(v));
}

QuantileFunction two_piece(double h, double p, double head_mass, double delta) {
    require(h >= 1.0, "two_piece head value must be >= 1");
    require(head_mass > 0.0 && delta > 0.0, "two_piece head mass and ramp width must be positive");
    require(p > head_mass + delta && p + delta < 1.0, "two_piece tail mass must lie in (head_mass + delta, 1 - delta)");
    return QuantileFunction({0.0, head_mass, head_mass + delta, p, p + delta, 1.0},
                            {h, h, 1.0, 1.0, 0.0, 0.0});
}

QuantileFunction smooth(const QuantileFunction& f, double delta) {
    require(delta > 0.0, "smoothing width must be positive");
    const auto& g = f.grid();
    const auto& v = f.values();
    const double range = v.front() - v.back();
    std::vector<double> ng, nv;
    if (f.interp() == Interp::linear) {
        ng = g;
        nv = v;
    } else {
        double min_len = 1.0;
        for (std::size_t i = 1; i < g.size(); ++i) min_len = std::min(min_len, g[i] - g[i - 1]);
        const double w = std::min(delta, min_len / 4.0);
        ng.push_back(0.0);
        nv.push_back(v.size() > 1 ? v[1] : v[0]);
        for (std::size_t i = 1; i < g.size(); ++i) {
            if (i > 1 && v[i] < v[i - 1]) {
                ng.push_back(g[i - 1] + w);
                nv.push_back(v[i]);
            }
            ng.push_back(g[i]);
            nv.push_back(v[i]);
        }
    }
    const double tilt = delta * (range > 0.0 ? range : 1.0);
    for (std::size_t i = 0; i < ng.size(); ++i) nv[i] += tilt * (1.0 - ng[i]);
    return QuantileFunction(std::move(ng), std::move(nv), Interp::linear);
}

QuantileFunction parse_quantile_csv(const std::string& text, Interp interp) {
    std::istringstream in(text);
    std::string line;
    std::vector<double> g, v;
    bool header = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (!header) {
            std::string h;
            for (char c : line)
                if (c != ' ' && c != '\t') h += c;
            require(h == "u,f", "quantile CSV must start with header 'u,f'");
            header = true;
            continue;
        }
        const auto comma = line.find(',');
        require(comma != std::string::npos, "quantile CSV line " + std::to_string(lineno) + " lacks a comma");
        try {
            std::size_t used = 0;
            const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
            g.push_back(std::stod(a, &used));
            v.push_back(std::stod(b, &used));
        } catch (const std::logic_error&) {
            throw InputError("quantile CSV line " + std::to_string(lineno) + " is not numeric");
        }
    }
    require(header, "quantile CSV is empty");
    return QuantileFunction(std::move(g), std::move(v), interp);
}

QuantileFunction load_quantile_csv(const std::string& path, Interp interp) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open quantile CSV '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_quantile_csv(ss.str(), interp);
}

QuantileFunction distribution_from_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto num = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double x = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return x;
        } catch (const std::logic_error&) {
            throw InputError("bad number '" + s + "' in distribution '" + spec + "'");
        }
    };
    if (kind == "uniform" || kind == "uniform01") return uniform01();
    if (kind == "exponential" || kind == "exp") return exponential(arg.empty() ? 1.0 : num(arg));
    if (kind == "twopiece") {
        const auto c = arg.find(',');
        require(c != std::string::npos, "twopiece needs h,p");
        return two_piece(num(arg.substr(0, c)), num(arg.substr(c + 1)));
    }
    if (kind == "csv") {
        require(!arg.empty(), "csv distribution needs a path");
        const std::string suffix = ",constant";
        if (arg.size() > suffix.size() && arg.compare(arg.size() - suffix.size(), suffix.size(), suffix) == 0)
            return smooth(load_quantile_csv(arg.substr(0, arg.size() - suffix.size()), Interp::constant));
        return load_quantile_csv(arg);
    }
    throw InputError("unknown distribution '" + spec + "'");
}

QuadratureRule opt_quadrature(int n, int k, const std::vector<double>& breakpoints) {
    require(n >= 1 && k >= 1 && k <= n, "quadrature needs 1 <= k <= n");
    std::vector<double> cuts(breakpoints.begin(), breakpoints.end());
    cuts.push_back(0.0);
    cuts.push_back(1.0);
    for (double u = std::min(1.0, 32.0 * k / n); u > 5e-4 * k / n; u *= 0.5) cuts.push_back(u);
    // extra doubling steps past the peak so wide cells stay short on the 1/n scale
    for (double u = 32.0 * k / n; u < 1.0; u *= 1.25) cuts.push_back(u);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    while (!cuts.empty() && cuts.front() < 0.0) cuts.erase(cuts.begin());
    while (!cuts.empty() && cuts.back() > 1.0) cuts.pop_back();

    using GL = boost::math::quadrature::gauss<double, 20>;
    const auto& x = GL::abscissa();
    const auto& w = GL::weights();
    QuadratureRule rule;
    for (std::size_t c = 1; c < cuts.size(); ++c) {
        const double a = cuts[c - 1], b = cuts[c];
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (int s : {-1, 1}) {
                if (x[i] == 0.0 && s > 0) continue;
                rule.nodes.push_back(mid + s * half * x[i]);
                rule.weights.push_back(half * w[i]);
            }
        }
    }
    const GWeightParams p(n, k);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) rule.weights[i] *= g_weight(p, rule.nodes[i]);
    return rule;
}

double opt_offline(int n, int k, const QuantileFunction& f) {
    require(n >= 1 && k >= 1 && k <= n, "opt_offline needs 1 <= k <= n");
    const QuadratureRule rule = opt_quadrature(n, k, f.grid());
    long double s = 0.0L;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
    const double out = static_cast<double>(s);
    if (!std::isfinite(out)) throw NumericalError("opt_offline: non-finite integrand");
    return out;
}

QuantileFunction normalize(int n, int k, const QuantileFunction& f) {
    const double opt = opt_offline(n, k, f);
    require(opt > 0.0, "cannot normalize a distribution with zero benchmark");
    return f.scaled(1.0 / opt);
}

double partial_mass(const QuantileFunction& f, double q) { return f.partial_mass(q); }

}  // namespace prophet
