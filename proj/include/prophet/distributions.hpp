#pragma once

#include <string>
#include <vector>

namespace prophet {

enum class Interp { linear, constant };

// Non-increasing, non-negative f on [0,1] with f(u) = F^{-1}(1 - u).
// linear: f interpolates (grid[i], values[i]).
// constant: left-continuous, f = values[i] on (grid[i-1], grid[i]] and f(0) = values[0].
class QuantileFunction {
public:
    QuantileFunction() = default;
    QuantileFunction(std::vector<double> grid, std::vector<double> values,
                     Interp interp = Interp::linear);

    double operator()(double u) const;
    // int_0^q f(u) du
    double partial_mass(double q) const;
    // Pr[X > x] and Pr[X >= x] for X = f(U)
    double prob_greater(double x) const;
    double prob_at_least(double x) const;
    double mean() const { return partial_mass(1.0); }
    double max_value() const { return values_.front(); }

    QuantileFunction scaled(double c) const;

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    Interp interp() const { return interp_; }
    std::size_t size() const { return grid_.size(); }

private:
    std::size_t cell(double u) const;

    std::vector<double> grid_;
    std::vector<double> values_;
    std::vector<double> prefix_;  // partial_mass at grid points
    Interp interp_ = Interp::linear;
};

QuantileFunction uniform01();
QuantileFunction exponential(double rate);
// Near-worst-case family: a head of value h on [0, head_mass], value 1 up to the
// tail mass p, and 0 after. Jumps are ramps of width delta in u.
QuantileFunction two_piece(double h, double p, double head_mass = 1e-4, double delta = 1e-7);
// Turns flats into strictly decreasing pieces and jumps into ramps of width
// delta in u, then adds delta * range * (1 - u). The result is linear.
QuantileFunction smooth(const QuantileFunction& f, double delta = 1e-6);

QuantileFunction load_quantile_csv(const std::string& path, Interp interp = Interp::linear);
QuantileFunction parse_quantile_csv(const std::string& text, Interp interp = Interp::linear);

// Spec strings: uniform, exponential[:rate], twopiece:h,p, csv:path[,constant]
QuantileFunction distribution_from_spec(const std::string& spec);

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Composite Gauss-Legendre on the breakpoints plus a geometric sub-grid on [0, 32k/n].
QuadratureRule opt_quadrature(int n, int k, const std::vector<double>& breakpoints);

double opt_offline(int n, int k, const QuantileFunction& f);
QuantileFunction normalize(int n, int k, const QuantileFunction& f);

double partial_mass(const QuantileFunction& f, double q);

}  // namespace prophet
