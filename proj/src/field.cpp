#include "nlse/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlse/errors.hpp"

namespace nlse {

Grid1D make_grid(double x_min, double x_max, double dx) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(dx)) {
        throw ConfigError("grid: bounds and spacing must be finite");
    }
    if (!(x_max > x_min)) {
        throw ConfigError("grid: x_max must be greater than x_min");
    }
    if (!(dx > 0.0)) {
        throw ConfigError("grid: dx must be positive");
    }
    const double intervals = (x_max - x_min) / dx;
    const double rounded = std::round(intervals);
    // Residual measured in units of dx: must be strictly below one half.
    if (std::abs(intervals - rounded) >= 0.5 || rounded < 1.0) {
        throw ConfigError("grid: dx = " + std::to_string(dx) +
                          " does not divide [x_min, x_max] into whole intervals");
    }
    return Grid1D(x_min, x_max, dx, static_cast<std::size_t>(rounded) + 1);
}

std::vector<double> Grid1D::nodes() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = x(i);
    return out;
}

std::size_t Grid1D::nearest_index(double position) const {
    const double s = (position - x_min_) / dx_;
    if (s <= 0.0) return 0;
    auto lo = static_cast<std::size_t>(std::floor(s));
    if (lo >= n_ - 1) return n_ - 1;
    // Compare true distances so the tie rule does not depend on rounding of s.
    const double d_lo = std::abs(position - x(lo));
    const double d_hi = std::abs(x(lo + 1) - position);
    return d_hi < d_lo ? lo + 1 : lo;
}

bool Grid1D::contains(double position) const {
    const double slack = 0.5 * dx_;
    return position >= x_min_ - slack && position <= x(n_ - 1) + slack;
}

WaveField::WaveField(Grid1D grid) : grid_(grid), values_(grid.size()) {}

WaveField::WaveField(Grid1D grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw ContractError("WaveField: " + std::to_string(values_.size()) +
                            " values for a grid of " + std::to_string(grid_.size()) +
                            " nodes");
    }
}

std::vector<double> WaveField::densities() const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(),
                   [](const Complex& z) { return std::norm(z); });
    return out;
}

bool WaveField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

WaveField soliton_initial(const Grid1D& grid, double x0) {
    std::vector<Complex> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = Complex(1.0 / std::cosh(grid.x(i) - x0), 0.0);
    }
    return WaveField(grid, std::move(values));
}

WaveField moving_soliton(const Grid1D& grid, double x0, double velocity) {
    std::vector<Complex> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double s = grid.x(i) - x0;
        values[i] = std::polar(1.0 / std::cosh(s), 0.5 * velocity * s);
    }
    return WaveField(grid, std::move(values));
}

double power(const WaveField& field) {
    double sum = 0.0;
    for (const Complex& z : field.values()) sum += std::norm(z);
    return sum;
}

double power_normalized(const WaveField& field) {
    return power(field) * field.grid().dx();
}

ErrorReport comparative_error(const WaveField& initial, const WaveField& final_state) {
    if (!(initial.grid() == final_state.grid())) {
        throw ContractError("comparative_error: fields are on different grids");
    }
    const std::size_t n = initial.size();
    if (n == 0) return {};

    ErrorReport report;
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = initial.density(i) - final_state.density(i);
        abs_sum += std::abs(diff);
        sq_sum += diff * diff;
        report.l_inf = std::max(report.l_inf, std::abs(diff));
    }
    const auto count = static_cast<double>(n);
    // Written through the two powers so that signed_mean * N and P0 - Pf
    // come from the same sums.
    report.signed_mean = (power(initial) - power(final_state)) / count;
    report.mean_abs = abs_sum / count;
    report.rms = std::sqrt(sq_sum);
    return report;
}

}  // namespace nlse
