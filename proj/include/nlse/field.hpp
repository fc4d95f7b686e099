#pragma once

// Uniform 1D grid, complex wavefunction samples and the two scalar
// metrics used to judge a run: total power and the initial/final density
// distance.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nlse {

using Complex = std::complex<double>;

/**
 * Uniform grid over [x_min, x_max] with inclusive endpoints.
 *
 * n = round((x_max - x_min) / dx) + 1. Node positions are computed as
 * x_min + i * dx, never accumulated, so spacing is uniform to
 * representation precision.
 */
class Grid1D {
public:
    Grid1D() = default;

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    double dx() const { return dx_; }
    std::size_t size() const { return n_; }

    double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx_; }
    std::vector<double> nodes() const;

    // Index of the node closest to position; ties go to the smaller index.
    std::size_t nearest_index(double position) const;
    bool contains(double position) const;

    friend bool operator==(const Grid1D&, const Grid1D&) = default;

private:
    friend Grid1D make_grid(double x_min, double x_max, double dx);

    Grid1D(double x_min, double x_max, double dx, std::size_t n)
        : x_min_(x_min), x_max_(x_max), dx_(dx), n_(n) {}

    double x_min_ = 0.0;
    double x_max_ = 0.0;
    double dx_ = 1.0;
    std::size_t n_ = 0;
};

// Throws ConfigError unless x_max > x_min, dx > 0, everything is finite and
// (x_max - x_min) / dx lies within half a step of an integer.
Grid1D make_grid(double x_min, double x_max, double dx);

/// Complex amplitudes on a grid at a single instant.
class WaveField {
public:
    WaveField() = default;
    explicit WaveField(Grid1D grid);  // all zeros
    WaveField(Grid1D grid, std::vector<Complex> values);

    const Grid1D& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    std::span<const Complex> values() const { return values_; }
    std::span<Complex> values() { return values_; }

    const Complex& operator[](std::size_t i) const { return values_[i]; }
    Complex& operator[](std::size_t i) { return values_[i]; }

    double density(std::size_t i) const { return std::norm(values_[i]); }
    std::vector<double> densities() const;

    bool all_finite() const;

private:
    Grid1D grid_;
    std::vector<Complex> values_;
};

/// psi_i = sech(x_i - x0), purely real.
WaveField soliton_initial(const Grid1D& grid, double x0 = 0.0);

/// sech(x_i - x0) * exp(i v (x_i - x0) / 2); travels with velocity v under
/// the free dispersion term.
WaveField moving_soliton(const Grid1D& grid, double x0, double velocity);

/// Bare sum of |psi_i|^2 over all nodes (no dx weight).
double power(const WaveField& field);

/// dx-weighted norm, the Riemann approximation of the integral of |psi|^2.
double power_normalized(const WaveField& field);

struct ErrorReport {
    double signed_mean = 0.0;  // (1/N) sum(|psi_0|^2 - |psi_f|^2)
    double mean_abs = 0.0;     // (1/N) sum |density difference|
    double rms = 0.0;          // sqrt(sum density difference^2)
    double l_inf = 0.0;        // max |density difference|

    friend bool operator==(const ErrorReport&, const ErrorReport&) = default;
};

// Throws ContractError if the fields live on different grids.
ErrorReport comparative_error(const WaveField& initial, const WaveField& final_state);

}  // namespace nlse
