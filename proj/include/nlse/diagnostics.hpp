#pragma once

#include <cstddef>
#include <span>

#include "nlse/field.hpp"

namespace nlse {

struct DiagnosticsRecord {
    double t = 0.0;
    double power = 0.0;        // bare sum of |psi|^2
    double height_x0 = 0.0;    // |psi|^2 at the node nearest x = 0 (NaN if 0 is off-grid)
    double centroid = 0.0;     // NaN for a zero field
    double peak_pos = 0.0;
    double peak_height = 0.0;
};

struct Peak {
    std::size_t index = 0;
    double position = 0.0;
    double height = 0.0;
};

// Density at the node nearest x, no interpolation.
// Throws ContractError when x is off the grid.
double height_at(const WaveField& field, double x);

// Density-weighted mean position. Throws ContractError for a zero field.
double centroid(const WaveField& field);

// Node of maximum density; ties resolve to the smaller index.
Peak peak(const WaveField& field);

DiagnosticsRecord record(double t, const WaveField& field);

/// sum [ |(psi_{i+1} - psi_i)/dx|^2 + (G/2)|psi_i|^4 ] dx
double discrete_energy(const WaveField& field, double background_nonlinearity);

struct RunSummary {
    double power_initial = 0.0;
    double power_final = 0.0;
    double power_error = 0.0;     // |P(final) - P(initial)|, bare sums
    double relative_drift = 0.0;  // power_error / P(initial)
    ErrorReport errors;
    double min_peak_height = 0.0;
    double max_peak_height = 0.0;
    double final_peak_height = 0.0;
    double final_centroid = 0.0;
    double centroid_displacement = 0.0;  // final centroid - initial centroid
};

// Throws ContractError for empty records or mismatched grids.
RunSummary summarize(const WaveField& initial, const WaveField& final_state,
                     std::span<const DiagnosticsRecord> records);

}  // namespace nlse
