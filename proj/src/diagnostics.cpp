#include "nlse/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlse/errors.hpp"

namespace nlse {

double height_at(const WaveField& field, double x) {
    const Grid1D& grid = field.grid();
    if (grid.size() == 0 || !grid.contains(x)) {
        throw ContractError("height_at: x = " + std::to_string(x) + " is outside the grid");
    }
    return field.density(grid.nearest_index(x));
}

double centroid(const WaveField& field) {
    double mass = 0.0;
    double moment = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double rho = field.density(i);
        mass += rho;
        moment += field.grid().x(i) * rho;
    }
    if (!(mass > 0.0)) throw ContractError("centroid: field has zero power");
    return moment / mass;
}

Peak peak(const WaveField& field) {
    if (field.size() == 0) throw ContractError("peak: empty field");
    Peak best{0, field.grid().x(0), field.density(0)};
    for (std::size_t i = 1; i < field.size(); ++i) {
        const double rho = field.density(i);
        if (rho > best.height) best = {i, field.grid().x(i), rho};
    }
    return best;
}

DiagnosticsRecord record(double t, const WaveField& field) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    DiagnosticsRecord rec;
    rec.t = t;
    rec.power = power(field);
    rec.height_x0 = field.grid().contains(0.0) ? height_at(field, 0.0) : nan;
    rec.centroid = rec.power > 0.0 ? centroid(field) : nan;
    const Peak p = peak(field);
    rec.peak_pos = p.position;
    rec.peak_height = p.height;
    return rec;
}

double discrete_energy(const WaveField& field, double background_nonlinearity) {
    const double dx = field.grid().dx();
    double kinetic = 0.0;
    double interaction = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (i + 1 < field.size()) kinetic += std::norm((field[i + 1] - field[i]) / dx);
        const double rho = field.density(i);
        interaction += rho * rho;
    }
    return (kinetic + 0.5 * background_nonlinearity * interaction) * dx;
}

RunSummary summarize(const WaveField& initial, const WaveField& final_state,
                     std::span<const DiagnosticsRecord> records) {
    if (records.empty()) throw ContractError("summarize: no diagnostics records");

    RunSummary s;
    s.errors = comparative_error(initial, final_state);
    s.power_initial = power(initial);
    s.power_final = power(final_state);
    s.power_error = std::abs(s.power_final - s.power_initial);
    s.relative_drift = s.power_initial > 0.0 ? s.power_error / s.power_initial : 0.0;

    auto [lo, hi] = std::minmax_element(
        records.begin(), records.end(),
        [](const DiagnosticsRecord& a, const DiagnosticsRecord& b) { return a.peak_height < b.peak_height; });
    s.min_peak_height = lo->peak_height;
    s.max_peak_height = hi->peak_height;

    s.final_peak_height = peak(final_state).height;
    if (s.power_final > 0.0) {
        s.final_centroid = centroid(final_state);
        s.centroid_displacement =
            s.power_initial > 0.0 ? s.final_centroid - centroid(initial) : 0.0;
    } else {
        s.final_centroid = std::numeric_limits<double>::quiet_NaN();
        s.centroid_displacement = std::numeric_limits<double>::quiet_NaN();
    }
    return s;
}

}  // namespace nlse
