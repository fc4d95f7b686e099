#pragma once

// Run configuration in a flat, line-oriented text format:
//
//     # comment
//     grid.dx = 0.02
//     perturbation.kind = chaotic
//
// Every key is optional; missing keys keep the value from the base config
// (by default the full-scale baseline). Unknown or repeated keys are errors.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlse/disorder.hpp"
#include "nlse/field.hpp"
#include "nlse/propagator.hpp"

namespace nlse {

struct GridConfig {
    double x_min = -20.0;
    double x_max = 20.0;
    double dx = 0.01;

    friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct OutputConfig {
    std::string directory = "out";
    // Empty means {0, t_final}.
    std::vector<double> snapshot_times;
    bool emit_sigma = false;

    friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct RunConfig {
    GridConfig grid;
    // sample_interval <= 0 means "t_final / 200".
    SolverParams solver{.dt = 1e-4, .t_final = 200.0, .background = -2.0,
                        .boundary = Boundary::dirichlet, .splitting = Splitting::strang,
                        .sample_interval = 0.0};
    PerturbationSpec perturbation;
    double x0 = 0.0;
    OutputConfig output;

    Grid1D make_grid() const;
    SolverParams solver_params() const;  // sample interval resolved
    std::vector<double> snapshot_times() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline constexpr int kDefaultSamplesPerRun = 200;

enum class Preset { paper, desk };
Preset parse_preset(std::string_view name);
// paper: dx 0.01, dt 1e-4, t_final 200. desk: dx 0.02, dt 1e-3, t_final 100.
RunConfig apply_preset(RunConfig config, Preset preset);

// Throws ConfigError with "line N: ..." for syntax problems and the key name
// for constraint violations. The result has passed validate().
RunConfig parse_config(std::string_view text, const RunConfig& base = RunConfig{});
RunConfig load_config(const std::string& path, const RunConfig& base = RunConfig{});

// Cross-field checks: grid commensurability, solver and perturbation
// constraints, tau/dt alignment, snapshot times inside [0, t_final].
void validate(const RunConfig& config);

// Every key, fixed order, 17 significant digits. parse_config of the result
// reproduces the config exactly.
std::string to_config_text(const RunConfig& config);

// FNV-1a 64 of to_config_text, as 16 lowercase hex digits.
std::string config_hash(const RunConfig& config);

// 17 significant digits, '.' separator, independent of locale. Used by
// every file this project writes.
std::string format_double(double value);

}  // namespace nlse
