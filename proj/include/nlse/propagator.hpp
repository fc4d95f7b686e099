#pragma once

// Split-step finite-difference integrator for
//
//     i psi_t = -psi_xx + g(x, t) |psi|^2 psi
//
// The nonlinear part is solved exactly (pointwise phase rotation), the
// dispersive part by Crank-Nicolson on the three-point Laplacian. Both
// sub-steps preserve sum |psi_i|^2, so the composition is norm conserving
// up to roundoff.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "nlse/diagnostics.hpp"
#include "nlse/disorder.hpp"
#include "nlse/field.hpp"

namespace nlse {

enum class Boundary { dirichlet, periodic };
enum class Splitting { strang, lie };

std::string_view to_string(Boundary boundary);
std::string_view to_string(Splitting splitting);
Boundary parse_boundary(std::string_view name);
Splitting parse_splitting(std::string_view name);

struct SolverParams {
    double dt = 1e-4;
    double t_final = 200.0;
    double background = -2.0;  // G
    Boundary boundary = Boundary::dirichlet;
    Splitting splitting = Splitting::strang;
    double sample_interval = 1.0;

    std::size_t step_count() const;
    std::size_t steps_per_sample() const;

    friend bool operator==(const SolverParams&, const SolverParams&) = default;
};

// Throws ConfigError naming the bad field.
void validate(const SolverParams& params);
// Refresh boundaries must land on step boundaries: dt < tau and tau/dt
// integral to 1e-9. Only checked for refreshing schedules.
void check_alignment(const SolverParams& params, const SigmaSchedule& schedule);

/**
 * Precomputed Crank-Nicolson factorization for one (grid, dt, boundary).
 *
 * Solves (I + i dt/2 A) psi' = (I - i dt/2 A) psi with A the discrete
 * -d^2/dx^2. Dirichlet: end nodes are held at zero and the interior system
 * is solved by the Thomas recurrence. Periodic: the n nodes form a ring
 * (node n-1 neighbours node 0) and the cyclic system is handled with a
 * Sherman-Morrison correction.
 */
class CrankNicolsonStepper {
public:
    CrankNicolsonStepper(const Grid1D& grid, double dt, Boundary boundary);

    void apply(std::span<Complex> psi);

    Boundary boundary() const { return boundary_; }
    double dt() const { return dt_; }

private:
    void solve_tridiagonal(std::span<const Complex> rhs, std::span<Complex> out,
                           std::size_t offset, std::size_t m);

    Boundary boundary_;
    double dt_;
    std::size_t n_;
    Complex diag_;      // 1 + i dt / dx^2
    Complex off_;       // -i dt / (2 dx^2)
    // Thomas factors: modified super-diagonal and inverse pivots.
    std::vector<Complex> upper_;
    std::vector<Complex> inv_pivot_;
    // Periodic only.
    std::vector<Complex> sm_z_;
    Complex sm_gamma_{};
    Complex sm_scale_{};
    // Scratch.
    std::vector<Complex> rhs_;
    std::vector<Complex> work_;
};

WaveField cn_linear_step(const WaveField& field, double dt, Boundary boundary);

/// psi_i <- psi_i exp(-i g_i |psi_i|^2 dt); moduli untouched.
void apply_phase(std::span<Complex> psi, std::span<const double> g, double dt);
WaveField phase_step(const WaveField& field, std::span<const double> g, double dt);

/// g_i = G (1 + sigma_i)
std::vector<double> nonlinearity_profile(double background, std::span<const double> sigma);

/// Thrown when an amplitude becomes non-finite or the power jumps by more
/// than 1e-6 (relative) within a single step. Carries the last good state.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, WaveField last_finite, double t_last, double t_failed)
        : std::runtime_error(what), last_finite_(std::move(last_finite)),
          t_last_(t_last), t_failed_(t_failed) {}

    const WaveField& last_finite() const { return last_finite_; }
    double last_time() const { return t_last_; }
    double failed_time() const { return t_failed_; }
    const std::vector<DiagnosticsRecord>& records() const { return records_; }
    void set_records(std::vector<DiagnosticsRecord> records) { records_ = std::move(records); }

private:
    WaveField last_finite_;
    double t_last_;
    double t_failed_;
    std::vector<DiagnosticsRecord> records_;
};

/**
 * Stateful time stepper for one run: owns the CN factorization and the
 * current nonlinearity profile. g is frozen for a whole step at the
 * segment active at the step's start.
 */
class SplitStepPropagator {
public:
    SplitStepPropagator(const Grid1D& grid, const SigmaSchedule& schedule, SolverParams params);

    // Advance psi from step index k to k + 1 (t = k dt).
    void step(WaveField& psi, std::size_t k);

    const SolverParams& params() const { return params_; }

private:
    void load_segment(std::size_t segment);

    const SigmaSchedule& schedule_;
    SolverParams params_;
    CrankNicolsonStepper linear_;
    std::size_t steps_per_segment_ = 1;
    std::size_t current_segment_ = static_cast<std::size_t>(-1);
    std::vector<double> g_;
};

/// One Strang step at time t: phase(dt/2), CN(dt), phase(dt/2).
WaveField strang_step(const WaveField& field, const SigmaSchedule& schedule, double t,
                      const SolverParams& params);

using Observer = std::function<void(double t, const WaveField& psi)>;

struct EvolveResult {
    WaveField final_state;
    std::vector<DiagnosticsRecord> records;
};

// Steps from t = 0 to t_final (round(t_final / dt) steps). Records are
// collected every sample_interval, at t = 0 and at the final step. The
// observer fires at those steps and additionally at the steps nearest to
// each of extra_times. Throws DivergenceError on blow-up.
EvolveResult evolve(const WaveField& initial, const SigmaSchedule& schedule,
                    const SolverParams& params, const Observer& observer = {},
                    std::span<const double> extra_times = {});

/// Classical RK4 step of the method-of-lines system
/// psi_t = -i (A psi + g |psi|^2 psi), same stencil and boundary handling.
/// Throws ContractError when dt exceeds the explicit stability limit.
WaveField rk4_reference_step(const WaveField& field, std::span<const double> g, double dt,
                             Boundary boundary = Boundary::dirichlet);

// Largest stable RK4 step for the three-point Laplacian on this grid.
double rk4_stability_limit(const Grid1D& grid);

}  // namespace nlse
