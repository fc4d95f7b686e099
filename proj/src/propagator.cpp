#include "nlse/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlse/errors.hpp"

namespace nlse {

std::string_view to_string(Boundary boundary) {
    return boundary == Boundary::periodic ? "periodic" : "dirichlet";
}

std::string_view to_string(Splitting splitting) {
    return splitting == Splitting::lie ? "lie" : "strang";
}

Boundary parse_boundary(std::string_view name) {
    if (name == "dirichlet") return Boundary::dirichlet;
    if (name == "periodic") return Boundary::periodic;
    throw ConfigError("unknown boundary '" + std::string(name) + "'");
}

Splitting parse_splitting(std::string_view name) {
    if (name == "strang") return Splitting::strang;
    if (name == "lie") return Splitting::lie;
    throw ConfigError("unknown splitting '" + std::string(name) + "'");
}

std::size_t SolverParams::step_count() const {
    return static_cast<std::size_t>(std::llround(t_final / dt));
}

std::size_t SolverParams::steps_per_sample() const {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sample_interval / dt)));
}

void validate(const SolverParams& params) {
    if (!std::isfinite(params.dt) || params.dt <= 0.0) {
        throw ConfigError("solver.dt must be positive");
    }
    if (!std::isfinite(params.t_final) || params.t_final <= 0.0) {
        throw ConfigError("solver.t_final must be positive");
    }
    if (params.t_final < params.dt) {
        throw ConfigError("solver.t_final must be at least one step (solver.dt)");
    }
    if (!std::isfinite(params.background)) {
        throw ConfigError("solver.G must be finite");
    }
    if (!std::isfinite(params.sample_interval) || params.sample_interval <= 0.0) {
        throw ConfigError("solver.sample_interval must be positive");
    }
}

void check_alignment(const SolverParams& params, const SigmaSchedule& schedule) {
    if (!schedule.refreshes()) return;
    const double tau = schedule.spec().refresh_interval;
    if (!(params.dt < tau)) {
        throw ConfigError("solver.dt must be smaller than perturbation.tau");
    }
    const double ratio = tau / params.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
        throw ConfigError("perturbation.tau must be an integer multiple of solver.dt");
    }
}

// ---------------------------------------------------------------------------
// Crank-Nicolson

CrankNicolsonStepper::CrankNicolsonStepper(const Grid1D& grid, double dt, Boundary boundary)
    : boundary_(boundary), dt_(dt), n_(grid.size()) {
    if (!(dt > 0.0)) throw ContractError("CrankNicolsonStepper: dt must be positive");
    if (n_ < 3) throw ContractError("CrankNicolsonStepper: grid needs at least 3 nodes");

    const double r = dt / (grid.dx() * grid.dx());
    diag_ = Complex(1.0, r);
    off_ = Complex(0.0, -0.5 * r);

    std::vector<Complex> diag;
    if (boundary_ == Boundary::dirichlet) {
        diag.assign(n_ - 2, diag_);
    } else {
        diag.assign(n_, diag_);
        sm_gamma_ = -diag_;
        diag.front() = diag_ - sm_gamma_;
        diag.back() = diag_ - off_ * off_ / sm_gamma_;
    }

    const std::size_t m = diag.size();
    upper_.resize(m);
    inv_pivot_.resize(m);
    Complex pivot = diag[0];
    for (std::size_t j = 0; j < m; ++j) {
        if (j > 0) pivot = diag[j] - off_ * upper_[j - 1];
        if (std::abs(pivot) == 0.0) throw ContractError("CrankNicolsonStepper: singular pivot");
        inv_pivot_[j] = 1.0 / pivot;
        upper_[j] = off_ * inv_pivot_[j];
    }

    rhs_.resize(n_);
    work_.resize(n_);

    if (boundary_ == Boundary::periodic) {
        std::vector<Complex> u(n_, Complex{});
        u.front() = sm_gamma_;
        u.back() = off_;
        sm_z_.resize(n_);
        solve_tridiagonal(u, sm_z_, 0, n_);
        const Complex v_dot_z = sm_z_.front() + off_ / sm_gamma_ * sm_z_.back();
        sm_scale_ = 1.0 / (1.0 + v_dot_z);
    }
}

void CrankNicolsonStepper::solve_tridiagonal(std::span<const Complex> rhs, std::span<Complex> out,
                                             std::size_t offset, std::size_t m) {
    // Forward elimination into out, then back substitution in place.
    out[offset] = rhs[offset] * inv_pivot_[0];
    for (std::size_t j = 1; j < m; ++j) {
        out[offset + j] = (rhs[offset + j] - off_ * out[offset + j - 1]) * inv_pivot_[j];
    }
    for (std::size_t j = m - 1; j-- > 0;) {
        out[offset + j] -= upper_[j] * out[offset + j + 1];
    }
}

void CrankNicolsonStepper::apply(std::span<Complex> psi) {
    if (psi.size() != n_) throw ContractError("CrankNicolsonStepper: field size mismatch");
    const Complex explicit_diag = std::conj(diag_);
    const Complex explicit_off = -off_;

    if (boundary_ == Boundary::dirichlet) {
        psi[0] = Complex{};
        psi[n_ - 1] = Complex{};
        for (std::size_t i = 1; i + 1 < n_; ++i) {
            rhs_[i] = explicit_diag * psi[i] + explicit_off * (psi[i - 1] + psi[i + 1]);
        }
        solve_tridiagonal(rhs_, psi, 1, n_ - 2);
        return;
    }

    rhs_[0] = explicit_diag * psi[0] + explicit_off * (psi[n_ - 1] + psi[1]);
    for (std::size_t i = 1; i + 1 < n_; ++i) {
        rhs_[i] = explicit_diag * psi[i] + explicit_off * (psi[i - 1] + psi[i + 1]);
    }
    rhs_[n_ - 1] = explicit_diag * psi[n_ - 1] + explicit_off * (psi[n_ - 2] + psi[0]);

    solve_tridiagonal(rhs_, work_, 0, n_);
    const Complex v_dot_y = work_.front() + off_ / sm_gamma_ * work_.back();
    const Complex factor = v_dot_y * sm_scale_;
    for (std::size_t i = 0; i < n_; ++i) psi[i] = work_[i] - factor * sm_z_[i];
}

WaveField cn_linear_step(const WaveField& field, double dt, Boundary boundary) {
    WaveField out = field;
    CrankNicolsonStepper stepper(field.grid(), dt, boundary);
    stepper.apply(out.values());
    return out;
}

// ---------------------------------------------------------------------------
// Nonlinear phase

void apply_phase(std::span<Complex> psi, std::span<const double> g, double dt) {
    if (psi.size() != g.size()) throw ContractError("apply_phase: profile size mismatch");
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double angle = -g[i] * std::norm(psi[i]) * dt;
        psi[i] *= Complex(std::cos(angle), std::sin(angle));
    }
}

WaveField phase_step(const WaveField& field, std::span<const double> g, double dt) {
    WaveField out = field;
    apply_phase(out.values(), g, dt);
    return out;
}

std::vector<double> nonlinearity_profile(double background, std::span<const double> sigma) {
    std::vector<double> g(sigma.size());
    std::transform(sigma.begin(), sigma.end(), g.begin(),
                   [background](double s) { return nonlinearity(background, s); });
    return g;
}

// ---------------------------------------------------------------------------
// Composite stepping

SplitStepPropagator::SplitStepPropagator(const Grid1D& grid, const SigmaSchedule& schedule,
                                         SolverParams params)
    : schedule_(schedule), params_(params), linear_(grid, params.dt, params.boundary) {
    validate(params_);
    if (!(schedule.grid() == grid)) {
        throw ContractError("SplitStepPropagator: schedule built on a different grid");
    }
    check_alignment(params_, schedule_);
    if (schedule_.refreshes()) {
        steps_per_segment_ = static_cast<std::size_t>(
            std::llround(schedule_.spec().refresh_interval / params_.dt));
    }
}

void SplitStepPropagator::load_segment(std::size_t segment) {
    if (segment == current_segment_) return;
    g_ = nonlinearity_profile(params_.background, schedule_.profile(segment));
    current_segment_ = segment;
}

void SplitStepPropagator::step(WaveField& psi, std::size_t k) {
    load_segment(schedule_.segment_index_for_step(k, steps_per_segment_));
    const double dt = params_.dt;
    auto values = psi.values();
    if (params_.splitting == Splitting::strang) {
        apply_phase(values, g_, 0.5 * dt);
        linear_.apply(values);
        apply_phase(values, g_, 0.5 * dt);
    } else {
        apply_phase(values, g_, dt);
        linear_.apply(values);
    }
}

WaveField strang_step(const WaveField& field, const SigmaSchedule& schedule, double t,
                      const SolverParams& params) {
    const std::size_t segment = schedule.segment_index(t);
    const auto g = nonlinearity_profile(params.background, schedule.profile(segment));
    WaveField out = field;
    auto values = out.values();
    apply_phase(values, g, 0.5 * params.dt);
    CrankNicolsonStepper(field.grid(), params.dt, params.boundary).apply(values);
    apply_phase(values, g, 0.5 * params.dt);
    if (!out.all_finite()) {
        throw DivergenceError("simulation diverged at t = " + std::to_string(t + params.dt),
                              field, t, t + params.dt);
    }
    return out;
}

EvolveResult evolve(const WaveField& initial, const SigmaSchedule& schedule,
                    const SolverParams& params, const Observer& observer,
                    std::span<const double> extra_times) {
    SplitStepPropagator propagator(initial.grid(), schedule, params);
    const std::size_t steps = params.step_count();
    const std::size_t stride = params.steps_per_sample();
    const double dt = params.dt;

    std::vector<std::size_t> extra_steps;
    for (double t : extra_times) {
        const auto k = static_cast<std::size_t>(std::max(0LL, std::llround(t / dt)));
        extra_steps.push_back(std::min(k, steps));
    }
    std::sort(extra_steps.begin(), extra_steps.end());
    auto is_extra = [&](std::size_t k) {
        return std::binary_search(extra_steps.begin(), extra_steps.end(), k);
    };

    EvolveResult result{initial, {}};
    result.records.reserve(steps / stride + 2);
    WaveField& psi = result.final_state;
    if (params.boundary == Boundary::dirichlet) {
        psi[0] = Complex{};
        psi[psi.size() - 1] = Complex{};
    }

    auto sample = [&](std::size_t k) {
        const double t = static_cast<double>(k) * dt;
        result.records.push_back(record(t, psi));
        if (observer) observer(t, psi);
    };

    sample(0);
    WaveField previous = psi;
    double p_prev = power(psi);
    for (std::size_t k = 0; k < steps; ++k) {
        std::copy(psi.values().begin(), psi.values().end(), previous.values().begin());
        propagator.step(psi, k);
        const double p = power(psi);
        const bool blown = !std::isfinite(p) || (p - p_prev) > 1e-6 * std::max(p_prev, 1e-300);
        if (blown) {
            const double t_last = static_cast<double>(k) * dt;
            const double t_fail = static_cast<double>(k + 1) * dt;
            DivergenceError err("simulation diverged at t = " + std::to_string(t_fail),
                                std::move(previous), t_last, t_fail);
            err.set_records(std::move(result.records));
            throw err;
        }
        p_prev = p;
        const std::size_t done = k + 1;
        if (done % stride == 0 || done == steps) {
            sample(done);
        } else if (observer && is_extra(done)) {
            observer(static_cast<double>(done) * dt, psi);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// RK4 oracle

namespace {

// out = -i (A psi + g |psi|^2 psi)
void schrodinger_rhs(std::span<const Complex> psi, std::span<const double> g, double inv_dx2,
                     Boundary boundary, std::span<Complex> out) {
    const std::size_t n = psi.size();
    const Complex minus_i(0.0, -1.0);
    auto at = [&](std::ptrdiff_t i) -> Complex {
        if (boundary == Boundary::periodic) {
            const auto m = static_cast<std::ptrdiff_t>(n);
            return psi[static_cast<std::size_t>((i % m + m) % m)];
        }
        if (i <= 0 || i >= static_cast<std::ptrdiff_t>(n) - 1) return Complex{};
        return psi[static_cast<std::size_t>(i)];
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto si = static_cast<std::ptrdiff_t>(i);
        if (boundary == Boundary::dirichlet && (i == 0 || i == n - 1)) {
            out[i] = Complex{};
            continue;
        }
        const Complex lap = (2.0 * at(si) - at(si - 1) - at(si + 1)) * inv_dx2;
        out[i] = minus_i * (lap + g[i] * std::norm(psi[i]) * psi[i]);
    }
}

}  // namespace

double rk4_stability_limit(const Grid1D& grid) {
    // Spectrum of -iA lies on the imaginary axis up to 4/dx^2; RK4 is stable
    // there for |z| <= 2 sqrt(2).
    return 2.0 * std::sqrt(2.0) * grid.dx() * grid.dx() / 4.0;
}

WaveField rk4_reference_step(const WaveField& field, std::span<const double> g, double dt,
                             Boundary boundary) {
    const std::size_t n = field.size();
    if (g.size() != n) throw ContractError("rk4_reference_step: profile size mismatch");
    const double dx = field.grid().dx();
    double max_rate = 4.0 / (dx * dx);
    for (std::size_t i = 0; i < n; ++i) {
        max_rate = std::max(max_rate, 4.0 / (dx * dx) + std::abs(g[i]) * field.density(i));
    }
    if (dt * max_rate > 2.0 * std::sqrt(2.0)) {
        throw ContractError("rk4_reference_step: dt = " + std::to_string(dt) +
                            " exceeds the explicit stability limit");
    }

    const double inv_dx2 = 1.0 / (dx * dx);
    std::vector<Complex> y(field.values().begin(), field.values().end());
    if (boundary == Boundary::dirichlet) y.front() = y.back() = Complex{};

    std::vector<Complex> k1(n), k2(n), k3(n), k4(n), tmp(n);
    schrodinger_rhs(y, g, inv_dx2, boundary, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    schrodinger_rhs(tmp, g, inv_dx2, boundary, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    schrodinger_rhs(tmp, g, inv_dx2, boundary, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
    schrodinger_rhs(tmp, g, inv_dx2, boundary, k4);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return WaveField(field.grid(), std::move(y));
}

}  // namespace nlse
