#include "nlse/disorder.hpp"

#include <algorithm>
#include <cmath>

#include "nlse/errors.hpp"

namespace nlse {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Fixed points of the logistic map at any mu: 0, and 1 - 1/mu.
bool chain_collapsed(double c, double mu) {
    return c == 0.0 || c == 1.0 - 1.0 / mu;
}

}  // namespace

std::string_view to_string(PerturbationKind kind) {
    switch (kind) {
        case PerturbationKind::none: return "none";
        case PerturbationKind::chaotic: return "chaotic";
        case PerturbationKind::random: return "random";
        case PerturbationKind::quasiperiodic: return "quasiperiodic";
    }
    return "none";
}

PerturbationKind parse_perturbation_kind(std::string_view name) {
    if (name == "none") return PerturbationKind::none;
    if (name == "chaotic") return PerturbationKind::chaotic;
    if (name == "random") return PerturbationKind::random;
    if (name == "quasiperiodic" || name == "nonperiodic") return PerturbationKind::quasiperiodic;
    throw ConfigError("unknown perturbation kind '" + std::string(name) + "'");
}

double PerturbationSpec::amplitude() const {
    if (kind == PerturbationKind::quasiperiodic && alpha) return *alpha;
    return epsilon;
}

double PerturbationSpec::chain_start() const {
    return initial_iterate ? *initial_iterate : unit_interval_from_key(seed);
}

void validate(const PerturbationSpec& spec) {
    if (!std::isfinite(spec.epsilon) || spec.epsilon < 0.0) {
        throw ConfigError("perturbation.epsilon must be finite and >= 0");
    }
    if (spec.alpha && (!std::isfinite(*spec.alpha) || *spec.alpha < 0.0)) {
        throw ConfigError("perturbation.alpha must be finite and >= 0");
    }
    if (!std::isfinite(spec.refresh_interval) || spec.refresh_interval <= 0.0) {
        throw ConfigError("perturbation.tau must be positive");
    }
    if (spec.kind == PerturbationKind::chaotic) {
        if (!(spec.logistic_mu > 0.0 && spec.logistic_mu <= 4.0)) {
            throw ConfigError("perturbation.mu must lie in (0, 4]");
        }
        const double c0 = spec.chain_start();
        if (!(c0 > 0.0 && c0 < 1.0)) {
            throw ConfigError("perturbation.c0 must lie in (0, 1)");
        }
    }
    if (spec.region_lo && spec.region_hi && *spec.region_lo > *spec.region_hi) {
        throw ConfigError("perturbation.x_lo must not exceed perturbation.x_hi");
    }
}

NodeRange affected_nodes(const PerturbationSpec& spec, const Grid1D& grid) {
    NodeRange range = NodeRange::full(grid);
    if (spec.region_lo) {
        const double s = std::ceil((*spec.region_lo - grid.x_min()) / grid.dx() - 1e-9);
        range.first = static_cast<std::size_t>(std::max(0.0, s));
    }
    if (spec.region_hi) {
        const double s = std::floor((*spec.region_hi - grid.x_min()) / grid.dx() + 1e-9);
        if (s < 0.0) throw ConfigError("perturbation region lies outside the grid");
        range.last = std::min(range.last, static_cast<std::size_t>(s));
    }
    if (range.first > range.last) {
        throw ConfigError("perturbation region contains no grid nodes");
    }
    return range;
}

double logistic_next(double c, double mu) {
    if (!(c >= 0.0 && c <= 1.0)) throw ContractError("logistic_next: c outside [0, 1]");
    if (!(mu > 0.0 && mu <= 4.0)) throw ContractError("logistic_next: mu outside (0, 4]");
    return mu * c * (1.0 - c);
}

double unit_interval_from_key(std::uint64_t key) {
    // 53-bit mantissa, shifted by half an ulp so 0 is never produced.
    const std::uint64_t bits = splitmix64(key) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

ChaoticProfile chaotic_profile(const Grid1D& grid, LogisticChain state, double epsilon,
                               double mu, std::size_t segment, NodeRange range) {
    if (range.last >= grid.size() || range.first > range.last) {
        throw ContractError("chaotic_profile: node range outside grid");
    }
    std::vector<double> profile(grid.size(), 0.0);
    double c = state.iterate;
    for (std::size_t i = range.first; i <= range.last; ++i) {
        if (chain_collapsed(c, mu)) {
            const std::uint64_t key =
                splitmix64(state.seed ^ splitmix64(segment + 1)) + state.reseeds;
            c = unit_interval_from_key(key);
            ++state.reseeds;
        }
        c = logistic_next(c, mu);
        profile[i] = epsilon * (2.0 * c - 1.0);
    }
    state.iterate = c;
    return {std::move(profile), state};
}

ChaoticProfile chaotic_profile(const Grid1D& grid, LogisticChain state, double epsilon,
                               double mu, std::size_t segment) {
    return chaotic_profile(grid, state, epsilon, mu, segment, NodeRange::full(grid));
}

double UniformStream::next_unit() {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

RandomProfile random_profile(const Grid1D& grid, UniformStream state, double epsilon,
                             NodeRange range) {
    if (range.last >= grid.size() || range.first > range.last) {
        throw ContractError("random_profile: node range outside grid");
    }
    std::vector<double> profile(grid.size(), 0.0);
    for (std::size_t i = range.first; i <= range.last; ++i) {
        profile[i] = epsilon * (2.0 * state.next_unit() - 1.0);
    }
    return {std::move(profile), std::move(state)};
}

RandomProfile random_profile(const Grid1D& grid, UniformStream state, double epsilon) {
    return random_profile(grid, std::move(state), epsilon, NodeRange::full(grid));
}

std::vector<double> quasiperiodic_profile(const Grid1D& grid, double alpha, NodeRange range) {
    if (range.last >= grid.size() || range.first > range.last) {
        throw ContractError("quasiperiodic_profile: node range outside grid");
    }
    const double root5 = std::sqrt(5.0);
    std::vector<double> profile(grid.size(), 0.0);
    for (std::size_t i = range.first; i <= range.last; ++i) {
        const double x = grid.x(i);
        profile[i] = alpha * (std::cos(5.0 * x) / 2.0 + std::cos(root5 * x) / 2.0);
    }
    return profile;
}

std::vector<double> quasiperiodic_profile(const Grid1D& grid, double alpha) {
    return quasiperiodic_profile(grid, alpha, NodeRange::full(grid));
}

double SigmaSchedule::segment_length() const {
    return refreshes_ ? spec_.refresh_interval : t_final_;
}

std::size_t SigmaSchedule::segment_index(double t) const {
    if (!(t >= 0.0 && t <= t_final_)) {
        throw ContractError("sigma_at: t = " + std::to_string(t) + " outside [0, t_final]");
    }
    if (!refreshes_) return 0;
    const auto k = static_cast<std::size_t>(std::floor(t / spec_.refresh_interval));
    return std::min(k, segment_count() - 1);
}

std::size_t SigmaSchedule::segment_index_for_step(std::size_t step,
                                                  std::size_t steps_per_segment) const {
    if (!refreshes_) return 0;
    return std::min(step / steps_per_segment, segment_count() - 1);
}

double SigmaSchedule::sigma_at(std::size_t node, double t) const {
    if (node >= grid_.size()) throw ContractError("sigma_at: node index outside grid");
    return profiles_[segment_index(t)][node];
}

SigmaSchedule build_schedule(const PerturbationSpec& spec, const Grid1D& grid, double t_final) {
    validate(spec);
    if (!std::isfinite(t_final) || t_final <= 0.0) {
        throw ConfigError("t_final must be positive");
    }

    SigmaSchedule schedule;
    schedule.spec_ = spec;
    schedule.grid_ = grid;
    schedule.t_final_ = t_final;

    const NodeRange range = affected_nodes(spec, grid);

    switch (spec.kind) {
        case PerturbationKind::none:
            schedule.starts_.push_back(0.0);
            schedule.profiles_.emplace_back(grid.size(), 0.0);
            break;
        case PerturbationKind::quasiperiodic:
            schedule.starts_.push_back(0.0);
            schedule.profiles_.push_back(quasiperiodic_profile(grid, spec.amplitude(), range));
            break;
        case PerturbationKind::chaotic:
        case PerturbationKind::random: {
            schedule.refreshes_ = true;
            const double tau = spec.refresh_interval;
            const double ratio = t_final / tau;
            const auto segments =
                static_cast<std::size_t>(std::max(1.0, std::ceil(ratio - 1e-9 * std::max(1.0, ratio))));
            schedule.starts_.reserve(segments);
            schedule.profiles_.reserve(segments);

            LogisticChain chain{spec.chain_start(), spec.seed, 0};
            UniformStream stream(spec.seed);
            for (std::size_t k = 0; k < segments; ++k) {
                schedule.starts_.push_back(static_cast<double>(k) * tau);
                if (spec.kind == PerturbationKind::chaotic) {
                    auto next = chaotic_profile(grid, chain, spec.epsilon, spec.logistic_mu, k, range);
                    chain = next.state;
                    schedule.profiles_.push_back(std::move(next.profile));
                } else {
                    auto next = random_profile(grid, std::move(stream), spec.epsilon, range);
                    stream = std::move(next.state);
                    schedule.profiles_.push_back(std::move(next.profile));
                }
            }
            schedule.chain_ = chain;
            schedule.reseeds_ = chain.reseeds;
            break;
        }
    }
    return schedule;
}

}  // namespace nlse
