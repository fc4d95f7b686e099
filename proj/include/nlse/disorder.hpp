#pragma once

// Space-time perturbation sigma(x, t) of the cubic coefficient,
// g(x, t) = G (1 + sigma(x, t)).
//
// Profiles are piecewise constant in time: a fresh spatial profile is drawn
// every refresh interval tau, with the generator state threaded from one
// segment to the next. Generators consume exactly one value per affected
// node per segment, in ascending node order.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlse/field.hpp"

namespace nlse {

enum class PerturbationKind { none, chaotic, random, quasiperiodic };

std::string_view to_string(PerturbationKind kind);
// Throws ConfigError for unknown names.
PerturbationKind parse_perturbation_kind(std::string_view name);

struct PerturbationSpec {
    PerturbationKind kind = PerturbationKind::none;
    double epsilon = 0.1;           // 0.1 reads as "10 %"
    double refresh_interval = 2.0;  // tau; ignored for none/quasiperiodic
    double logistic_mu = 4.0;
    std::uint64_t seed = 1;
    // Chaotic chain start. Derived from seed when absent.
    std::optional<double> initial_iterate;
    // Quasiperiodic amplitude. Falls back to epsilon when absent.
    std::optional<double> alpha;
    // Affected region in x; the whole grid when absent.
    std::optional<double> region_lo;
    std::optional<double> region_hi;

    double amplitude() const;
    double chain_start() const;

    friend bool operator==(const PerturbationSpec&, const PerturbationSpec&) = default;
};

// Throws ConfigError naming the offending field.
void validate(const PerturbationSpec& spec);

/// Inclusive range of node indices a generator writes to.
struct NodeRange {
    std::size_t first = 0;
    std::size_t last = 0;

    std::size_t count() const { return last - first + 1; }
    static NodeRange full(const Grid1D& grid) { return {0, grid.size() - 1}; }
};

NodeRange affected_nodes(const PerturbationSpec& spec, const Grid1D& grid);

/// mu * c * (1 - c). Throws ContractError outside c in [0,1], mu in (0,4].
double logistic_next(double c, double mu);

/// Uniform value in (0, 1) derived from a 64-bit key; used for chain seeds.
double unit_interval_from_key(std::uint64_t key);

struct LogisticChain {
    double iterate = 0.5;
    std::uint64_t seed = 0;   // source for deterministic reseeding
    std::size_t reseeds = 0;  // collapses recovered so far
};

struct ChaoticProfile {
    std::vector<double> profile;
    LogisticChain state;
};

/**
 * One logistic iterate per affected node: sigma_i = epsilon * (2 c_i - 1),
 * where c_i is the next iterate of the chain.
 *
 * If the chain sits on a fixed point of the map (0 or 3/4, both absorbing in
 * floating point) before an iterate is drawn, it is restarted from a value
 * derived from (seed, segment, reseed count) and state.reseeds is bumped.
 */
ChaoticProfile chaotic_profile(const Grid1D& grid, LogisticChain state, double epsilon,
                               double mu, std::size_t segment, NodeRange range);
ChaoticProfile chaotic_profile(const Grid1D& grid, LogisticChain state, double epsilon,
                               double mu, std::size_t segment = 0);

/// 64-bit Mersenne twister; doubles formed from the top 53 bits so the
/// stream is identical on every standard library.
struct UniformStream {
    std::mt19937_64 engine;

    explicit UniformStream(std::uint64_t seed = 1) : engine(seed) {}
    double next_unit();  // [0, 1)
};

struct RandomProfile {
    std::vector<double> profile;
    UniformStream state;
};

/// sigma_i uniform on [-epsilon, epsilon), independent per node.
RandomProfile random_profile(const Grid1D& grid, UniformStream state, double epsilon,
                             NodeRange range);
RandomProfile random_profile(const Grid1D& grid, UniformStream state, double epsilon);

/// alpha * (cos(5x)/2 + cos(sqrt(5) x)/2); time independent.
std::vector<double> quasiperiodic_profile(const Grid1D& grid, double alpha, NodeRange range);
std::vector<double> quasiperiodic_profile(const Grid1D& grid, double alpha);

/// Realized sigma(x, t): contiguous segments [k tau, (k+1) tau).
class SigmaSchedule {
public:
    const PerturbationSpec& spec() const { return spec_; }
    const Grid1D& grid() const { return grid_; }
    double t_final() const { return t_final_; }

    std::size_t segment_count() const { return starts_.size(); }
    double segment_start(std::size_t k) const { return starts_.at(k); }
    std::span<const double> profile(std::size_t k) const { return profiles_.at(k); }

    // tau for refreshing kinds (chaotic, random), t_final otherwise.
    double segment_length() const;
    bool refreshes() const { return refreshes_; }

    // floor(t / tau), with t_final mapped into the last segment.
    // Throws ContractError for t outside [0, t_final].
    std::size_t segment_index(double t) const;
    // Same lookup by integer step count; exact when tau / dt is integral.
    std::size_t segment_index_for_step(std::size_t step, std::size_t steps_per_segment) const;

    double sigma_at(std::size_t node, double t) const;

    std::size_t reseed_count() const { return reseeds_; }
    // Generator state after the last segment.
    const LogisticChain& chain_state() const { return chain_; }

private:
    friend SigmaSchedule build_schedule(const PerturbationSpec&, const Grid1D&, double);

    PerturbationSpec spec_;
    Grid1D grid_;
    double t_final_ = 0.0;
    bool refreshes_ = false;
    std::vector<double> starts_;
    std::vector<std::vector<double>> profiles_;
    LogisticChain chain_;
    std::size_t reseeds_ = 0;
};

// ceil(t_final / tau) segments for chaotic and random kinds, a single
// segment for none (all zero) and quasiperiodic.
// Throws ConfigError for an invalid spec or t_final <= 0.
SigmaSchedule build_schedule(const PerturbationSpec& spec, const Grid1D& grid, double t_final);

inline double nonlinearity(double background, double sigma) {
    return background * (1.0 + sigma);
}

}  // namespace nlse
