#include "nlse/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "nlse/errors.hpp"

namespace nlse {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(std::string_view key, std::string_view value) {
    double out = 0.0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    // from_chars rejects a leading '+'; accept it for hand-written files.
    if (begin != end && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(std::string(key) + ": '" + std::string(value) + "' is not a number");
    }
    return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view value) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError(std::string(key) + ": '" + std::string(value) +
                          "' is not an unsigned integer");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError(std::string(key) + ": '" + std::string(value) + "' is not a boolean");
}

std::vector<double> parse_list(std::string_view key, std::string_view value) {
    std::vector<double> out;
    while (!value.empty()) {
        const auto comma = value.find(',');
        const auto item = trim(value.substr(0, comma));
        if (item.empty()) throw ConfigError(std::string(key) + ": empty list entry");
        out.push_back(parse_real(key, item));
        if (comma == std::string_view::npos) break;
        value.remove_prefix(comma + 1);
    }
    return out;
}

// Wraps a component's ConfigError so the message leads with the config key.
template <class F>
void with_key(std::string_view key, F&& check) {
    try {
        check();
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        if (what.rfind(key, 0) == 0) throw;
        throw ConfigError(std::string(key) + ": " + what);
    }
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"grid.x_min", [](RunConfig& c, auto k, auto v) { c.grid.x_min = parse_real(k, v); }},
        {"grid.x_max", [](RunConfig& c, auto k, auto v) { c.grid.x_max = parse_real(k, v); }},
        {"grid.dx", [](RunConfig& c, auto k, auto v) { c.grid.dx = parse_real(k, v); }},
        {"solver.dt", [](RunConfig& c, auto k, auto v) { c.solver.dt = parse_real(k, v); }},
        {"solver.t_final", [](RunConfig& c, auto k, auto v) { c.solver.t_final = parse_real(k, v); }},
        {"solver.G", [](RunConfig& c, auto k, auto v) { c.solver.background = parse_real(k, v); }},
        {"solver.boundary",
         [](RunConfig& c, auto k, auto v) { with_key(k, [&] { c.solver.boundary = parse_boundary(v); }); }},
        {"solver.splitting",
         [](RunConfig& c, auto k, auto v) { with_key(k, [&] { c.solver.splitting = parse_splitting(v); }); }},
        {"solver.sample_interval",
         [](RunConfig& c, auto k, auto v) { c.solver.sample_interval = parse_real(k, v); }},
        {"perturbation.kind",
         [](RunConfig& c, auto k, auto v) {
             with_key(k, [&] { c.perturbation.kind = parse_perturbation_kind(v); });
         }},
        {"perturbation.epsilon",
         [](RunConfig& c, auto k, auto v) { c.perturbation.epsilon = parse_real(k, v); }},
        {"perturbation.tau",
         [](RunConfig& c, auto k, auto v) { c.perturbation.refresh_interval = parse_real(k, v); }},
        {"perturbation.mu",
         [](RunConfig& c, auto k, auto v) { c.perturbation.logistic_mu = parse_real(k, v); }},
        {"perturbation.seed", [](RunConfig& c, auto k, auto v) { c.perturbation.seed = parse_u64(k, v); }},
        {"perturbation.c0",
         [](RunConfig& c, auto k, auto v) { c.perturbation.initial_iterate = parse_real(k, v); }},
        {"perturbation.alpha", [](RunConfig& c, auto k, auto v) { c.perturbation.alpha = parse_real(k, v); }},
        {"perturbation.x_lo",
         [](RunConfig& c, auto k, auto v) { c.perturbation.region_lo = parse_real(k, v); }},
        {"perturbation.x_hi",
         [](RunConfig& c, auto k, auto v) { c.perturbation.region_hi = parse_real(k, v); }},
        {"initial.x0", [](RunConfig& c, auto k, auto v) { c.x0 = parse_real(k, v); }},
        {"output.directory",
         [](RunConfig& c, auto k, auto v) {
             if (v.empty()) throw ConfigError(std::string(k) + ": must not be empty");
             c.output.directory = std::string(v);
         }},
        {"output.snapshot_times",
         [](RunConfig& c, auto k, auto v) { c.output.snapshot_times = parse_list(k, v); }},
        {"output.emit_sigma",
         [](RunConfig& c, auto k, auto v) { c.output.emit_sigma = parse_bool(k, v); }},
    };
    return table;
}

}  // namespace

std::string format_double(double value) {
    std::array<char, 40> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::general, 17);
    if (ec != std::errc()) throw IoError("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

Grid1D RunConfig::make_grid() const {
    return nlse::make_grid(grid.x_min, grid.x_max, grid.dx);
}

SolverParams RunConfig::solver_params() const {
    SolverParams p = solver;
    if (!(p.sample_interval > 0.0)) p.sample_interval = p.t_final / kDefaultSamplesPerRun;
    return p;
}

std::vector<double> RunConfig::snapshot_times() const {
    if (output.snapshot_times.empty()) return {0.0, solver.t_final};
    return output.snapshot_times;
}

Preset parse_preset(std::string_view name) {
    if (name == "paper") return Preset::paper;
    if (name == "desk") return Preset::desk;
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected desk or paper)");
}

RunConfig apply_preset(RunConfig config, Preset preset) {
    switch (preset) {
        case Preset::paper:
            config.grid.dx = 0.01;
            config.solver.dt = 1e-4;
            config.solver.t_final = 200.0;
            break;
        case Preset::desk:
            config.grid.dx = 0.02;
            config.solver.dt = 1e-3;
            config.solver.t_final = 100.0;
            break;
    }
    return config;
}

void validate(const RunConfig& config) {
    Grid1D grid;
    with_key("grid.dx", [&] { grid = config.make_grid(); });
    if (grid.size() < 3) throw ConfigError("grid.dx: grid needs at least 3 nodes");

    const SolverParams params = config.solver_params();
    validate(params);
    validate(config.perturbation);

    if (config.perturbation.kind == PerturbationKind::chaotic ||
        config.perturbation.kind == PerturbationKind::random) {
        const double tau = config.perturbation.refresh_interval;
        if (!(params.dt < tau)) throw ConfigError("perturbation.tau: must exceed solver.dt");
        const double ratio = tau / params.dt;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
            throw ConfigError("perturbation.tau: must be an integer multiple of solver.dt");
        }
    }
    with_key("perturbation.x_lo", [&] { (void)affected_nodes(config.perturbation, grid); });

    const double t_steps = params.t_final / params.dt;
    if (std::abs(t_steps - std::round(t_steps)) > 1e-9 * std::max(1.0, t_steps)) {
        throw ConfigError("solver.t_final: must be an integer multiple of solver.dt");
    }
    if (!std::isfinite(config.x0) || !grid.contains(config.x0)) {
        throw ConfigError("initial.x0: must lie on the grid");
    }
    for (double t : config.output.snapshot_times) {
        if (!(t >= 0.0 && t <= params.t_final)) {
            throw ConfigError("output.snapshot_times: " + format_double(t) + " outside [0, t_final]");
        }
    }
}

RunConfig parse_config(std::string_view text, const RunConfig& base) {
    RunConfig config = base;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing key");

        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        }
        if (!seen.insert(std::string(key)).second) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
        }
        if (value.empty() && key != "output.snapshot_times") {
            throw ConfigError("line " + std::to_string(line_no) + ": " + std::string(key) + " has no value");
        }
        it->second(config, key, value);
    }
    validate(config);
    return config;
}

RunConfig load_config(const std::string& path, const RunConfig& base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), base);
}

std::string to_config_text(const RunConfig& c) {
    std::ostringstream out;
    auto line = [&](std::string_view key, const std::string& value) { out << key << " = " << value << '\n'; };
    line("grid.x_min", format_double(c.grid.x_min));
    line("grid.x_max", format_double(c.grid.x_max));
    line("grid.dx", format_double(c.grid.dx));
    line("solver.dt", format_double(c.solver.dt));
    line("solver.t_final", format_double(c.solver.t_final));
    line("solver.G", format_double(c.solver.background));
    line("solver.boundary", std::string(to_string(c.solver.boundary)));
    line("solver.splitting", std::string(to_string(c.solver.splitting)));
    line("solver.sample_interval", format_double(c.solver.sample_interval));
    line("perturbation.kind", std::string(to_string(c.perturbation.kind)));
    line("perturbation.epsilon", format_double(c.perturbation.epsilon));
    line("perturbation.tau", format_double(c.perturbation.refresh_interval));
    line("perturbation.mu", format_double(c.perturbation.logistic_mu));
    line("perturbation.seed", std::to_string(c.perturbation.seed));
    if (c.perturbation.initial_iterate) line("perturbation.c0", format_double(*c.perturbation.initial_iterate));
    if (c.perturbation.alpha) line("perturbation.alpha", format_double(*c.perturbation.alpha));
    if (c.perturbation.region_lo) line("perturbation.x_lo", format_double(*c.perturbation.region_lo));
    if (c.perturbation.region_hi) line("perturbation.x_hi", format_double(*c.perturbation.region_hi));
    line("initial.x0", format_double(c.x0));
    line("output.directory", c.output.directory);
    std::string times;
    for (std::size_t i = 0; i < c.output.snapshot_times.size(); ++i) {
        if (i) times += ',';
        times += format_double(c.output.snapshot_times[i]);
    }
    line("output.snapshot_times", times);
    line("output.emit_sigma", c.output.emit_sigma ? "true" : "false");
    return out.str();
}

std::string config_hash(const RunConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_config_text(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

}  // namespace nlse
