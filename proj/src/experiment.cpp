#include "nlse/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "nlse/errors.hpp"
#include "nlse/propagator.hpp"

namespace nlse {
namespace {

constexpr double kBoundaryWarningDistance = 2.0;

std::string sanitize(std::string text) {
    std::replace(text.begin(), text.end(), ',', ';');
    std::replace(text.begin(), text.end(), '\n', ' ');
    return text;
}

}  // namespace

std::string SummaryRow::status_text() const {
    switch (status) {
        case RunStatus::ok: return "ok";
        case RunStatus::diverged: return sanitize("diverged: " + detail);
        case RunStatus::failed: return sanitize("failed: " + detail);
    }
    return "failed";
}

SummaryRow RunResult::row() const {
    SummaryRow r;
    r.kind = config.perturbation.kind;
    r.epsilon = config.perturbation.amplitude();
    r.seed = config.perturbation.seed;
    r.power_error = summary.power_error;
    r.errors = summary.errors;
    r.min_peak_height = summary.min_peak_height;
    r.final_centroid = summary.final_centroid;
    r.status = status;
    r.detail = message;
    return r;
}

RunResult simulate(const RunConfig& config) {
    validate(config);
    const Grid1D grid = config.make_grid();
    const SolverParams params = config.solver_params();
    const SigmaSchedule schedule = build_schedule(config.perturbation, grid, params.t_final);

    RunResult result;
    result.config = config;
    result.chaotic_reseeds = schedule.reseed_count();
    if (result.chaotic_reseeds > 0) {
        result.warnings.push_back("logistic chain collapsed and was reseeded " +
                                  std::to_string(result.chaotic_reseeds) + " time(s)");
    }

    result.initial = soliton_initial(grid, config.x0);
    if (params.boundary == Boundary::dirichlet) {
        result.initial[0] = Complex{};
        result.initial[grid.size() - 1] = Complex{};
    }

    const std::vector<double> snapshot_times = config.snapshot_times();
    std::vector<std::size_t> snapshot_steps;
    for (double t : snapshot_times) {
        snapshot_steps.push_back(static_cast<std::size_t>(std::llround(t / params.dt)));
    }
    std::sort(snapshot_steps.begin(), snapshot_steps.end());
    snapshot_steps.erase(std::unique(snapshot_steps.begin(), snapshot_steps.end()), snapshot_steps.end());

    bool near_boundary = false;
    const auto observer = [&](double t, const WaveField& psi) {
        const auto step = static_cast<std::size_t>(std::llround(t / params.dt));
        if (std::binary_search(snapshot_steps.begin(), snapshot_steps.end(), step)) {
            result.snapshots.push_back({t, psi});
        }
        if (params.boundary == Boundary::dirichlet && !near_boundary) {
            const double pos = peak(psi).position;
            if (pos - grid.x_min() < kBoundaryWarningDistance ||
                grid.x(grid.size() - 1) - pos < kBoundaryWarningDistance) {
                near_boundary = true;
                result.warnings.push_back("density peak within " + format_double(kBoundaryWarningDistance) +
                                          " of a Dirichlet boundary at t = " + format_double(t));
            }
        }
    };

    try {
        EvolveResult evolved = evolve(result.initial, schedule, params, observer, snapshot_times);
        result.final_state = std::move(evolved.final_state);
        result.records = std::move(evolved.records);
        result.final_time = params.t_final;
    } catch (const DivergenceError& e) {
        result.status = RunStatus::diverged;
        result.message = e.what();
        result.final_state = e.last_finite();
        result.final_time = e.last_time();
        result.records = e.records();
        result.snapshots.push_back({e.last_time(), e.last_finite()});
    }
    result.summary = summarize(result.initial, result.final_state, result.records);
    return result;
}

void write_outputs(const RunResult& result, const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw IoError("cannot create " + directory.string() + ": " + ec.message());

    write_timeseries(directory / "timeseries.csv", result.records);
    write_snapshots(directory / "snapshots.csv", result.snapshots);
    const SummaryRow row = result.row();
    write_summary(directory / "summary.csv", std::span<const SummaryRow>(&row, 1));
    if (result.config.output.emit_sigma) {
        const SigmaSchedule schedule = build_schedule(result.config.perturbation, result.config.make_grid(),
                                                      result.config.solver.t_final);
        write_sigma(directory / "sigma.csv", schedule);
    }

    const auto config_path = directory / "run_config.txt";
    std::ofstream cfg(config_path, std::ios::binary | std::ios::trunc);
    cfg << "# config hash " << config_hash(result.config) << '\n' << to_config_text(result.config);
    if (!cfg) throw IoError("write failed for " + config_path.string());
}

RunResult run(const RunConfig& config) {
    RunResult result = simulate(config);
    write_outputs(result, config.output.directory);
    return result;
}

std::string run_directory_name(PerturbationKind kind, double epsilon, std::uint64_t seed) {
    // Shortest round-trip form keeps names readable ("0.2", not "0.20000000000000001").
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, epsilon);
    if (ec != std::errc()) throw IoError("run_directory_name: conversion failed");
    return std::string(to_string(kind)) + "_eps" + std::string(buf, end) + "_seed" + std::to_string(seed);
}

SweepResult sweep(const RunConfig& base, std::span<const PerturbationKind> kinds,
                  std::span<const double> epsilons, std::span<const std::uint64_t> seeds,
                  unsigned threads, bool write_files) {
    if (kinds.empty() || epsilons.empty() || seeds.empty()) {
        throw ConfigError("sweep: kinds, epsilons and seeds must all be non-empty");
    }

    struct Job {
        PerturbationKind kind;
        double epsilon;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (auto kind : kinds)
        for (double eps : epsilons)
            for (auto seed : seeds) jobs.push_back({kind, eps, seed});

    const std::filesystem::path root = base.output.directory;
    SweepResult result;
    result.rows.resize(jobs.size());

    auto run_job = [&](std::size_t i) {
        const Job& job = jobs[i];
        RunConfig cfg = base;
        cfg.perturbation.kind = job.kind;
        cfg.perturbation.epsilon = job.epsilon;
        cfg.perturbation.seed = job.seed;
        cfg.perturbation.alpha.reset();
        cfg.perturbation.initial_iterate.reset();
        cfg.output.directory = (root / run_directory_name(job.kind, job.epsilon, job.seed)).string();

        SummaryRow row;
        row.kind = job.kind;
        row.epsilon = job.epsilon;
        row.seed = job.seed;
        try {
            const RunResult r = write_files ? run(cfg) : simulate(cfg);
            row = r.row();
        } catch (const std::exception& e) {
            constexpr double nan = std::numeric_limits<double>::quiet_NaN();
            row.power_error = nan;
            row.errors = {nan, nan, nan, nan};
            row.min_peak_height = nan;
            row.final_centroid = nan;
            row.status = RunStatus::failed;
            row.detail = e.what();
        }
        result.rows[i] = std::move(row);
    };

    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < jobs.size(); i = next++) run_job(i);
            });
        }
    }

    if (write_files) {
        std::error_code ec;
        std::filesystem::create_directories(root, ec);
        if (ec) throw IoError("cannot create " + root.string() + ": " + ec.message());
        write_summary(root / "summary.csv", result.rows);
    }
    return result;
}

}  // namespace nlse
