#pragma once

// Run orchestration and persistence.
//
// Files written per run (column orders are fixed):
//   timeseries.csv  t,power,height_x0,centroid,peak_pos,peak_height
//   snapshots.csv   t,x,re,im,density          (rows grouped by snapshot)
//   sigma.csv       segment,t_start,x,sigma    (only with output.emit_sigma)
//   summary.csv     kind,epsilon,seed,power_error,signed_mean,mean_abs,rms,
//                   l_inf,min_peak_height,final_centroid,status

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nlse/config.hpp"
#include "nlse/diagnostics.hpp"
#include "nlse/disorder.hpp"
#include "nlse/field.hpp"

namespace nlse {

struct Snapshot {
    double t = 0.0;
    WaveField field;
};

enum class RunStatus { ok, diverged, failed };

struct SummaryRow {
    PerturbationKind kind = PerturbationKind::none;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    double power_error = 0.0;
    ErrorReport errors;
    double min_peak_height = 0.0;
    double final_centroid = 0.0;
    RunStatus status = RunStatus::ok;
    std::string detail;  // failure reason; empty when ok

    std::string status_text() const;
};

struct RunResult {
    RunConfig config;
    RunStatus status = RunStatus::ok;
    std::string message;
    WaveField initial;
    WaveField final_state;  // last finite state if the run diverged
    double final_time = 0.0;
    std::vector<DiagnosticsRecord> records;
    std::vector<Snapshot> snapshots;
    RunSummary summary;
    std::size_t chaotic_reseeds = 0;
    std::vector<std::string> warnings;

    SummaryRow row() const;
};

// Builds the schedule, evolves and summarizes, without touching the disk.
// Divergence is reported through the status, never thrown.
RunResult simulate(const RunConfig& config);

// simulate() and then write every output file into config.output.directory.
// Partial outputs of a diverged run are written as well.
RunResult run(const RunConfig& config);

void write_outputs(const RunResult& result, const std::filesystem::path& directory);

struct SweepResult {
    std::vector<SummaryRow> rows;  // cartesian order: kind, then epsilon, then seed
};

// One run per (kind, epsilon, seed). Each run writes into its own
// subdirectory of base.output.directory and the rows are aggregated into
// base.output.directory/summary.csv. threads = 0 uses the hardware count.
// A failing run becomes an annotated row; the sweep continues.
SweepResult sweep(const RunConfig& base, std::span<const PerturbationKind> kinds,
                  std::span<const double> epsilons, std::span<const std::uint64_t> seeds,
                  unsigned threads = 0, bool write_files = true);

std::string run_directory_name(PerturbationKind kind, double epsilon, std::uint64_t seed);

// --- CSV -------------------------------------------------------------------

void write_timeseries(const std::filesystem::path& path, std::span<const DiagnosticsRecord> records);
void write_snapshots(const std::filesystem::path& path, std::span<const Snapshot> snapshots);
void write_sigma(const std::filesystem::path& path, const SigmaSchedule& schedule);
void write_summary(const std::filesystem::path& path, std::span<const SummaryRow> rows);

// Reads snapshots.csv back onto the grid it was written from.
std::vector<Snapshot> read_snapshots(const std::filesystem::path& path, const Grid1D& grid);
std::vector<DiagnosticsRecord> read_timeseries(const std::filesystem::path& path);

}  // namespace nlse
