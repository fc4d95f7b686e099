#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "nlse/errors.hpp"
#include "nlse/experiment.hpp"

namespace nlse {
namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    while (true) {
        const auto comma = line.find(',');
        cells.push_back(line.substr(0, comma));
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    return cells;
}

double to_real(std::string_view cell, const std::filesystem::path& path, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad number '" +
                      std::string(cell) + "'");
    }
    return v;
}

// Returns data rows (header checked and dropped).
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path,
                                                  std::string_view header, std::size_t columns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw IoError(path.string() + ": unexpected header");
    }
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != columns) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(columns) + " columns");
        }
        std::vector<double> row;
        row.reserve(columns);
        for (auto c : cells) row.push_back(to_real(c, path, line_no));
        rows.push_back(std::move(row));
    }
    return rows;
}

constexpr std::string_view kTimeseriesHeader = "t,power,height_x0,centroid,peak_pos,peak_height";
constexpr std::string_view kSnapshotHeader = "t,x,re,im,density";
constexpr std::string_view kSigmaHeader = "segment,t_start,x,sigma";
constexpr std::string_view kSummaryHeader =
    "kind,epsilon,seed,power_error,signed_mean,mean_abs,rms,l_inf,min_peak_height,final_centroid,status";

}  // namespace

void write_timeseries(const std::filesystem::path& path, std::span<const DiagnosticsRecord> records) {
    if (records.empty()) throw ContractError("write_timeseries: no records");
    auto out = open_for_write(path);
    out << kTimeseriesHeader << '\n';
    for (const auto& r : records) {
        out << format_double(r.t) << ',' << format_double(r.power) << ',' << format_double(r.height_x0)
            << ',' << format_double(r.centroid) << ',' << format_double(r.peak_pos) << ','
            << format_double(r.peak_height) << '\n';
    }
    finish(out, path);
}

void write_snapshots(const std::filesystem::path& path, std::span<const Snapshot> snapshots) {
    auto out = open_for_write(path);
    out << kSnapshotHeader << '\n';
    for (const auto& s : snapshots) {
        const std::string t = format_double(s.t);
        const Grid1D& g = s.field.grid();
        for (std::size_t i = 0; i < s.field.size(); ++i) {
            const Complex z = s.field[i];
            out << t << ',' << format_double(g.x(i)) << ',' << format_double(z.real()) << ','
                << format_double(z.imag()) << ',' << format_double(std::norm(z)) << '\n';
        }
    }
    finish(out, path);
}

void write_sigma(const std::filesystem::path& path, const SigmaSchedule& schedule) {
    auto out = open_for_write(path);
    out << kSigmaHeader << '\n';
    const Grid1D& g = schedule.grid();
    for (std::size_t k = 0; k < schedule.segment_count(); ++k) {
        const std::string start = format_double(schedule.segment_start(k));
        const auto profile = schedule.profile(k);
        for (std::size_t i = 0; i < profile.size(); ++i) {
            out << k << ',' << start << ',' << format_double(g.x(i)) << ',' << format_double(profile[i])
                << '\n';
        }
    }
    finish(out, path);
}

void write_summary(const std::filesystem::path& path, std::span<const SummaryRow> rows) {
    auto out = open_for_write(path);
    out << kSummaryHeader << '\n';
    for (const auto& r : rows) {
        out << to_string(r.kind) << ',' << format_double(r.epsilon) << ',' << r.seed << ','
            << format_double(r.power_error) << ',' << format_double(r.errors.signed_mean) << ','
            << format_double(r.errors.mean_abs) << ',' << format_double(r.errors.rms) << ','
            << format_double(r.errors.l_inf) << ',' << format_double(r.min_peak_height) << ','
            << format_double(r.final_centroid) << ',' << r.status_text() << '\n';
    }
    finish(out, path);
}

std::vector<Snapshot> read_snapshots(const std::filesystem::path& path, const Grid1D& grid) {
    const auto rows = read_numeric_csv(path, kSnapshotHeader, 5);
    if (rows.size() % grid.size() != 0) {
        throw IoError(path.string() + ": row count is not a multiple of the grid size");
    }
    std::vector<Snapshot> out;
    for (std::size_t start = 0; start < rows.size(); start += grid.size()) {
        std::vector<Complex> values(grid.size());
        const double t = rows[start][0];
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& r = rows[start + i];
            if (r[0] != t) throw IoError(path.string() + ": snapshot block has mixed times");
            if (r[1] != grid.x(i)) throw IoError(path.string() + ": x column does not match the grid");
            values[i] = Complex(r[2], r[3]);
        }
        out.push_back({t, WaveField(grid, std::move(values))});
    }
    return out;
}

std::vector<DiagnosticsRecord> read_timeseries(const std::filesystem::path& path) {
    std::vector<DiagnosticsRecord> out;
    for (const auto& r : read_numeric_csv(path, kTimeseriesHeader, 6)) {
        out.push_back({r[0], r[1], r[2], r[3], r[4], r[5]});
    }
    return out;
}

}  // namespace nlse
