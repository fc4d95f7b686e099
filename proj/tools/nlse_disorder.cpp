// Command-line front end.
//
//   nlse_disorder simulate [--config FILE] [--preset desk|paper] [--out DIR] [--seed N]
//   nlse_disorder sweep    [--config FILE] [--preset desk|paper] [--out DIR]
//                          --kinds chaotic,random --epsilons 0.1,0.5 --seeds 1,2,3 [--threads N]
//   nlse_disorder config   [--config FILE] [--preset desk|paper]
//
// Exit status: 0 success, 1 I/O or other failure, 2 configuration error
// (including an unreadable config file), 3 simulation diverged.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlse/config.hpp"
#include "nlse/errors.hpp"
#include "nlse/experiment.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

struct CommonOptions {
    std::string config_path;
    std::string preset;
    std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "Config file (key = value lines)");
    cmd->add_option("--preset", opts.preset, "Parameter preset applied before the config file")
        ->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--out", opts.out, "Output directory (overrides output.directory)");
}

nlse::RunConfig resolve(const CommonOptions& opts) {
    nlse::RunConfig base;
    if (!opts.preset.empty()) base = nlse::apply_preset(base, nlse::parse_preset(opts.preset));
    nlse::RunConfig config;
    try {
        config = opts.config_path.empty() ? nlse::parse_config("", base) : nlse::load_config(opts.config_path, base);
    } catch (const nlse::IoError& e) {
        throw nlse::ConfigError(e.what());  // an unreadable config file is a usage error
    }
    if (!opts.out.empty()) config.output.directory = opts.out;
    return config;
}

void print_summary(const nlse::RunResult& r) {
    const auto& s = r.summary;
    std::cout << "kind            " << nlse::to_string(r.config.perturbation.kind) << '\n'
              << "epsilon         " << nlse::format_double(r.config.perturbation.amplitude()) << '\n'
              << "seed            " << r.config.perturbation.seed << '\n'
              << "status          " << r.row().status_text() << '\n'
              << "power P(0)      " << nlse::format_double(s.power_initial) << '\n'
              << "power error     " << nlse::format_double(s.power_error) << "  (bare sum)\n"
              << "relative drift  " << nlse::format_double(s.relative_drift) << '\n'
              << "signed_mean     " << nlse::format_double(s.errors.signed_mean) << '\n'
              << "mean_abs        " << nlse::format_double(s.errors.mean_abs) << '\n'
              << "rms             " << nlse::format_double(s.errors.rms) << '\n'
              << "l_inf           " << nlse::format_double(s.errors.l_inf) << '\n'
              << "min peak height " << nlse::format_double(s.min_peak_height) << '\n'
              << "final centroid  " << nlse::format_double(s.final_centroid) << '\n';
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
}

template <class T, class F>
std::vector<T> parse_csv_list(const std::string& text, F&& convert) {
    std::vector<T> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (item.empty()) throw nlse::ConfigError("empty entry in list '" + text + "'");
        out.push_back(convert(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size()) throw nlse::ConfigError("'" + s + "' is not a number");
    return v;
}

std::uint64_t to_u64(const std::string& s) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.front() == '-') throw nlse::ConfigError("'" + s + "' is not a seed");
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bright soliton under chaotic, random and quasiperiodic nonlinearity"};
    app.require_subcommand(1);

    CommonOptions sim_opts;
    std::optional<std::uint64_t> seed;
    auto* sim = app.add_subcommand("simulate", "Run one simulation and write CSV outputs");
    add_common(sim, sim_opts);
    sim->add_option("--seed", seed, "Perturbation seed (overrides perturbation.seed)");

    CommonOptions sweep_opts;
    std::string kinds_arg, eps_arg, seeds_arg = "1";
    unsigned threads = 0;
    auto* sw = app.add_subcommand("sweep", "Run the kind x epsilon x seed product");
    add_common(sw, sweep_opts);
    sw->add_option("--kinds", kinds_arg, "Comma-separated perturbation kinds")->required();
    sw->add_option("--epsilons", eps_arg, "Comma-separated amplitudes")->required();
    sw->add_option("--seeds", seeds_arg, "Comma-separated seeds");
    sw->add_option("--threads", threads, "Worker threads (0 = hardware)");

    CommonOptions cfg_opts;
    auto* cfg = app.add_subcommand("config", "Print the resolved config and its hash");
    add_common(cfg, cfg_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*sim) {
            nlse::RunConfig config = resolve(sim_opts);
            if (seed) config.perturbation.seed = *seed;
            const nlse::RunResult r = nlse::run(config);
            print_summary(r);
            std::cout << "outputs         " << config.output.directory << '\n';
            return r.status == nlse::RunStatus::diverged ? kExitDiverged : 0;
        }
        if (*sw) {
            const nlse::RunConfig base = resolve(sweep_opts);
            const auto kinds = parse_csv_list<nlse::PerturbationKind>(
                kinds_arg, [](const std::string& s) { return nlse::parse_perturbation_kind(s); });
            const auto eps = parse_csv_list<double>(eps_arg, to_double);
            const auto seeds = parse_csv_list<std::uint64_t>(seeds_arg, to_u64);
            const auto result = nlse::sweep(base, kinds, eps, seeds, threads);
            int status = 0;
            for (const auto& row : result.rows) {
                std::cout << nlse::to_string(row.kind) << " eps=" << nlse::format_double(row.epsilon)
                          << " seed=" << row.seed << " min_peak=" << nlse::format_double(row.min_peak_height)
                          << " mean_abs=" << nlse::format_double(row.errors.mean_abs) << ' '
                          << row.status_text() << '\n';
                if (row.status == nlse::RunStatus::diverged) status = kExitDiverged;
                if (row.status == nlse::RunStatus::failed && status == 0) status = kExitFailure;
            }
            std::cout << "summary         " << base.output.directory << "/summary.csv\n";
            return status;
        }
        if (*cfg) {
            const nlse::RunConfig config = resolve(cfg_opts);
            std::cout << "# config hash " << nlse::config_hash(config) << '\n' << nlse::to_config_text(config);
            return 0;
        }
    } catch (const nlse::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return 0;
}
