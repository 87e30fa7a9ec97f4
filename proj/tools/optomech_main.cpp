// Batch experiment driver. Exit codes: 0 success, 2 config error, 3 runtime failure.
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "optomech/config.hpp"
#include "optomech/error.hpp"
#include "optomech/experiment.hpp"

namespace {

using namespace optomech;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// "name=lo,hi,count[,log]"
std::pair<std::string, Axis> parse_axis(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "axis '" + text + "' needs name=lo,hi,count");
    std::vector<std::string> parts;
    std::stringstream ss(text.substr(eq + 1));
    for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
    if (parts.size() < 3 || parts.size() > 4 || (parts.size() == 4 && parts[3] != "log")) {
        throw Error(ErrorCode::ConfigError, "axis '" + text + "' needs name=lo,hi,count[,log]");
    }
    Axis axis;
    try {
        axis.lo = std::stod(parts[0]);
        axis.hi = std::stod(parts[1]);
        axis.count = std::stoul(parts[2]);
    } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError, "axis '" + text + "' has a malformed number");
    }
    axis.log_spaced = parts.size() == 4;
    return {text.substr(0, eq), axis};
}

// Axes the experiment needs but the config left out.
void add_default_axes(ExperimentSpec& spec) {
    const double w = spec.base.omega_m1;
    auto fill = [&](const char* name, Axis axis) { spec.axes.try_emplace(name, axis); };
    switch (spec.kind) {
        case ExperimentKind::SyncMap:
            fill("frequency_detuning", {0.0, 0.1, 11, false});
            fill("coupling", {0.0, 0.1, 11, false});
            break;
        case ExperimentKind::SyncThreshold: fill("coupling", {0.0, 0.5, 2, false}); break;
        case ExperimentKind::DetuningScan: fill("delta0", {-2.0 * w, 0.0, 121, false}); break;
        case ExperimentKind::PowerScan: fill("power", {1e-2, 1e2, 81, true}); break;
        case ExperimentKind::OptimizeDetuning: fill("delta0", {-2.0 * w, 0.0, 64, false}); break;
        case ExperimentKind::SidebandScan: fill("omega_m", {1.0, 10.0, 10, false}); break;
        default: break;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled optomechanical oscillators: synchronization and steady-state Gaussian analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    unsigned workers = 0;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> axes;
    ParamOverrides ov;
    std::string bath_text;

    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed for randomized initial conditions (enables them)");
    app.add_option("--axis", axes, "scan axis override: name=lo,hi,count[,log]");
    app.add_option("--omega-m", ov.omega_m, "mechanical frequency (both units)");
    app.add_option("--gamma", ov.gamma, "mechanical damping rate");
    app.add_option("--kc", ov.kc, "mechanical spring coupling");
    app.add_option("--delta0", ov.delta0, "laser detuning");
    app.add_option("--power", ov.power, "dimensionless pump power");
    app.add_option("--nth", ov.n_th, "thermal occupancy");
    app.add_option("--bath", bath_text, "sb or cb (default: both where applicable)")
        ->check(CLI::IsMember({"sb", "cb"}));

    const std::pair<const char*, const char*> commands[] = {
        {"trajectory", "integrate the classical equations and write the time series"},
        {"syncmap", "classical synchronization map over frequency detuning and coupling"},
        {"syncthreshold", "minimal coupling for synchronization at fixed frequency detuning"},
        {"steady", "steady-state Gaussian analysis at one parameter point"},
        {"detuning-scan", "entanglement and occupancy versus laser detuning"},
        {"power-scan", "entanglement and occupancy versus pump power"},
        {"optimize-detuning", "optimal laser detuning versus relative coupling"},
        {"sideband-scan", "optimal power versus mechanical frequency at red-sideband detuning"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    ExperimentSpec spec;
    try {
        spec = config_path.empty() ? ExperimentSpec{} : load_config(config_path);
        spec.kind = parse_experiment_kind(app.get_subcommands().front()->get_name());
        if (!bath_text.empty()) ov.bath = parse_bath(bath_text);
        apply_overrides(spec, ov);
        if (!out_dir.empty()) spec.out_dir = out_dir;
        if (workers > 0) spec.workers = workers;
        if (seed) {
            spec.seed = *seed;
            spec.randomized_ic = true;
        }
        for (const auto& text : axes) {
            auto [name, axis] = parse_axis(text);
            spec.axes[name] = axis;
        }
        add_default_axes(spec);
        spec.validate();
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        const RunSummary summary = run(spec);
        std::cout << "wrote " << summary.files.size() << " files to " << spec.out_dir.string() << " ("
                  << summary.cells << " cells, " << summary.failed_cells << " failed)\n";
        for (const auto& f : summary.files) std::cout << "  " << f.string() << "\n";
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::InvalidParameter ? kExitConfig
                                                                                              : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return EXIT_SUCCESS;
}
