#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "optomech/gaussian.hpp"
#include "optomech/params.hpp"
#include "optomech/sync.hpp"

namespace optomech {

enum class ExperimentKind {
    Trajectory,
    SyncMap,
    SyncThreshold,
    Steady,
    DetuningScan,
    PowerScan,
    OptimizeDetuning,
    SidebandScan,
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

struct Axis {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    bool log_spaced = false;

    void validate(std::string_view name) const;
    [[nodiscard]] std::vector<double> values() const;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Steady;
    SystemParams base{};
    // Axis names: "frequency_detuning", "coupling", "delta0", "power", "omega_m".
    std::map<std::string, Axis> axes;
    std::filesystem::path out_dir = "optomech-run";
    unsigned workers = 1;
    std::uint64_t seed = 0;
    bool randomized_ic = false;
    bool both_baths = true;  // quantum experiments run SB and CB side by side

    double t_end = 200.0;  // trajectory
    double dt_sample = 0.05;
    double record_from = 0.0;

    SyncRunOptions sync{};
    double threshold_detuning = 0.05;  // syncthreshold: fixed Delta omega_m

    double relative_coupling = 0.5;  // sideband-scan: K_c / omega_m^2
    double g_min = 1e-3;             // sideband-scan power window, as g / omega_m
    double g_max = 0.5;

    std::size_t optimizer_grid = 64;
    double optimizer_tol = 1e-4;

    void validate() const;
};

// ---- 1-D optimizers over the steady Gaussian state ----

struct Optimum {
    double arg = 0.0;
    double value = 0.0;
    bool boundary_limited = false;
};

struct DetuningOptimum {
    Optimum entanglement;  // argmax E_N(mech)
    Optimum cooling;       // argmin n_eff
    std::size_t stable_cells = 0;
    std::size_t skipped_cells = 0;
};

// Grid (>= 64 points) over Delta0 in [lo, hi], unstable cells skipped, then
// golden-section refinement of each objective to `tol`.
// Throws Error{AllUnstable}.
DetuningOptimum optimize_detuning(const SystemParams& p, double lo, double hi, std::size_t grid = 64,
                                  double tol = 1e-4);

struct PowerOptimum {
    Optimum entanglement;
    Optimum cooling;
    double g_at_entanglement = 0.0;
    double g_at_cooling = 0.0;
    std::size_t stable_cells = 0;
    std::size_t skipped_cells = 0;
};

// Same over the drive P on a logarithmic grid; `tol` is relative.
PowerOptimum optimize_power(const SystemParams& p, double lo, double hi, std::size_t grid = 64,
                            double tol = 1e-4);

// Drive range giving g / omega_m in [g_min, g_max] for the undisplaced cavity.
std::pair<double, double> power_window(const SystemParams& p, double g_min, double g_max);

struct SidebandRecord {
    double omega_m = 0.0;
    std::optional<PowerOptimum> common;
    std::optional<PowerOptimum> separate;
    std::optional<PowerOptimum> single;  // one unit, K_c = 0
    std::string error;
};

// For each omega_m: Gamma = omega_m / Q_m (Q_m from `p`), K_c = relative_coupling
// * omega_m^2, Delta0 = -omega_m, then optimize_power for CB, SB and a single unit.
std::vector<SidebandRecord> sideband_scan(const SystemParams& p, std::span<const double> omegas,
                                          double relative_coupling = 0.5, double g_min = 1e-3,
                                          double g_max = 0.5, std::size_t grid = 64, double tol = 1e-4,
                                          unsigned workers = 1);

// ---- sweep records ----

struct QuantumRecord {
    SystemParams params;
    std::optional<QuantumResult> result;
    std::string status = "ok";  // ok | unstable | <error code>
};

// Steady analysis for every value of one SystemParams field ("delta0",
// "power", "coupling", "omega_m"), for each requested bath.
std::vector<QuantumRecord> quantum_scan(const SystemParams& p, std::string_view field,
                                        std::span<const double> values, std::span<const BathKind> baths,
                                        unsigned workers = 1);

struct RunSummary {
    std::vector<std::filesystem::path> files;
    std::size_t cells = 0;
    std::size_t failed_cells = 0;
};

// Executes the experiment into spec.out_dir (manifest.json + CSV + gnuplot
// scripts). Per-cell failures are recorded in the tables; systemic failures throw.
RunSummary run(const ExperimentSpec& spec);

}  // namespace optomech
