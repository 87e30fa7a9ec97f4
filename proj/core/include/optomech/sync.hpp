#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "optomech/classical.hpp"
#include "optomech/error.hpp"
#include "optomech/params.hpp"

namespace optomech {

enum class PhaseClass { InPhase, AntiPhase, Intermediate };
std::string_view to_string(PhaseClass c);

// in-phase: [0, 0.1) or (0.9, 1); anti-phase: (0.4, 0.6); otherwise intermediate.
PhaseClass classify_phase(double phase_lock);

struct SyncResult {
    double c_zero = 0.0;
    double c_max = 0.0;
    double phase_lock = 0.0;  // tau_max / period, in [0, 1)
    double period = 0.0;
    bool synchronized = false;

    [[nodiscard]] PhaseClass phase_class() const { return classify_phase(phase_lock); }
};

// Windowed Pearson correlation over the full spans (the window). Needs >= 10
// samples and nonzero variance; throws Error{ZeroVariance}.
double pearson(std::span<const double> x1, std::span<const double> x2);

// Dominant period of a uniformly sampled signal from the Hann-windowed,
// zero-padded spectrum with quadratic peak interpolation.
// Throws Error{NoDominantPeak}.
double estimate_period(std::span<const double> x, double dt);

struct DelayScanOptions {
    double window = 0.0;           // Delta t; 0 selects window_periods * period
    double window_periods = 50.0;
    std::size_t n_delays = 128;
    double threshold = 0.9;
};

// Correlation of x1(t) with x2(t + tau), tau on a uniform grid over [0, T],
// x2 resampled with a cubic B-spline. Window starts at the first sample.
SyncResult delay_scan(std::span<const double> x1, std::span<const double> x2, double dt,
                      const DelayScanOptions& options = {});
SyncResult delay_scan(const Trajectory& traj, const DelayScanOptions& options = {});

// Integration and analysis settings shared by threshold searches and maps.
struct SyncRunOptions {
    double transient = 0.0;        // 0 selects 50 / Gamma
    double dt_sample = 0.05;
    double initial_displacement = 0.1;
    std::optional<std::uint64_t> random_ic_seed;  // set to probe multistability
    IntegratorControls integrator{};
    DelayScanOptions scan{};
    double period_guess = 0.0;     // 0: 2 pi / omega_m1, used to size the run
};

// One cell: integrate from the configured initial state, discard the transient,
// and run the delay scan.
SyncResult simulate_sync(const SystemParams& p, const SyncRunOptions& options = {});

// Smallest K_c in [kc_lo, kc_hi] that synchronizes (bisection on the flag to
// relative precision rel_tol). Returns 0 when already synchronized at kc_lo = 0.
// Throws Error{NoBracket} otherwise when the flag does not change over the range.
double sync_threshold(const SystemParams& p, double frequency_detuning, double kc_lo, double kc_hi,
                      const SyncRunOptions& options = {}, double rel_tol = 1e-3);

struct SyncCell {
    double frequency_detuning = 0.0;
    double coupling = 0.0;
    std::optional<SyncResult> result;
    std::optional<ErrorCode> error;
    std::string message;
};

// Row-major over (detunings outer, couplings inner). Cells run on `workers`
// threads; output order is fixed by the grid.
std::vector<SyncCell> sync_map(const SystemParams& p, std::span<const double> detunings,
                               std::span<const double> couplings, const SyncRunOptions& options = {},
                               unsigned workers = 1);

}  // namespace optomech
