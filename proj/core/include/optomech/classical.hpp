#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "optomech/params.hpp"

namespace optomech {

// Mean-field state of both units in dimensionless variables.
struct ClassicalState {
    std::complex<double> a1{0.0, 0.0};
    std::complex<double> a2{0.0, 0.0};
    double x1 = 0.0;
    double p1 = 0.0;
    double x2 = 0.0;
    double p2 = 0.0;

    // Packed real layout: (Re a1, Im a1, Re a2, Im a2, x1, p1, x2, p2).
    using Packed = std::array<double, 8>;
    [[nodiscard]] Packed pack() const noexcept;
    static ClassicalState unpack(const Packed& v) noexcept;
    [[nodiscard]] bool finite() const noexcept;

    friend bool operator==(const ClassicalState&, const ClassicalState&) = default;
};

// Time derivative of the mean-field equations (same layout as the state).
ClassicalState rhs(const ClassicalState& s, const SystemParams& p);
void rhs(const ClassicalState::Packed& s, ClassicalState::Packed& ds, const SystemParams& p);

struct IntegratorControls {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double record_from = 0.0;   // samples before this time are integrated but not stored
    double initial_step = 1e-3;
    std::size_t max_steps_per_sample = 100000;
};

// Uniformly sampled trajectory; sample i sits at t0 + i * dt.
struct Trajectory {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<ClassicalState> samples;

    [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
    [[nodiscard]] double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt; }
    [[nodiscard]] std::vector<double> positions(int unit) const;  // unit 1 or 2
};

// Adaptive Dormand-Prince 5(4) with dense output on the grid
// record_from, record_from + dt_sample, ..., <= t_end.
// Throws Error{StepSizeUnderflow} or Error{NonFiniteState}.
Trajectory integrate(const ClassicalState& s0, const SystemParams& p, double t_end, double dt_sample,
                     const IntegratorControls& controls = {});

// Sweep initial condition: both mechanical units displaced by `displacement`
// at rest, empty cavities.
ClassicalState default_initial_state(double displacement = 0.1);

// Randomized variant for multistability probes; deterministic in `seed`.
ClassicalState random_initial_state(std::uint64_t seed, double scale = 0.5);

struct ModeEnergies {
    std::vector<double> plus;   // (p+^2 + Omega+^2 x+^2) / 2
    std::vector<double> minus;  // (p-^2 + Omega-^2 x-^2) / 2
};

// Energies of x_pm = (x1 +- x2)/sqrt(2); identical units only.
ModeEnergies mode_energies(const Trajectory& traj, const SystemParams& p);

// Default discard before any analysis: 50 mechanical damping times.
inline double default_transient(const SystemParams& p) { return 50.0 / p.damping; }

}  // namespace optomech
