#pragma once

#include <cstddef>
#include <string_view>

namespace optomech {

enum class BathKind { Separate, Common };

std::string_view to_string(BathKind bath);
BathKind parse_bath(std::string_view text);  // "sb" | "cb" (case-insensitive)

// SI-unit description of one device pair. Only used at the ingestion boundary.
struct PhysicalParams {
    double mass = 0.0;          // effective mass [kg]
    double omega_m1 = 0.0;      // [rad/s]
    double omega_m2 = 0.0;      // [rad/s]
    double kappa = 0.0;         // cavity energy decay rate [rad/s]
    double gamma = 0.0;         // mechanical energy damping rate [rad/s]
    double spring_k = 0.0;      // mechanical spring coupling [N/m]
    double detuning = 0.0;      // laser minus cavity frequency [rad/s]
    double input_power = 0.0;   // [W]
    double omega_c = 0.0;       // cavity resonance [rad/s]
    double omega_laser = 0.0;   // [rad/s]
    double length_om = 0.0;     // effective optomechanical length [m]
    double temperature = 0.0;   // bath temperature [K]
    bool zero_temperature = false;  // ground-state bath; temperature is ignored
    BathKind bath = BathKind::Separate;

    void validate() const;
};

// Dimensionless model: frequencies and rates in units of the cavity decay rate.
struct SystemParams {
    double omega_m1 = 1.0;
    double omega_m2 = 1.0;
    double damping = 0.01;    // Gamma
    double coupling = 0.0;    // K_c
    double detuning = 0.0;    // Delta_0
    double power = 0.0;       // dimensionless drive
    double n_th = 0.0;        // bath phonon occupancy
    BathKind bath = BathKind::Separate;

    void validate() const;

    [[nodiscard]] bool identical() const noexcept { return omega_m1 == omega_m2; }
    [[nodiscard]] double frequency_detuning() const noexcept { return omega_m2 - omega_m1; }
    // Q_m = omega_m / Gamma, using the first unit.
    [[nodiscard]] double quality_factor() const noexcept { return omega_m1 / damping; }
    [[nodiscard]] double relative_coupling() const noexcept { return coupling / (omega_m1 * omega_m1); }

    [[nodiscard]] std::size_t hash() const noexcept;

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

struct NormalModes {
    double omega_plus = 0.0;   // center of mass
    double omega_minus = 0.0;  // relative coordinate
    double omega_bar = 0.0;    // (omega_plus + omega_minus) / 2
};

SystemParams nondimensionalize(const PhysicalParams& p);

// n_th = 1 / (exp(r) - 1) with r = hbar omega_m / (k_B T). Requires r > 0.
double thermal_occupancy(double hbar_omega_over_kt);

NormalModes normal_modes(const SystemParams& p);

// g / omega_m for a steady intracavity photon number |a_st|^2 (dimensionless
// amplitude): g^2 = P |a_st|^2 / (2 omega_m) in units of kappa.
double coupling_g(const SystemParams& p, double cavity_photons);

namespace constants {
inline constexpr double hbar = 1.054571817e-34;   // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J / K
}  // namespace constants

}  // namespace optomech
