#include "optomech/params.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <string>

#include "optomech/error.hpp"

namespace optomech {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::NoDominantPeak: return "NoDominantPeak";
        case ErrorCode::NoBracket: return "NoBracket";
        case ErrorCode::UnstableDrift: return "UnstableDrift";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::UnphysicalSubmatrix: return "UnphysicalSubmatrix";
        case ErrorCode::NegativeOccupancy: return "NegativeOccupancy";
        case ErrorCode::AllUnstable: return "AllUnstable";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

std::string_view to_string(BathKind bath) {
    return bath == BathKind::Common ? "cb" : "sb";
}

BathKind parse_bath(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "sb" || lower == "separate") return BathKind::Separate;
    if (lower == "cb" || lower == "common") return BathKind::Common;
    throw Error(ErrorCode::InvalidParameter, "unknown bath kind '" + std::string(text) + "'");
}

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw Error(ErrorCode::InvalidParameter, message);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void PhysicalParams::validate() const {
    require(finite_positive(kappa), "kappa must be positive");
    require(finite_positive(mass), "mass must be positive");
    require(finite_positive(length_om), "optomechanical length must be positive");
    require(finite_positive(omega_m1) && finite_positive(omega_m2), "mechanical frequencies must be positive");
    require(finite_positive(gamma), "mechanical damping must be positive");
    require(finite_positive(omega_c) && finite_positive(omega_laser), "optical frequencies must be positive");
    require(std::isfinite(detuning), "detuning must be finite");
    require(std::isfinite(spring_k) && spring_k >= 0.0, "spring coupling must be non-negative");
    require(std::isfinite(input_power) && input_power >= 0.0, "input power must be non-negative");
    require(std::isfinite(temperature) && temperature >= 0.0, "temperature must be non-negative");
    require(zero_temperature || temperature > 0.0,
            "temperature 0 requires the explicit zero_temperature flag");
}

void SystemParams::validate() const {
    require(finite_positive(omega_m1) && finite_positive(omega_m2), "omega_m1, omega_m2 must be > 0");
    require(finite_positive(damping), "damping Gamma must be > 0");
    require(std::isfinite(coupling) && coupling >= 0.0, "coupling K_c must be >= 0");
    require(std::isfinite(detuning), "detuning must be finite");
    require(std::isfinite(power) && power >= 0.0, "power must be >= 0");
    require(std::isfinite(n_th) && n_th >= 0.0, "n_th must be >= 0");
}

std::size_t SystemParams::hash() const noexcept {
    std::size_t seed = 0;
    auto mix = [&seed](double v) {
        seed ^= std::hash<double>{}(v) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    };
    for (double v : {omega_m1, omega_m2, damping, coupling, detuning, power, n_th}) mix(v);
    mix(bath == BathKind::Common ? 1.0 : 0.0);
    return seed;
}

SystemParams nondimensionalize(const PhysicalParams& p) {
    p.validate();
    const double k2 = p.kappa * p.kappa;
    SystemParams out;
    out.omega_m1 = p.omega_m1 / p.kappa;
    out.omega_m2 = p.omega_m2 / p.kappa;
    out.damping = p.gamma / p.kappa;
    out.coupling = p.spring_k / (p.mass * k2);
    out.detuning = p.detuning / p.kappa;
    out.power = 4.0 * p.input_power * p.omega_c / (p.mass * p.length_om * p.length_om * k2 * k2);
    out.n_th = p.zero_temperature
                   ? 0.0
                   : thermal_occupancy(constants::hbar * p.omega_m1 / (constants::k_boltzmann * p.temperature));
    out.bath = p.bath;
    return out;
}

double thermal_occupancy(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw Error(ErrorCode::InvalidParameter, "thermal ratio hbar*omega/kT must be finite and > 0");
    }
    // expm1 keeps precision in the classical limit r -> 0.
    return 1.0 / std::expm1(r);
}

NormalModes normal_modes(const SystemParams& p) {
    if (!p.identical()) {
        throw Error(ErrorCode::InvalidParameter, "normal modes require identical mechanical frequencies");
    }
    NormalModes m;
    m.omega_plus = p.omega_m1;
    m.omega_minus = std::sqrt(p.omega_m1 * p.omega_m1 + 2.0 * p.coupling);
    m.omega_bar = 0.5 * (m.omega_plus + m.omega_minus);
    return m;
}

double coupling_g(const SystemParams& p, double cavity_photons) {
    require(cavity_photons >= 0.0, "photon number must be non-negative");
    const double w = p.omega_m1;
    return std::sqrt(p.power * cavity_photons / (2.0 * w)) / w;
}

}  // namespace optomech
