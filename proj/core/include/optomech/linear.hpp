#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optomech/params.hpp"

namespace optomech {

using Matrix8 = Eigen::Matrix<double, 8, 8>;
using Eigenvalues8 = std::array<std::complex<double>, 8>;

// Fluctuation vector ordering used everywhere:
// R = (dQ1, dP1, dQ2, dP2, dx1, dp1, dx2, dp2).
namespace index {
inline constexpr int Q1 = 0, P1 = 1, Q2 = 2, P2 = 3, X1 = 4, Px1 = 5, X2 = 6, Px2 = 7;
}
const std::array<std::string, 8>& canonical_labels();

struct Stability {
    Eigenvalues8 eigenvalues{};
    double max_real = 0.0;
    bool stable = false;
};

// Symmetric steady state x1 = x2 = x_st, p = 0, a1 = a2 = a_st.
struct FixedPoint {
    double x_st = 0.0;
    double p_st = 0.0;
    std::complex<double> a_st{0.0, 0.0};
    double q_st = 0.0;  // sqrt(2) Re a_st
    double pq_st = 0.0; // sqrt(2) Im a_st (the optical P quadrature)
    Eigenvalues8 eigenvalues{};
    bool stable = false;

    [[nodiscard]] double cavity_photons() const noexcept { return std::norm(a_st); }
};

// All real roots of omega^2 x = P (1/4) / (1/4 + (Delta0 + x)^2), sorted by x_st.
// Identical units only. Each root carries its drift spectrum.
std::vector<FixedPoint> find_fixed_points(const SystemParams& p);

// Stable root with smallest |x_st|, or nullptr-equivalent empty optional via index -1.
// Returns the index into `points`, or -1 when no root is stable.
int select_stable(const std::vector<FixedPoint>& points);

// Drift matrix of the linearized Langevin equations in the printed scaling.
Matrix8 drift_matrix(const SystemParams& p, const FixedPoint& fp);

// Same drift with every mechanical dissipation entry removed.
Matrix8 conservative_drift(const SystemParams& p, const FixedPoint& fp);

// Delta-correlated noise strengths in the printed scaling. Optical entries carry
// (omega_m / P) / 2, so P must be > 0 here.
Matrix8 noise_matrix(const SystemParams& p);

// Diagonal similarity S taking the printed quadratures to canonical ones
// (vacuum variance 1/2 per quadrature): optical * sqrt(P/omega_m), dp / omega_m.
Eigen::Matrix<double, 8, 1> canonical_scaling(const SystemParams& p);

// S M S^-1 and S N S, assembled directly so that P = 0 is well defined.
Matrix8 canonical_drift(const SystemParams& p, const FixedPoint& fp);
Matrix8 canonical_noise(const SystemParams& p);

Stability stability(const Matrix8& m);

// Bisection on the leading real part of the drift spectrum over Delta0 in [lo, hi]
// to `tol`. Uses the fixed point with smallest |x_st|. Throws Error{NoBracket}.
double hopf_scan(const SystemParams& p, double lo, double hi, double tol = 1e-6);

// Leading real part of the drift spectrum at detuning `delta0` (smallest-|x| root).
double leading_real_part(const SystemParams& p, double delta0);

// Common-bath system in the basis (dQ1, dP1, dQ2, dP2, dx+, dp+, dx-, dp-),
// built from the normal-mode Langevin equations.
struct NormalModeSystem {
    Matrix8 drift;
    Matrix8 noise;
    Matrix8 basis;  // orthogonal T with R' = T R
};
NormalModeSystem cb_normal_mode_matrices(const SystemParams& p, const FixedPoint& fp);

}  // namespace optomech
