#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Dense>

#include "optomech/linear.hpp"
#include "optomech/params.hpp"

namespace optomech {

// Langevin: quadratures exactly as they appear in the linearized equations.
// Canonical: every quadrature pair has vacuum variance 1/2 ([q, p] = i).
enum class Normalization { Langevin, Canonical };

struct CovarianceMatrix {
    Matrix8 values = Matrix8::Zero();
    BathKind bath = BathKind::Separate;
    std::size_t params_hash = 0;
    Normalization normalization = Normalization::Canonical;
};

CovarianceMatrix to_canonical(const CovarianceMatrix& c, const SystemParams& p);

// max |(M C + C M^T + N)_ij|
double lyapunov_residual(const Matrix8& m, const Matrix8& n, const Matrix8& c);

// Steady solution of M C + C M^T + N = 0 by complex-Schur Bartels-Stewart with
// iterative refinement; falls back to a dense Kronecker solve. The result is
// symmetric and meets residual <= 1e-10 * max|N|.
// Throws Error{UnstableDrift} when M is not Hurwitz, Error{IllConditioned} when
// the residual target is missed.
Matrix8 lyapunov_steady(const Matrix8& m, const Matrix8& n);

// Kronecker-product route on its own (vec(C) from a 64x64 solve).
Matrix8 lyapunov_kronecker(const Matrix8& m, const Matrix8& n);

// C(t_end) for dC/dt = M C + C M^T + N from C(0) = c0, using the exact one-step
// propagator (block matrix exponential) and interval doubling.
Matrix8 evolve_covariance(const Matrix8& c0, const Matrix8& m, const Matrix8& n, double t_end);

enum class Mode { Optical1, Optical2, Mechanical1, Mechanical2 };

// 4x4 covariance of two distinct modes taken from a canonical 8x8 matrix.
Eigen::Matrix4d two_mode_block(const CovarianceMatrix& c, Mode a, Mode b);

// Symplectic spectrum (ascending, one value per mode) of an even-dimensional
// symmetric matrix with respect to the block form diag([[0,1],[-1,0]], ...).
Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& c);

// E_N = max(0, -ln(2 nu_-)) of a canonical two-mode covariance
// [[A, C], [C^T, B]]. Throws Error{UnphysicalSubmatrix}.
double log_negativity(const Eigen::Matrix4d& two_mode);
double log_negativity(const CovarianceMatrix& c, Mode a, Mode b);

// Mean phonon number of mechanical unit (1 or 2):
// (<dx^2> + <dp^2>/omega^2)/2 - 1/2. Throws Error{NegativeOccupancy}.
double occupancy(const CovarianceMatrix& c, int unit, double omega_m);

struct QuantumResult {
    double e_n_mech = 0.0;
    double e_n_optmech = 0.0;  // (optical 1, mechanical 1)
    std::array<double, 2> n_eff{0.0, 0.0};
    double residual = 0.0;       // relative Lyapunov residual
    double min_symplectic = 0.0; // smallest symplectic eigenvalue of the full state
    bool stable = false;
    double g_over_omega = 0.0;
    FixedPoint fixed_point;
    CovarianceMatrix covariance;
};

// Canonical steady covariance around a stable fixed point.
CovarianceMatrix steady_covariance(const SystemParams& p, const FixedPoint& fp);

QuantumResult analyze_steady_state(const SystemParams& p, const FixedPoint& fp);

// Uses the stable fixed point with smallest |x_st|; Error{UnstableDrift} if none.
QuantumResult analyze_steady_state(const SystemParams& p);

}  // namespace optomech
