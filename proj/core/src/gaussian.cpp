#include "optomech/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "optomech/error.hpp"

namespace optomech {

namespace {

constexpr double kResidualTarget = 1e-10;
constexpr double kPhysicalTolerance = 1e-9;

using Matrix8c = Eigen::Matrix<std::complex<double>, 8, 8>;

double max_abs(const Matrix8& a) { return a.cwiseAbs().maxCoeff(); }

Matrix8 symmetrized(const Matrix8& a) { return 0.5 * (a + a.transpose()); }

// Solves T Y + Y T^H = F for upper-triangular T.
Matrix8c solve_triangular_sylvester(const Matrix8c& t, const Matrix8c& f) {
    Matrix8c y = Matrix8c::Zero();
    for (int j = 7; j >= 0; --j) {
        Eigen::Matrix<std::complex<double>, 8, 1> rhs = f.col(j);
        for (int k = j + 1; k < 8; ++k) rhs -= std::conj(t(j, k)) * y.col(k);
        const std::complex<double> shift = std::conj(t(j, j));
        for (int i = 7; i >= 0; --i) {
            std::complex<double> acc = rhs(i);
            for (int k = i + 1; k < 8; ++k) acc -= t(i, k) * y(k, j);
            y(i, j) = acc / (t(i, i) + shift);
        }
    }
    return y;
}

class SchurLyapunov {
public:
    explicit SchurLyapunov(const Matrix8& m) : schur_(m.cast<std::complex<double>>()) {}

    // Solution of M X + X M^T = -R.
    Matrix8 solve(const Matrix8& r) const {
        const Matrix8c& u = schur_.matrixU();
        const Matrix8c& t = schur_.matrixT();
        const Matrix8c f = -(u.adjoint() * r.cast<std::complex<double>>() * u);
        const Matrix8c y = solve_triangular_sylvester(t, f);
        return symmetrized((u * y * u.adjoint()).real());
    }

private:
    Eigen::ComplexSchur<Matrix8c> schur_;
};

Matrix8 refine(const Matrix8& m, const Matrix8& n, Matrix8 c, const auto& solve_correction) {
    for (int it = 0; it < 4; ++it) {
        const Matrix8 r = m * c + c * m.transpose() + n;
        if (max_abs(r) <= 0.01 * kResidualTarget * std::max(max_abs(n), std::numeric_limits<double>::min())) break;
        c = symmetrized(c + solve_correction(r));
    }
    return c;
}

int mode_offset(Mode mode) {
    switch (mode) {
        case Mode::Optical1: return 0;
        case Mode::Optical2: return 2;
        case Mode::Mechanical1: return 4;
        case Mode::Mechanical2: return 6;
    }
    return 0;
}

}  // namespace

double lyapunov_residual(const Matrix8& m, const Matrix8& n, const Matrix8& c) {
    return max_abs(m * c + c * m.transpose() + n);
}

Matrix8 lyapunov_kronecker(const Matrix8& m, const Matrix8& n) {
    // Column-major vec: vec(M C) = (I kron M) vec C, vec(C M^T) = (M kron I) vec C.
    Eigen::Matrix<double, 64, 64> a = Eigen::Matrix<double, 64, 64>::Zero();
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            for (int k = 0; k < 8; ++k) {
                a(8 * j + i, 8 * j + k) += m(i, k);  // (M C)_ij = sum_k M_ik C_kj
                a(8 * j + i, 8 * k + i) += m(j, k);  // (C M^T)_ij = sum_k C_ik M_jk
            }
        }
    }
    const Eigen::Map<const Eigen::Matrix<double, 64, 1>> rhs(n.data());
    const Eigen::FullPivLU<Eigen::Matrix<double, 64, 64>> lu(a);
    Eigen::Matrix<double, 64, 1> vec = lu.solve(-rhs);
    Matrix8 c = Eigen::Map<Matrix8>(vec.data());
    c = symmetrized(c);
    return refine(m, n, c, [&](const Matrix8& r) {
        Eigen::Matrix<double, 64, 1> dv = lu.solve(-Eigen::Map<const Eigen::Matrix<double, 64, 1>>(r.data()));
        return Matrix8(Eigen::Map<Matrix8>(dv.data()));
    });
}

Matrix8 lyapunov_steady(const Matrix8& m, const Matrix8& n) {
    if (!m.allFinite() || !n.allFinite()) throw Error(ErrorCode::IllConditioned, "non-finite drift or noise");
    const Stability s = stability(m);
    if (!s.stable) {
        throw Error(ErrorCode::UnstableDrift,
                    "drift matrix has an eigenvalue with real part " + std::to_string(s.max_real));
    }
    const double target = kResidualTarget * std::max(max_abs(n), std::numeric_limits<double>::min());

    const SchurLyapunov schur(m);
    Matrix8 c = refine(m, n, schur.solve(n), [&](const Matrix8& r) { return schur.solve(r); });
    if (c.allFinite() && lyapunov_residual(m, n, c) <= target) return c;

    c = lyapunov_kronecker(m, n);
    if (c.allFinite() && lyapunov_residual(m, n, c) <= target) return c;
    throw Error(ErrorCode::IllConditioned,
                "Lyapunov residual " + std::to_string(lyapunov_residual(m, n, c)) + " above target");
}

Matrix8 evolve_covariance(const Matrix8& c0, const Matrix8& m, const Matrix8& n, double t_end) {
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw Error(ErrorCode::InvalidParameter, "t_end must be non-negative and finite");
    }
    if (t_end == 0.0) return c0;
    // Base step small enough that the 16x16 exponential is well scaled.
    const double norm = std::max(m.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
    int doublings = 0;
    double h = t_end;
    while (h * norm > 0.5 && doublings < 200) {
        h *= 0.5;
        ++doublings;
    }

    // Van Loan: exp([[-M, N], [0, M^T]] h) = [[., F12], [0, F22]],
    // Phi = F22^T, W = F22^T F12.
    Eigen::Matrix<double, 16, 16> block = Eigen::Matrix<double, 16, 16>::Zero();
    block.topLeftCorner<8, 8>() = -m * h;
    block.topRightCorner<8, 8>() = n * h;
    block.bottomRightCorner<8, 8>() = m.transpose() * h;
    const Eigen::Matrix<double, 16, 16> e = block.exp();
    Matrix8 phi = e.bottomRightCorner<8, 8>().transpose();
    Matrix8 w = symmetrized(phi * e.topRightCorner<8, 8>());

    for (int k = 0; k < doublings; ++k) {
        w = symmetrized(phi * w * phi.transpose() + w);
        phi = phi * phi;
    }
    Matrix8 c = symmetrized(phi * symmetrized(c0) * phi.transpose() + w);
    if (!c.allFinite()) throw Error(ErrorCode::NonFiniteState, "covariance diverged");
    return c;
}

CovarianceMatrix to_canonical(const CovarianceMatrix& c, const SystemParams& p) {
    if (c.normalization == Normalization::Canonical) return c;
    if (!(p.power > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "Langevin-normalized covariance needs power > 0");
    }
    const auto s = canonical_scaling(p);
    CovarianceMatrix out = c;
    out.values = s.asDiagonal() * c.values * s.asDiagonal();
    out.normalization = Normalization::Canonical;
    return out;
}

Eigen::Matrix4d two_mode_block(const CovarianceMatrix& c, Mode a, Mode b) {
    if (a == b) throw Error(ErrorCode::InvalidParameter, "two_mode_block needs two distinct modes");
    if (c.normalization != Normalization::Canonical) {
        throw Error(ErrorCode::InvalidParameter, "two_mode_block expects a canonical covariance");
    }
    const int idx[4] = {mode_offset(a), mode_offset(a) + 1, mode_offset(b), mode_offset(b) + 1};
    Eigen::Matrix4d out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out(i, j) = c.values(idx[i], idx[j]);
    return out;
}

Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& c) {
    if (c.rows() != c.cols() || c.rows() % 2 != 0 || c.rows() == 0) {
        throw Error(ErrorCode::InvalidParameter, "symplectic spectrum needs an even square matrix");
    }
    const Eigen::Index modes = c.rows() / 2;
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(c.rows(), c.cols());
    for (Eigen::Index k = 0; k < modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    const Eigen::MatrixXd sym = 0.5 * (c + c.transpose());
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(omega * sym, false).eigenvalues();
    std::vector<double> mags(static_cast<std::size_t>(ev.size()));
    for (Eigen::Index i = 0; i < ev.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(ev(i));
    std::sort(mags.begin(), mags.end());
    Eigen::VectorXd out(modes);
    // Eigenvalues come in +-i nu pairs; average each pair.
    for (Eigen::Index k = 0; k < modes; ++k) {
        out(k) = 0.5 * (mags[static_cast<std::size_t>(2 * k)] + mags[static_cast<std::size_t>(2 * k + 1)]);
    }
    return out;
}

double log_negativity(const Eigen::Matrix4d& v) {
    const Eigen::Matrix4d sym = 0.5 * (v + v.transpose());
    if (!sym.allFinite()) throw Error(ErrorCode::UnphysicalSubmatrix, "non-finite covariance");
    const double nu_min = symplectic_eigenvalues(sym).minCoeff();
    if (nu_min < 0.5 - kPhysicalTolerance) {
        throw Error(ErrorCode::UnphysicalSubmatrix,
                    "smallest symplectic eigenvalue " + std::to_string(nu_min) + " below 1/2");
    }
    const double det_a = sym.topLeftCorner<2, 2>().determinant();
    const double det_b = sym.bottomRightCorner<2, 2>().determinant();
    const double det_c = sym.topRightCorner<2, 2>().determinant();
    const double det_v = sym.determinant();
    // Partial transposition flips the sign of det C in the two-mode invariant.
    const double delta = det_a + det_b - 2.0 * det_c;
    const double disc = std::max(0.0, delta * delta - 4.0 * det_v);
    const double nu2 = 0.5 * (delta - std::sqrt(disc));
    const double nu = std::sqrt(std::max(nu2, 0.0));
    if (nu <= 0.0) return std::numeric_limits<double>::infinity();
    return std::max(0.0, -std::log(2.0 * nu));
}

double log_negativity(const CovarianceMatrix& c, Mode a, Mode b) {
    return log_negativity(two_mode_block(c, a, b));
}

double occupancy(const CovarianceMatrix& c, int unit, double omega_m) {
    if (unit != 1 && unit != 2) throw Error(ErrorCode::InvalidParameter, "unit must be 1 or 2");
    const int x = unit == 1 ? index::X1 : index::X2;
    const double vx = c.values(x, x);
    double vp = c.values(x + 1, x + 1);
    if (c.normalization == Normalization::Langevin) vp /= omega_m * omega_m;
    const double n = 0.5 * (vx + vp) - 0.5;
    if (n < -kPhysicalTolerance) {
        throw Error(ErrorCode::NegativeOccupancy, "occupancy " + std::to_string(n) + " is negative");
    }
    return std::max(n, 0.0);
}

CovarianceMatrix steady_covariance(const SystemParams& p, const FixedPoint& fp) {
    CovarianceMatrix c;
    c.values = lyapunov_steady(canonical_drift(p, fp), canonical_noise(p));
    c.bath = p.bath;
    c.params_hash = p.hash();
    c.normalization = Normalization::Canonical;
    return c;
}

QuantumResult analyze_steady_state(const SystemParams& p, const FixedPoint& fp) {
    QuantumResult r;
    r.fixed_point = fp;
    const Matrix8 m = canonical_drift(p, fp);
    const Matrix8 n = canonical_noise(p);
    r.covariance.values = lyapunov_steady(m, n);
    r.covariance.bath = p.bath;
    r.covariance.params_hash = p.hash();
    r.covariance.normalization = Normalization::Canonical;
    r.stable = true;
    r.residual = lyapunov_residual(m, n, r.covariance.values) / max_abs(n);
    r.min_symplectic = symplectic_eigenvalues(r.covariance.values).minCoeff();
    if (r.min_symplectic < 0.5 - kPhysicalTolerance) {
        throw Error(ErrorCode::UnphysicalSubmatrix,
                    "steady covariance violates the uncertainty bound: nu_min = " + std::to_string(r.min_symplectic));
    }
    r.e_n_mech = log_negativity(r.covariance, Mode::Mechanical1, Mode::Mechanical2);
    r.e_n_optmech = log_negativity(r.covariance, Mode::Optical1, Mode::Mechanical1);
    r.n_eff = {occupancy(r.covariance, 1, p.omega_m1), occupancy(r.covariance, 2, p.omega_m2)};
    r.g_over_omega = coupling_g(p, fp.cavity_photons());
    return r;
}

QuantumResult analyze_steady_state(const SystemParams& p) {
    const auto points = find_fixed_points(p);
    const int chosen = select_stable(points);
    if (chosen < 0) throw Error(ErrorCode::UnstableDrift, "no stable fixed point");
    return analyze_steady_state(p, points[static_cast<std::size_t>(chosen)]);
}

}  // namespace optomech
