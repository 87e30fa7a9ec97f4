#include "optomech/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "optomech/error.hpp"

namespace optomech {

namespace {

constexpr double kStabilityMargin = 1e-10;

void require_identical(const SystemParams& p, const char* what) {
    if (!p.identical()) {
        throw Error(ErrorCode::InvalidParameter, std::string(what) + " requires identical mechanical frequencies");
    }
}

// f(x) = omega^2 x (1/4 + (Delta + x)^2) - P/4 and its derivative.
struct Balance {
    double w2, delta, power;
    [[nodiscard]] double value(double x) const {
        const double d = delta + x;
        return w2 * x * (0.25 + d * d) - 0.25 * power;
    }
    [[nodiscard]] double slope(double x) const {
        const double d = delta + x;
        return w2 * (0.25 + d * d + 2.0 * x * d);
    }
};

double polish(const Balance& f, double x, double lo, double hi) {
    // Safeguarded Newton inside [lo, hi] when a sign change is available.
    double flo = f.value(lo);
    const bool bracketed = flo * f.value(hi) <= 0.0;
    for (int it = 0; it < 100; ++it) {
        const double fx = f.value(x);
        if (fx == 0.0) break;
        if (bracketed) {
            if ((fx < 0.0) == (flo < 0.0)) {
                lo = x;
                flo = fx;
            } else {
                hi = x;
            }
        }
        const double df = f.slope(x);
        double next = df != 0.0 ? x - fx / df : 0.5 * (lo + hi);
        if (bracketed && (next <= lo || next >= hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x))) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

FixedPoint make_fixed_point(const SystemParams& p, double x) {
    FixedPoint fp;
    fp.x_st = x;
    fp.p_st = 0.0;
    fp.a_st = 0.5 / std::complex<double>(0.5, -(p.detuning + x));
    fp.q_st = std::sqrt(2.0) * fp.a_st.real();
    fp.pq_st = std::sqrt(2.0) * fp.a_st.imag();
    const Stability s = stability(drift_matrix(p, fp));
    fp.eigenvalues = s.eigenvalues;
    fp.stable = s.stable;
    return fp;
}

}  // namespace

const std::array<std::string, 8>& canonical_labels() {
    static const std::array<std::string, 8> labels{"dQ1", "dP1", "dQ2", "dP2", "dx1", "dp1", "dx2", "dp2"};
    return labels;
}

std::vector<FixedPoint> find_fixed_points(const SystemParams& p) {
    p.validate();
    require_identical(p, "fixed-point search");
    const double w2 = p.omega_m1 * p.omega_m1;
    const Balance f{w2, p.detuning, p.power};

    if (p.power == 0.0) return {make_fixed_point(p, 0.0)};

    // Cubic x^3 + 2 Delta x^2 + (Delta^2 + 1/4) x - P/(4 w^2) = 0 through its
    // companion matrix; roots are confined to (0, P / w^2].
    const double c2 = 2.0 * p.detuning;
    const double c1 = p.detuning * p.detuning + 0.25;
    const double c0 = -0.25 * p.power / w2;
    Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
    companion(0, 0) = -c2;
    companion(0, 1) = -c1;
    companion(0, 2) = -c0;
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    const Eigen::Vector3cd roots = companion.eigenvalues();

    const double upper = p.power / w2;
    const double scale = std::max({1.0, upper, std::abs(p.detuning)});
    std::vector<double> candidates;
    for (const auto& r : roots) {
        if (std::abs(r.imag()) > 1e-6 * scale) continue;
        const double x = std::clamp(r.real(), 0.0, upper);
        candidates.push_back(polish(f, x, 0.0, upper));
    }

    // Bracketing scan catches roots the eigen-solver placed slightly off the real axis.
    constexpr int kScan = 4000;
    double prev_x = 0.0, prev_f = f.value(0.0);
    for (int i = 1; i <= kScan; ++i) {
        const double x = upper * static_cast<double>(i) / kScan;
        const double fx = f.value(x);
        if ((prev_f < 0.0) != (fx < 0.0) || fx == 0.0) {
            candidates.push_back(polish(f, 0.5 * (prev_x + x), prev_x, x));
        }
        prev_x = x;
        prev_f = fx;
    }

    std::sort(candidates.begin(), candidates.end());
    std::vector<double> unique;
    for (double x : candidates) {
        const double residual = std::abs(f.value(x)) / std::max(1.0, 0.25 * p.power);
        if (residual > 1e-11) continue;
        if (unique.empty() || std::abs(x - unique.back()) > 1e-9 * scale) unique.push_back(x);
    }
    if (unique.empty()) {
        // A real root always exists; fall back to the best polished candidate.
        unique.push_back(polish(f, 0.5 * upper, 0.0, upper));
    }

    std::vector<FixedPoint> out;
    out.reserve(unique.size());
    for (double x : unique) out.push_back(make_fixed_point(p, x));
    return out;
}

int select_stable(const std::vector<FixedPoint>& points) {
    int best = -1;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!points[i].stable) continue;
        if (best < 0 || std::abs(points[i].x_st) < std::abs(points[static_cast<std::size_t>(best)].x_st)) {
            best = static_cast<int>(i);
        }
    }
    return best;
}

Matrix8 conservative_drift(const SystemParams& p, const FixedPoint& fp) {
    using namespace index;
    Matrix8 m = Matrix8::Zero();
    const double d = fp.x_st + p.detuning;
    const double w1 = p.omega_m1, w2 = p.omega_m2;

    for (int j = 0; j < 2; ++j) {
        const int q = 2 * j, pq = 2 * j + 1, x = 4 + 2 * j, px = 5 + 2 * j;
        m(q, q) = -0.5;
        m(q, pq) = -d;
        m(q, x) = -fp.pq_st;
        m(pq, q) = d;
        m(pq, pq) = -0.5;
        m(pq, x) = fp.q_st;
        m(x, px) = 1.0;
        m(px, x) = -(j == 0 ? w1 * w1 : w2 * w2);
        m(px, q) = p.power * fp.q_st;
        m(px, pq) = p.power * fp.pq_st;
    }
    m(Px1, X1) -= p.coupling;
    m(Px1, X2) += p.coupling;
    m(Px2, X1) += p.coupling;
    m(Px2, X2) -= p.coupling;
    return m;
}

Matrix8 drift_matrix(const SystemParams& p, const FixedPoint& fp) {
    using namespace index;
    Matrix8 m = conservative_drift(p, fp);
    const double g = p.damping;
    if (p.bath == BathKind::Separate) {
        m(X1, X1) -= g;
        m(X2, X2) -= g;
        m(Px1, Px1) -= g;
        m(Px2, Px2) -= g;
    } else {
        for (int row : {X1, X2}) {
            m(row, X1) -= g;
            m(row, X2) -= g;
        }
        for (int row : {Px1, Px2}) {
            m(row, Px1) -= g;
            m(row, Px2) -= g;
        }
    }
    return m;
}

Matrix8 noise_matrix(const SystemParams& p) {
    using namespace index;
    p.validate();
    if (!(p.power > 0.0)) {
        throw Error(ErrorCode::InvalidParameter,
                    "printed-scaling optical noise diverges at zero power; use canonical_noise");
    }
    Matrix8 n = Matrix8::Zero();
    const double optical = 0.5 * p.omega_m1 / p.power;
    for (int i : {Q1, P1, Q2, P2}) n(i, i) = optical;

    const double thermal = p.damping * (2.0 * p.n_th + 1.0);
    const double w1 = p.omega_m1, w2 = p.omega_m2;
    n(X1, X1) = thermal;
    n(X2, X2) = thermal;
    n(Px1, Px1) = w1 * w1 * thermal;
    n(Px2, Px2) = w2 * w2 * thermal;
    if (p.bath == BathKind::Common) {
        n(X1, X2) = n(X2, X1) = thermal;
        n(Px1, Px2) = n(Px2, Px1) = w1 * w2 * thermal;
    }
    return n;
}

Eigen::Matrix<double, 8, 1> canonical_scaling(const SystemParams& p) {
    using namespace index;
    Eigen::Matrix<double, 8, 1> s;
    const double optical = std::sqrt(p.power / p.omega_m1);
    s << optical, optical, optical, optical, 1.0, 1.0 / p.omega_m1, 1.0, 1.0 / p.omega_m2;
    return s;
}

Matrix8 canonical_drift(const SystemParams& p, const FixedPoint& fp) {
    using namespace index;
    // Start from the conservative+dissipative drift with the optomechanical
    // entries zeroed, rescale, then insert the symmetric canonical couplings.
    FixedPoint dark = fp;
    dark.q_st = 0.0;
    dark.pq_st = 0.0;
    const Matrix8 printed = drift_matrix(p, dark);
    Eigen::Matrix<double, 8, 1> s;
    s << 1.0, 1.0, 1.0, 1.0, 1.0, 1.0 / p.omega_m1, 1.0, 1.0 / p.omega_m2;
    Matrix8 m = s.asDiagonal() * printed * s.cwiseInverse().asDiagonal();

    const double root = std::sqrt(p.power * p.omega_m1);
    const double c_opt = std::sqrt(p.power / p.omega_m1);
    for (int j = 0; j < 2; ++j) {
        const int q = 2 * j, pq = 2 * j + 1, x = 4 + 2 * j, px = 5 + 2 * j;
        const double wj = j == 0 ? p.omega_m1 : p.omega_m2;
        m(q, x) = -fp.pq_st * c_opt;
        m(pq, x) = fp.q_st * c_opt;
        m(px, q) = fp.q_st * root / wj;
        m(px, pq) = fp.pq_st * root / wj;
    }
    return m;
}

Matrix8 canonical_noise(const SystemParams& p) {
    using namespace index;
    p.validate();
    Matrix8 n = Matrix8::Zero();
    for (int i : {Q1, P1, Q2, P2}) n(i, i) = 0.5;
    const double thermal = p.damping * (2.0 * p.n_th + 1.0);
    for (int i : {X1, Px1, X2, Px2}) n(i, i) = thermal;
    if (p.bath == BathKind::Common) {
        n(X1, X2) = n(X2, X1) = thermal;
        n(Px1, Px2) = n(Px2, Px1) = thermal;
    }
    return n;
}

Stability stability(const Matrix8& m) {
    Eigen::EigenSolver<Matrix8> solver(m, false);
    Stability s;
    const auto& ev = solver.eigenvalues();
    s.max_real = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 8; ++i) {
        s.eigenvalues[static_cast<std::size_t>(i)] = ev(i);
        s.max_real = std::max(s.max_real, ev(i).real());
    }
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), [](const auto& a, const auto& b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    s.stable = s.max_real < -kStabilityMargin;
    return s;
}

double leading_real_part(const SystemParams& p, double delta0) {
    SystemParams q = p;
    q.detuning = delta0;
    const auto points = find_fixed_points(q);
    const auto smallest = std::min_element(points.begin(), points.end(), [](const auto& a, const auto& b) {
        return std::abs(a.x_st) < std::abs(b.x_st);
    });
    return stability(drift_matrix(q, *smallest)).max_real;
}

double hopf_scan(const SystemParams& p, double lo, double hi, double tol) {
    if (!(lo < hi) || !(tol > 0.0)) throw Error(ErrorCode::InvalidParameter, "hopf_scan needs lo < hi and tol > 0");
    double f_lo = leading_real_part(p, lo);
    const double f_hi = leading_real_part(p, hi);
    if ((f_lo < 0.0) == (f_hi < 0.0)) {
        throw Error(ErrorCode::NoBracket, "leading real part does not change sign over the detuning range");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = leading_real_part(p, mid);
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

NormalModeSystem cb_normal_mode_matrices(const SystemParams& p, const FixedPoint& fp) {
    using namespace index;
    require_identical(p, "normal-mode formulation");
    if (p.bath != BathKind::Common) {
        throw Error(ErrorCode::InvalidParameter, "normal-mode matrices are defined for the common bath only");
    }
    if (!(p.power > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "normal-mode noise uses the printed scaling and needs power > 0");
    }
    const NormalModes modes = normal_modes(p);
    const double r = 1.0 / std::sqrt(2.0);
    const double d = fp.x_st + p.detuning;
    constexpr int Xp = X1, Pp = Px1, Xm = X2, Pm = Px2;

    NormalModeSystem sys;
    Matrix8& m = sys.drift;
    m.setZero();
    for (int j = 0; j < 2; ++j) {
        const int q = 2 * j, pq = 2 * j + 1;
        const double sign = j == 0 ? 1.0 : -1.0;  // dx_j = (x+ +- x-)/sqrt(2)
        m(q, q) = -0.5;
        m(q, pq) = -d;
        m(pq, q) = d;
        m(pq, pq) = -0.5;
        m(q, Xp) = -fp.pq_st * r;
        m(q, Xm) = -sign * fp.pq_st * r;
        m(pq, Xp) = fp.q_st * r;
        m(pq, Xm) = sign * fp.q_st * r;
        m(Pp, q) = p.power * fp.q_st * r;
        m(Pp, pq) = p.power * fp.pq_st * r;
        m(Pm, q) = sign * p.power * fp.q_st * r;
        m(Pm, pq) = sign * p.power * fp.pq_st * r;
    }
    // Only the center-of-mass mode couples to the bath, at twice the rate.
    m(Xp, Pp) = 1.0;
    m(Xp, Xp) = -2.0 * p.damping;
    m(Pp, Xp) = -modes.omega_plus * modes.omega_plus;
    m(Pp, Pp) = -2.0 * p.damping;
    m(Xm, Pm) = 1.0;
    m(Pm, Xm) = -modes.omega_minus * modes.omega_minus;

    Matrix8& n = sys.noise;
    n.setZero();
    const double optical = 0.5 * p.omega_m1 / p.power;
    for (int i : {Q1, P1, Q2, P2}) n(i, i) = optical;
    const double thermal = p.damping * (2.0 * p.n_th + 1.0);
    n(Xp, Xp) = 2.0 * thermal;
    n(Pp, Pp) = 2.0 * p.omega_m1 * p.omega_m1 * thermal;

    Matrix8& t = sys.basis;
    t.setZero();
    for (int i : {Q1, P1, Q2, P2}) t(i, i) = 1.0;
    t(Xp, X1) = r;
    t(Xp, X2) = r;
    t(Pp, Px1) = r;
    t(Pp, Px2) = r;
    t(Xm, X1) = r;
    t(Xm, X2) = -r;
    t(Pm, Px1) = r;
    t(Pm, Px2) = -r;
    return sys;
}

}  // namespace optomech
