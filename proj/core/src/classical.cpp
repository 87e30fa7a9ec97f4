#include "optomech/classical.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "optomech/error.hpp"

namespace optomech {

ClassicalState::Packed ClassicalState::pack() const noexcept {
    return {a1.real(), a1.imag(), a2.real(), a2.imag(), x1, p1, x2, p2};
}

ClassicalState ClassicalState::unpack(const Packed& v) noexcept {
    ClassicalState s;
    s.a1 = {v[0], v[1]};
    s.a2 = {v[2], v[3]};
    s.x1 = v[4];
    s.p1 = v[5];
    s.x2 = v[6];
    s.p2 = v[7];
    return s;
}

bool ClassicalState::finite() const noexcept {
    const auto v = pack();
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void rhs(const ClassicalState::Packed& s, ClassicalState::Packed& ds, const SystemParams& p) {
    const double re1 = s[0], im1 = s[1], re2 = s[2], im2 = s[3];
    const double x1 = s[4], p1 = s[5], x2 = s[6], p2 = s[7];

    // a' = [i(Delta0 + x) - 1/2] a + 1/2
    const double d1 = p.detuning + x1;
    const double d2 = p.detuning + x2;
    ds[0] = -0.5 * re1 - d1 * im1 + 0.5;
    ds[1] = d1 * re1 - 0.5 * im1;
    ds[2] = -0.5 * re2 - d2 * im2 + 0.5;
    ds[3] = d2 * re2 - 0.5 * im2;

    double diss1 = 0.0;
    double diss2 = 0.0;
    if (p.bath == BathKind::Separate) {
        diss1 = p.damping * p1;
        diss2 = p.damping * p2;
    } else {
        diss1 = diss2 = p.damping * (p1 + p2);
    }

    // (-1)^j K_c (x1 - x2), j = 1, 2
    const double spring = p.coupling * (x1 - x2);
    ds[4] = p1;
    ds[5] = -p.omega_m1 * p.omega_m1 * x1 - spring - diss1 + p.power * (re1 * re1 + im1 * im1);
    ds[6] = p2;
    ds[7] = -p.omega_m2 * p.omega_m2 * x2 + spring - diss2 + p.power * (re2 * re2 + im2 * im2);
}

ClassicalState rhs(const ClassicalState& s, const SystemParams& p) {
    ClassicalState::Packed ds{};
    rhs(s.pack(), ds, p);
    return ClassicalState::unpack(ds);
}

std::vector<double> Trajectory::positions(int unit) const {
    if (unit != 1 && unit != 2) throw Error(ErrorCode::InvalidParameter, "unit must be 1 or 2");
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(unit == 1 ? s.x1 : s.x2);
    return out;
}

Trajectory integrate(const ClassicalState& s0, const SystemParams& p, double t_end, double dt_sample,
                     const IntegratorControls& controls) {
    namespace odeint = boost::numeric::odeint;
    p.validate();
    if (!(t_end > 0.0) || !(dt_sample > 0.0) || !std::isfinite(t_end)) {
        throw Error(ErrorCode::InvalidParameter, "t_end and dt_sample must be positive and finite");
    }
    if (!(controls.rel_tol > 0.0) || !(controls.abs_tol > 0.0) || !(controls.initial_step > 0.0)) {
        throw Error(ErrorCode::InvalidParameter, "integrator tolerances must be positive");
    }
    if (controls.record_from < 0.0 || controls.record_from >= t_end) {
        throw Error(ErrorCode::InvalidParameter, "record_from must lie in [0, t_end)");
    }
    if (!s0.finite()) throw Error(ErrorCode::NonFiniteState, "initial state is not finite");

    const auto n_grid = static_cast<std::size_t>(std::floor(t_end / dt_sample + 1e-9)) + 1;
    const auto first_recorded =
        static_cast<std::size_t>(std::ceil(controls.record_from / dt_sample - 1e-9));
    if (n_grid < first_recorded + 2) {
        throw Error(ErrorCode::InvalidParameter, "recording window holds fewer than 2 samples");
    }

    std::vector<double> times(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i) times[i] = static_cast<double>(i) * dt_sample;

    Trajectory traj;
    traj.dt = dt_sample;
    traj.t0 = times[first_recorded];
    traj.samples.reserve(n_grid - first_recorded);

    using State = ClassicalState::Packed;
    auto system = [&p](const State& x, State& dxdt, double /*t*/) { rhs(x, dxdt, p); };
    std::size_t index = 0;
    auto observer = [&](const State& x, double t) {
        for (double v : x) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::NonFiniteState, "state diverged at t = " + std::to_string(t));
            }
        }
        if (index >= first_recorded) traj.samples.push_back(ClassicalState::unpack(x));
        ++index;
    };

    auto stepper = odeint::make_dense_output(controls.abs_tol, controls.rel_tol,
                                             odeint::runge_kutta_dopri5<State>());
    State x = s0.pack();
    try {
        odeint::integrate_times(stepper, system, x, times.begin(), times.end(), controls.initial_step,
                                observer,
                                odeint::max_step_checker(static_cast<int>(controls.max_steps_per_sample)));
    } catch (const odeint::odeint_error& e) {
        throw Error(ErrorCode::StepSizeUnderflow, e.what());
    }
    return traj;
}

ClassicalState default_initial_state(double displacement) {
    ClassicalState s;
    s.x1 = displacement;
    s.x2 = displacement;
    return s;
}

ClassicalState random_initial_state(std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    ClassicalState s;
    s.a1 = {u(rng), u(rng)};
    s.a2 = {u(rng), u(rng)};
    s.x1 = u(rng);
    s.p1 = u(rng);
    s.x2 = u(rng);
    s.p2 = u(rng);
    return s;
}

ModeEnergies mode_energies(const Trajectory& traj, const SystemParams& p) {
    const NormalModes modes = normal_modes(p);
    const double w2p = modes.omega_plus * modes.omega_plus;
    const double w2m = modes.omega_minus * modes.omega_minus;
    const double r = 1.0 / std::sqrt(2.0);
    ModeEnergies e;
    e.plus.reserve(traj.size());
    e.minus.reserve(traj.size());
    for (const auto& s : traj.samples) {
        const double xp = r * (s.x1 + s.x2), pp = r * (s.p1 + s.p2);
        const double xm = r * (s.x1 - s.x2), pm = r * (s.p1 - s.p2);
        e.plus.push_back(0.5 * (pp * pp + w2p * xp * xp));
        e.minus.push_back(0.5 * (pm * pm + w2m * xm * xm));
    }
    return e;
}

}  // namespace optomech
