#include <doctest.h>

#include <cmath>
#include <numbers>

#include "optomech/classical.hpp"
#include "optomech/error.hpp"

using namespace optomech;

namespace {

SystemParams undriven(double omega, double gamma, BathKind bath) {
    SystemParams p;
    p.omega_m1 = p.omega_m2 = omega;
    p.damping = gamma;
    p.bath = bath;
    return p;
}

}  // namespace

TEST_CASE("state packing round-trips") {
    ClassicalState s;
    s.a1 = {1.0, 2.0};
    s.a2 = {3.0, 4.0};
    s.x1 = 5.0;
    s.p1 = 6.0;
    s.x2 = 7.0;
    s.p2 = 8.0;
    const auto v = s.pack();
    CHECK(v == ClassicalState::Packed{1, 2, 3, 4, 5, 6, 7, 8});
    CHECK(ClassicalState::unpack(v) == s);
}

TEST_CASE("vector field terms") {
    SystemParams p;
    p.omega_m1 = 1.0;
    p.omega_m2 = 1.5;
    p.damping = 0.1;
    p.coupling = 0.2;
    p.detuning = 0.3;
    p.power = 2.0;
    ClassicalState s;
    s.a1 = {0.4, -0.1};
    s.a2 = {0.2, 0.3};
    s.x1 = 0.5;
    s.p1 = 0.7;
    s.x2 = -0.2;
    s.p2 = 0.1;

    SUBCASE("separate baths") {
        const ClassicalState d = rhs(s, p);
        const std::complex<double> i{0.0, 1.0};
        const auto da1 = (i * (0.3 + 0.5) - 0.5) * s.a1 + 0.5;
        CHECK(d.a1.real() == doctest::Approx(da1.real()));
        CHECK(d.a1.imag() == doctest::Approx(da1.imag()));
        CHECK(d.x1 == doctest::Approx(0.7));
        CHECK(d.p1 == doctest::Approx(-0.5 - 0.2 * 0.7 - 0.1 * 0.7 + 2.0 * std::norm(s.a1)));
        CHECK(d.p2 == doctest::Approx(-2.25 * -0.2 + 0.2 * 0.7 - 0.1 * 0.1 + 2.0 * std::norm(s.a2)));
    }
    SUBCASE("common bath damps the sum of momenta") {
        p.bath = BathKind::Common;
        const ClassicalState d = rhs(s, p);
        CHECK(d.p1 == doctest::Approx(-0.5 - 0.2 * 0.7 - 0.1 * 0.8 + 2.0 * std::norm(s.a1)));
        CHECK(d.p2 == doctest::Approx(-2.25 * -0.2 + 0.2 * 0.7 - 0.1 * 0.8 + 2.0 * std::norm(s.a2)));
    }
}

TEST_CASE("undriven separate-bath oscillator matches the damped closed form") {
    const double w = 1.3, g = 0.05, x0 = 0.1;
    const SystemParams p = undriven(w, g, BathKind::Separate);
    const Trajectory traj = integrate(default_initial_state(x0), p, 40.0, 0.5);
    const double wd = std::sqrt(w * w - g * g / 4.0);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.time(i);
        const double exact = x0 * std::exp(-g * t / 2.0) * (std::cos(wd * t) + g / (2.0 * wd) * std::sin(wd * t));
        CHECK(traj.samples[i].x1 == doctest::Approx(exact).epsilon(1e-7).scale(x0));
        CHECK(traj.samples[i].x2 == doctest::Approx(exact).epsilon(1e-7).scale(x0));
    }
}

TEST_CASE("empty cavity fills exponentially when the mirror rests") {
    const SystemParams p = undriven(1.0, 0.05, BathKind::Separate);
    const Trajectory traj = integrate(ClassicalState{}, p, 10.0, 0.5);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.time(i);
        CHECK(traj.samples[i].a1.real() == doctest::Approx(1.0 - std::exp(-t / 2.0)).epsilon(1e-8).scale(1.0));
        CHECK(traj.samples[i].a1.imag() == doctest::Approx(0.0).scale(1.0));
        CHECK(traj.samples[i].x1 == 0.0);
    }
}

TEST_CASE("undriven common bath leaves the relative mode undamped") {
    const SystemParams p = undriven(1.0, 0.05, BathKind::Common);
    ClassicalState s0;
    s0.x1 = 0.1;
    s0.x2 = -0.1;  // pure relative mode
    const Trajectory traj = integrate(s0, p, 100.0, 1.0);
    const ModeEnergies e = mode_energies(traj, p);
    CHECK(e.minus.back() == doctest::Approx(e.minus.front()).epsilon(1e-7));
    CHECK(e.plus.back() == doctest::Approx(0.0).scale(1.0));

    s0.x2 = 0.1;  // pure center of mass, energy decays as exp(-2 Gamma t)
    const Trajectory t2 = integrate(s0, p, 100.0, 1.0);
    const ModeEnergies e2 = mode_energies(t2, p);
    CHECK(e2.plus.back() / e2.plus.front() == doctest::Approx(std::exp(-2.0 * 0.05 * 100.0)).epsilon(0.15));
    CHECK(e2.minus.back() == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("trajectory grid and recording window") {
    const SystemParams p = undriven(1.0, 0.1, BathKind::Separate);
    IntegratorControls c;
    c.record_from = 5.0;
    const Trajectory traj = integrate(default_initial_state(), p, 10.0, 0.25, c);
    CHECK(traj.t0 == doctest::Approx(5.0));
    CHECK(traj.size() == 21);
    CHECK(traj.time(traj.size() - 1) == doctest::Approx(10.0));
    CHECK(traj.positions(1).size() == traj.size());
    CHECK_THROWS_AS((void)traj.positions(3), Error);
}

TEST_CASE("integrator rejects bad input") {
    const SystemParams p = undriven(1.0, 0.1, BathKind::Separate);
    CHECK_THROWS_AS(integrate(default_initial_state(), p, -1.0, 0.1), Error);
    CHECK_THROWS_AS(integrate(default_initial_state(), p, 1.0, 0.0), Error);
    ClassicalState bad;
    bad.x1 = std::nan("");
    CHECK_THROWS_AS(integrate(bad, p, 1.0, 0.1), Error);
}

TEST_CASE("integrator reports an exhausted step budget as a typed error") {
    const SystemParams p = undriven(1e4, 0.1, BathKind::Separate);
    IntegratorControls c;
    c.max_steps_per_sample = 5;
    try {
        integrate(default_initial_state(1.0), p, 10.0, 1.0, c);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StepSizeUnderflow);
    }
}

TEST_CASE("seeded random initial states are reproducible") {
    CHECK(random_initial_state(7) == random_initial_state(7));
    CHECK_FALSE(random_initial_state(7) == random_initial_state(8));
    CHECK(random_initial_state(7).finite());
}

TEST_CASE("default transient") {
    SystemParams p;
    p.damping = 0.01;
    CHECK(default_transient(p) == doctest::Approx(5000.0));
}
