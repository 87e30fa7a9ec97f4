#include "optomech/sync.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <unsupported/Eigen/FFT>

#include "optomech/parallel.hpp"

namespace optomech {

namespace {

constexpr std::size_t kMinWindowSamples = 10;
// Peak power must exceed the median spectral power by this factor.
constexpr double kPeakDominance = 1e3;

double mean(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

std::string_view to_string(PhaseClass c) {
    switch (c) {
        case PhaseClass::InPhase: return "in-phase";
        case PhaseClass::AntiPhase: return "anti-phase";
        case PhaseClass::Intermediate: return "intermediate";
    }
    return "intermediate";
}

PhaseClass classify_phase(double phase_lock) {
    if (phase_lock < 0.1 || phase_lock > 0.9) return PhaseClass::InPhase;
    if (phase_lock > 0.4 && phase_lock < 0.6) return PhaseClass::AntiPhase;
    return PhaseClass::Intermediate;
}

double pearson(std::span<const double> x1, std::span<const double> x2) {
    if (x1.size() != x2.size()) throw Error(ErrorCode::InvalidParameter, "pearson needs equal-length series");
    if (x1.size() < kMinWindowSamples) {
        throw Error(ErrorCode::InvalidParameter, "pearson window needs at least 10 samples");
    }
    const double m1 = mean(x1), m2 = mean(x2);
    double s11 = 0.0, s22 = 0.0, s12 = 0.0;
    for (std::size_t i = 0; i < x1.size(); ++i) {
        const double d1 = x1[i] - m1, d2 = x2[i] - m2;
        s11 += d1 * d1;
        s22 += d2 * d2;
        s12 += d1 * d2;
    }
    const double scale = std::max({std::abs(m1), std::abs(m2), 1e-300});
    const double floor = 1e-26 * scale * scale * static_cast<double>(x1.size());
    if (s11 <= floor || s22 <= floor) throw Error(ErrorCode::ZeroVariance, "constant signal in window");
    return std::clamp(s12 / std::sqrt(s11 * s22), -1.0, 1.0);
}

double estimate_period(std::span<const double> x, double dt) {
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidParameter, "dt must be positive");
    if (x.size() < 32) throw Error(ErrorCode::NoDominantPeak, "series too short");
    const std::size_t n = x.size();
    const double m = mean(x);
    const std::size_t padded = next_pow2(8 * n);
    std::vector<double> buffer(padded, 0.0);
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                                 static_cast<double>(n - 1));
        buffer[i] = (x[i] - m) * hann;
        energy += buffer[i] * buffer[i];
    }
    const double scale = std::max(std::abs(m), 1.0);
    if (energy <= 1e-24 * scale * scale * static_cast<double>(n)) {
        throw Error(ErrorCode::NoDominantPeak, "signal has no variance");
    }

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, buffer);
    const std::size_t half = padded / 2;
    std::vector<double> power(half);
    for (std::size_t k = 0; k < half; ++k) power[k] = std::norm(spectrum[k]);

    // Skip the DC lobe: Hann main lobe is 2 original bins = 2 * padded/n wide.
    const std::size_t skip = 2 * padded / n + 1;
    if (skip + 2 >= half) throw Error(ErrorCode::NoDominantPeak, "series too short");
    const auto peak_it = std::max_element(power.begin() + static_cast<std::ptrdiff_t>(skip), power.end() - 1);
    const auto k = static_cast<std::size_t>(peak_it - power.begin());

    std::vector<double> sorted(power.begin() + static_cast<std::ptrdiff_t>(skip), power.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
    const double median = sorted[sorted.size() / 2];
    if (!(*peak_it > kPeakDominance * median)) {
        throw Error(ErrorCode::NoDominantPeak, "no spectral peak dominates the spectrum");
    }

    // Quadratic interpolation of log power around the peak bin.
    const double a = std::log(power[k - 1]), b = std::log(power[k]), c = std::log(power[k + 1]);
    const double denom = a - 2.0 * b + c;
    const double shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
    const double freq = (static_cast<double>(k) + std::clamp(shift, -0.5, 0.5)) /
                        (static_cast<double>(padded) * dt);
    return 1.0 / freq;
}

SyncResult delay_scan(std::span<const double> x1, std::span<const double> x2, double dt,
                      const DelayScanOptions& options) {
    if (x1.size() != x2.size()) throw Error(ErrorCode::InvalidParameter, "series must share the grid");
    if (options.n_delays < 64) throw Error(ErrorCode::InvalidParameter, "delay scan needs n_delays >= 64");
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidParameter, "dt must be positive");

    SyncResult r;
    r.period = estimate_period(x1, dt);
    const double window = options.window > 0.0 ? options.window : options.window_periods * r.period;
    const auto w = static_cast<std::size_t>(std::llround(window / dt));
    const auto shift_samples = static_cast<std::size_t>(std::ceil(r.period / dt)) + 3;
    if (w < kMinWindowSamples || w + shift_samples > x1.size()) {
        throw Error(ErrorCode::InvalidParameter, "series too short for the window plus one period of delay");
    }

    const std::span<const double> base = x1.subspan(0, w);
    boost::math::interpolators::cardinal_cubic_b_spline<double> spline(x2.begin(), x2.end(), 0.0, dt);
    std::vector<double> shifted(w);

    r.c_zero = pearson(base, x2.subspan(0, w));
    std::vector<double> corr(options.n_delays);
    for (std::size_t k = 0; k < options.n_delays; ++k) {
        const double tau = r.period * static_cast<double>(k) / static_cast<double>(options.n_delays);
        for (std::size_t i = 0; i < w; ++i) shifted[i] = spline(static_cast<double>(i) * dt + tau);
        corr[k] = pearson(base, shifted);
    }
    corr[0] = r.c_zero;
    const auto best = static_cast<std::size_t>(std::max_element(corr.begin(), corr.end()) - corr.begin());
    r.c_max = corr[best];

    // Parabolic refinement of the delay on the periodic grid.
    const std::size_t n = options.n_delays;
    const double cm = corr[(best + n - 1) % n], c0 = corr[best], cp = corr[(best + 1) % n];
    const double denom = cm - 2.0 * c0 + cp;
    const double frac = denom < 0.0 ? std::clamp(0.5 * (cm - cp) / denom, -0.5, 0.5) : 0.0;
    double lock = (static_cast<double>(best) + frac) / static_cast<double>(n);
    lock -= std::floor(lock);
    if (lock >= 1.0) lock = 0.0;
    r.phase_lock = lock;
    r.synchronized = r.c_max >= options.threshold;
    return r;
}

SyncResult delay_scan(const Trajectory& traj, const DelayScanOptions& options) {
    const auto x1 = traj.positions(1);
    const auto x2 = traj.positions(2);
    return delay_scan(x1, x2, traj.dt, options);
}

SyncResult simulate_sync(const SystemParams& p, const SyncRunOptions& options) {
    p.validate();
    const double transient = options.transient > 0.0 ? options.transient : default_transient(p);
    const double period = options.period_guess > 0.0 ? options.period_guess
                                                     : 2.0 * std::numbers::pi / p.omega_m1;
    const double window = options.scan.window > 0.0 ? options.scan.window : options.scan.window_periods * period;
    // Room for the window, one period of delay, and some slack in the period estimate.
    const double record = 1.25 * window + 3.0 * period;

    const ClassicalState s0 = options.random_ic_seed ? random_initial_state(*options.random_ic_seed)
                                                     : default_initial_state(options.initial_displacement);
    IntegratorControls controls = options.integrator;
    controls.record_from = transient;
    const Trajectory traj = integrate(s0, p, transient + record, options.dt_sample, controls);
    return delay_scan(traj, options.scan);
}

namespace {

bool synchronized_at(const SystemParams& base, double detuning, double kc, const SyncRunOptions& options) {
    SystemParams p = base;
    p.omega_m2 = p.omega_m1 + detuning;
    p.coupling = kc;
    return simulate_sync(p, options).synchronized;
}

}  // namespace

double sync_threshold(const SystemParams& p, double frequency_detuning, double kc_lo, double kc_hi,
                      const SyncRunOptions& options, double rel_tol) {
    if (!(kc_lo >= 0.0) || !(kc_hi > kc_lo)) throw Error(ErrorCode::InvalidParameter, "need 0 <= kc_lo < kc_hi");
    const bool sync_lo = synchronized_at(p, frequency_detuning, kc_lo, options);
    if (sync_lo) {
        if (kc_lo == 0.0) return 0.0;
        throw Error(ErrorCode::NoBracket, "already synchronized at the lower coupling");
    }
    if (!synchronized_at(p, frequency_detuning, kc_hi, options)) {
        throw Error(ErrorCode::NoBracket, "not synchronized at the upper coupling");
    }
    double lo = kc_lo, hi = kc_hi;
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (synchronized_at(p, frequency_detuning, mid, options)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

std::vector<SyncCell> sync_map(const SystemParams& p, std::span<const double> detunings,
                               std::span<const double> couplings, const SyncRunOptions& options,
                               unsigned workers) {
    std::vector<SyncCell> cells(detunings.size() * couplings.size());
    for (std::size_t i = 0; i < detunings.size(); ++i) {
        for (std::size_t j = 0; j < couplings.size(); ++j) {
            auto& cell = cells[i * couplings.size() + j];
            cell.frequency_detuning = detunings[i];
            cell.coupling = couplings[j];
        }
    }
    parallel_for(cells.size(), workers, [&](std::size_t idx) {
        SyncCell& cell = cells[idx];
        SystemParams q = p;
        q.omega_m2 = q.omega_m1 + cell.frequency_detuning;
        q.coupling = cell.coupling;
        SyncRunOptions local = options;
        if (local.random_ic_seed) *local.random_ic_seed += idx;
        try {
            cell.result = simulate_sync(q, local);
        } catch (const Error& e) {
            cell.error = e.code();
            cell.message = e.what();
        }
    });
    return cells;
}

}  // namespace optomech
