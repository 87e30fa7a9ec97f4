// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "optomech/experiment.hpp"
#include "optomech/gaussian.hpp"
#include "optomech/linear.hpp"
#include "optomech/sync.hpp"
#include "oracles.hpp"

using namespace optomech;

namespace {

using Clock = std::chrono::steady_clock;

// Everything the criteria produce is funnelled through here for the physicality check.
struct Ledger {
    std::size_t covariances = 0;
    std::size_t entanglement_values = 0;
    std::size_t pearson_values = 0;
    double min_symplectic = std::numeric_limits<double>::infinity();
    double min_e_n = std::numeric_limits<double>::infinity();
    double min_pearson = std::numeric_limits<double>::infinity();
    double max_pearson = -std::numeric_limits<double>::infinity();

    void covariance(const Matrix8& c) {
        ++covariances;
        min_symplectic = std::min(min_symplectic, symplectic_eigenvalues(c).minCoeff());
    }
    void result(const QuantumResult& r) {
        covariance(r.covariance.values);
        entanglement(r.e_n_mech);
        entanglement(r.e_n_optmech);
    }
    void entanglement(double e) {
        ++entanglement_values;
        min_e_n = std::min(min_e_n, e);
    }
    void pearson(double c) {
        ++pearson_values;
        min_pearson = std::min(min_pearson, c);
        max_pearson = std::max(max_pearson, c);
    }
    void sync(const SyncResult& s) {
        pearson(s.c_zero);
        pearson(s.c_max);
    }
};

Ledger ledger;
int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail, Clock::time_point start) {
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("[%s] %2d %-32s %s (%.2f s)\n", pass ? "PASS" : "FAIL", id, name, detail.c_str(), secs);
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

SystemParams fig4(BathKind bath, double kc_rel = 1.0) {
    SystemParams p;
    p.omega_m1 = p.omega_m2 = 3.0;
    p.damping = 3e-5;
    p.coupling = kc_rel * 9.0;
    p.detuning = -3.0;
    p.power = 12.0;
    p.n_th = 9.508;
    p.bath = bath;
    return p;
}

SystemParams fig2(BathKind bath, double gamma = 0.01) {
    SystemParams p;
    p.omega_m1 = p.omega_m2 = 1.0;
    p.power = 0.36;
    p.detuning = 1.0;
    p.damping = gamma;
    p.bath = bath;
    return p;
}

FixedPoint stable_point(const SystemParams& p) {
    const auto fps = find_fixed_points(p);
    return fps.at(static_cast<std::size_t>(select_stable(fps)));
}

double max_abs(const Matrix8& m) { return m.cwiseAbs().maxCoeff(); }

double pearson_of(const std::vector<double>& a, const std::vector<double>& b) {
    const double c = optomech::pearson(a, b);
    ledger.pearson(c);
    return c;
}

const char* bath_name(BathKind b) { return b == BathKind::Common ? "CB" : "SB"; }

void criterion_thermal() {
    const auto start = Clock::now();
    double worst = 0.0;
    for (double n : {0.0, 9.508, 99.50}) {
        SystemParams p;
        p.omega_m1 = p.omega_m2 = 3.0;
        p.damping = 3e-5;
        p.n_th = n;
        const QuantumResult r = analyze_steady_state(p);
        ledger.result(r);
        worst = std::max({worst, std::abs(r.n_eff[0] - n), std::abs(r.n_eff[1] - n)});
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    report(1, "thermal-limit pin", worst <= 1e-6 && secs < 1.0,
           fmt("max |n_eff - n_th| = %.2e (tol 1e-6)", worst), start);
}

void criterion_lyapunov() {
    const auto start = Clock::now();
    std::mt19937_64 rng(2024);
    std::vector<SystemParams> sets;
    for (int k = 0; k < 20; ++k) sets.push_back(oracle::random_stable_params(rng));
    sets.push_back(fig4(BathKind::Separate));
    sets.push_back(fig4(BathKind::Common));
    double worst_diff = 0.0, worst_res = 0.0;
    for (const auto& p : sets) {
        const FixedPoint fp = stable_point(p);
        const Matrix8 m = canonical_drift(p, fp);
        const Matrix8 n = canonical_noise(p);
        const Matrix8 c = lyapunov_steady(m, n);
        // Long enough for exp(2 lambda t) to fall below 1e-30 on the slowest mode.
        const double t_end = 35.0 / std::abs(stability(m).max_real);
        const Matrix8 evolved = evolve_covariance(Matrix8::Zero(), m, n, t_end);
        ledger.covariance(c);
        ledger.covariance(evolved);
        worst_diff = std::max(worst_diff, max_abs(c - evolved));
        worst_res = std::max(worst_res, lyapunov_residual(m, n, c) / max_abs(n));
    }
    report(2, "Lyapunov oracle equivalence", worst_diff <= 1e-8 && worst_res <= 1e-10,
           fmt("%zu sets: max|C_lyap - C_evolved| = %.2e (tol 1e-8), residual/|N| = %.2e (tol 1e-10)", sets.size(),
               worst_diff, worst_res),
           start);
}

void criterion_jacobian() {
    const auto start = Clock::now();
    std::mt19937_64 rng(77);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        SystemParams p = oracle::random_stable_params(rng);
        p.bath = k % 2 == 0 ? BathKind::Separate : BathKind::Common;
        const FixedPoint fp = stable_point(p);
        ClassicalState rest;
        rest.a1 = rest.a2 = fp.a_st;
        rest.x1 = rest.x2 = fp.x_st;
        SystemParams lossless = p;
        lossless.damping = 1e-300;
        const Matrix8 jac = oracle::fd_jacobian(lossless, rest);
        const Matrix8 m = conservative_drift(p, fp);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                worst = std::max(worst, std::abs(m(i, j) - jac(i, j)) / std::max(std::abs(m(i, j)), 1e-3));
    }
    report(3, "Jacobian consistency", worst <= 1e-6, fmt("10 sets: max entrywise relative error = %.2e (tol 1e-6)", worst),
           start);
}

void criterion_normal_modes() {
    const auto start = Clock::now();
    std::vector<SystemParams> sets{fig4(BathKind::Common), fig4(BathKind::Common, 0.2)};
    std::mt19937_64 rng(31);
    while (sets.size() < 8) {
        SystemParams p = oracle::random_stable_params(rng);
        p.bath = BathKind::Common;
        if (select_stable(find_fixed_points(p)) >= 0) sets.push_back(p);
    }
    double worst = 0.0;
    bool undamped = true;
    for (const auto& p : sets) {
        const FixedPoint fp = stable_point(p);
        const Matrix8 c = lyapunov_steady(drift_matrix(p, fp), noise_matrix(p));
        const NormalModeSystem nm = cb_normal_mode_matrices(p, fp);
        const Matrix8 c_nm = lyapunov_steady(nm.drift, nm.noise);
        const Matrix8 back = nm.basis.transpose() * c_nm * nm.basis;
        worst = std::max(worst, max_abs(c - back) / max_abs(c));
        using namespace index;
        // Relative mode: no damping on x- or p-, no bath noise.
        undamped = undamped && nm.drift(X2, X2) == 0.0 && nm.drift(Px2, Px2) == 0.0 && nm.drift(X2, Px2) == 1.0 &&
                   nm.noise.row(X2).isZero() && nm.noise.row(Px2).isZero();
        undamped = undamped && nm.drift(Px1, Px1) == -2.0 * p.damping;
    }
    report(4, "normal-mode basis equivalence", worst <= 1e-10 && undamped,
           fmt("%zu CB sets: max relative |C - T'C'T| = %.2e (tol 1e-10), relative mode undamped: %s", sets.size(),
               worst, undamped ? "yes" : "no"),
           start);
}

void criterion_sync() {
    const auto start = Clock::now();
    // (a) dissipative locking without a spring when Gamma exceeds the detuning.
    SystemParams cb = fig2(BathKind::Common, 0.06);
    SystemParams sb = fig2(BathKind::Separate, 0.06);
    cb.omega_m2 = sb.omega_m2 = 1.05;
    const SyncResult a_cb = simulate_sync(cb);
    const SyncResult a_sb = simulate_sync(sb);
    ledger.sync(a_cb);
    ledger.sync(a_sb);
    const bool pass_a = a_cb.c_max >= 0.9 && a_sb.c_max <= 0.7;

    // (b) 10 x 10 map at Gamma = 0.01.
    std::vector<double> dw(10), kc(10);
    for (int i = 0; i < 10; ++i) dw[i] = kc[i] = 0.1 * i / 9.0;
    const auto map_sb = sync_map(fig2(BathKind::Separate), dw, kc);
    const auto map_cb = sync_map(fig2(BathKind::Common), dw, kc);
    int n_sb = 0, n_cb = 0, cb_only = 0, sb_only = 0, failed = 0;
    for (std::size_t i = 0; i < map_sb.size(); ++i) {
        const bool s = map_sb[i].result && map_sb[i].result->synchronized;
        const bool c = map_cb[i].result && map_cb[i].result->synchronized;
        if (map_sb[i].result) ledger.sync(*map_sb[i].result); else ++failed;
        if (map_cb[i].result) ledger.sync(*map_cb[i].result); else ++failed;
        n_sb += s;
        n_cb += c;
        cb_only += c && !s;
        sb_only += s && !c;
    }
    const bool pass_b = n_cb >= n_sb && cb_only > 0;

    // (c) the lock just above the common-bath threshold is anti-phase.
    const double thr = sync_threshold(fig2(BathKind::Common), 0.05, 0.0, 0.2);
    SystemParams above = fig2(BathKind::Common);
    above.omega_m2 = 1.05;
    above.coupling = 1.05 * thr;
    const SyncResult c_res = simulate_sync(above);
    ledger.sync(c_res);
    const bool pass_c = c_res.synchronized && c_res.phase_lock > 0.4 && c_res.phase_lock < 0.6;

    report(5, "synchronization anchors", pass_a && pass_b && pass_c,
           fmt("(a) Kc=0: C_max CB=%.3f SB=%.3f [%s]; (b) synced cells CB=%d SB=%d, CB-only=%d, SB-only=%d, "
               "failed=%d [%s]; (c) Kc_thr(CB)=%.4f, lock at 1.05 thr=%.3f [%s]",
               a_cb.c_max, a_sb.c_max, pass_a ? "ok" : "no", n_cb, n_sb, cb_only, sb_only, failed,
               pass_b ? "ok" : "no", thr, c_res.phase_lock, pass_c ? "ok" : "no"),
           start);
}

void criterion_entanglement() {
    const auto start = Clock::now();
    // (a) coupling threshold for mechanical entanglement.
    bool pass_a = true;
    std::string thresholds;
    for (BathKind b : {BathKind::Separate, BathKind::Common}) {
        double first_entangled = -1.0;
        bool monotone_onset = true;
        for (int k = 0; k <= 100; ++k) {
            const double rel = k / 100.0;
            const QuantumResult r = analyze_steady_state(fig4(b, rel));
            ledger.result(r);
            if (r.e_n_mech > 0.0 && first_entangled < 0.0) first_entangled = rel;
            if (first_entangled >= 0.0 && r.e_n_mech == 0.0) monotone_onset = false;
        }
        pass_a = pass_a && first_entangled > 0.0 && monotone_onset;
        thresholds += fmt("%s %.2f ", bath_name(b), first_entangled);
    }
    // (b) common bath wins at Kc / w^2 = 1.
    const QuantumResult sb = analyze_steady_state(fig4(BathKind::Separate));
    const QuantumResult cb = analyze_steady_state(fig4(BathKind::Common));
    ledger.result(sb);
    ledger.result(cb);
    const bool pass_b = cb.e_n_mech > sb.e_n_mech && cb.n_eff[0] < sb.n_eff[0];
    // (c) light-mirror entanglement without a spring.
    const QuantumResult sb0 = analyze_steady_state(fig4(BathKind::Separate, 0.0));
    const QuantumResult cb0 = analyze_steady_state(fig4(BathKind::Common, 0.0));
    ledger.result(sb0);
    ledger.result(cb0);
    const bool pass_c = sb0.e_n_optmech > 0.0 && cb0.e_n_optmech > 0.0;
    report(6, "entanglement/cooling anchors", pass_a && pass_b && pass_c,
           fmt("(a) onset Kc/w^2: %s[%s]; (b) E_N CB=%.4f SB=%.4f, n_eff CB=%.4f SB=%.4f [%s]; "
               "(c) E_N(opt-mech) at Kc=0: SB=%.4f CB=%.4f [%s]",
               thresholds.c_str(), pass_a ? "ok" : "no", cb.e_n_mech, sb.e_n_mech, cb.n_eff[0], sb.n_eff[0],
               pass_b ? "ok" : "no", sb0.e_n_optmech, cb0.e_n_optmech, pass_c ? "ok" : "no"),
           start);
}

void criterion_anticorrelation() {
    const auto start = Clock::now();
    // Ranges fixed before inspecting results: red side Delta0 in [-2 w, 0];
    // power over four decades on a log grid at Delta0 = -w.
    std::vector<double> detunings(64), powers(64);
    for (int i = 0; i < 64; ++i) {
        detunings[i] = -6.0 + 6.0 * i / 63.0;
        powers[i] = std::pow(10.0, -1.0 + 4.0 * i / 63.0);
    }
    const std::vector<BathKind> baths{BathKind::Separate, BathKind::Common};
    bool pass = true;
    std::string detail;
    for (const auto& [field, values] : {std::pair{"delta0", &detunings}, std::pair{"power", &powers}}) {
        const auto rows = quantum_scan(fig4(BathKind::Separate), field, *values, baths, 1);
        for (BathKind b : baths) {
            std::vector<double> en, ne, en_w, ne_w;
            for (const auto& r : rows) {
                if (r.params.bath != b || !r.result) continue;
                ledger.result(*r.result);
                en.push_back(r.result->e_n_mech);
                ne.push_back(r.result->n_eff[0]);
                if (r.result->e_n_mech > 0.0) {
                    en_w.push_back(r.result->e_n_mech);
                    ne_w.push_back(r.result->n_eff[0]);
                }
            }
            const double c = pearson_of(en, ne);
            const double cw = en_w.size() >= 10 ? pearson_of(en_w, ne_w) : std::nan("");
            pass = pass && c < -0.9;
            detail += fmt("%s/%s: r=%.3f over %zu stable cells (entangled cells only: r=%.3f, %zu); ", field,
                          bath_name(b), c, en.size(), cw, en_w.size());
        }
    }
    detail += "tol r < -0.9";
    report(7, "E_N vs n_eff anticorrelation", pass, detail, start);
}

void criterion_optimal_detuning() {
    const auto start = Clock::now();
    bool sb_ok = true, cb_between = true, cb_moves = true, close_ok = true;
    std::string detail;
    double prev_s = -1.0;
    for (BathKind b : {BathKind::Separate, BathKind::Common}) {
        for (double rel : {0.2, 0.6, 1.0}) {
            const SystemParams p = fig4(b, rel);
            const DetuningOptimum o = optimize_detuning(p, -9.0, -0.5, 64, 1e-4);
            for (double d : {o.entanglement.arg, o.cooling.arg}) {
                SystemParams q = p;
                q.detuning = d;
                ledger.result(analyze_steady_state(q));
            }
            const NormalModes m = normal_modes(p);
            const double dc = o.cooling.arg;
            const double shift = std::abs(o.entanglement.arg - dc) / std::abs(dc);
            close_ok = close_ok && shift < 0.02 && !o.cooling.boundary_limited && !o.entanglement.boundary_limited;
            if (b == BathKind::Separate) {
                sb_ok = sb_ok && std::abs(dc + m.omega_bar) <= 0.05 * m.omega_bar;
                detail += fmt("SB %.1f: cool %.4f vs -Wbar %.4f, ent %.4f (shift %.1f%%); ", rel, dc, -m.omega_bar,
                              o.entanglement.arg, 100.0 * shift);
            } else {
                cb_between = cb_between && dc > -m.omega_bar && dc < -m.omega_plus;
                const double s = (m.omega_bar + dc) / (m.omega_bar - m.omega_plus);
                cb_moves = cb_moves && s > prev_s;
                prev_s = s;
                detail += fmt("CB %.1f: cool %.4f in (%.4f, %.4f) s=%.3f, ent %.4f (shift %.1f%%); ", rel, dc,
                              -m.omega_bar, -m.omega_plus, s, o.entanglement.arg, 100.0 * shift);
            }
        }
    }
    detail += fmt("[SB near -Wbar: %s, CB between: %s, CB toward -W+: %s, shifts < 2%%: %s]", sb_ok ? "ok" : "no",
                  cb_between ? "ok" : "no", cb_moves ? "ok" : "no", close_ok ? "ok" : "no");
    report(8, "optimal-detuning structure", sb_ok && cb_between && cb_moves && close_ok, detail, start);
}

void criterion_sideband() {
    const auto start = Clock::now();
    std::vector<double> omegas(10);
    for (int i = 0; i < 10; ++i) omegas[i] = 1.0 + i;
    const SystemParams base = fig4(BathKind::Separate);
    const auto recs = sideband_scan(base, omegas, 0.5, 1e-3, 0.5, 64, 1e-4, 1);
    std::vector<double> cb, sb, single, g_cb, g_sb, g_single;
    bool complete = true;
    for (const auto& r : recs) {
        if (!r.common || !r.separate || !r.single) {
            complete = false;
            continue;
        }
        cb.push_back(r.common->cooling.value);
        sb.push_back(r.separate->cooling.value);
        single.push_back(r.single->cooling.value);
        g_cb.push_back(r.common->g_at_cooling);
        g_sb.push_back(r.separate->g_at_cooling);
        g_single.push_back(r.single->g_at_cooling);
        for (const auto* o : {&*r.common, &*r.separate}) {
            SystemParams q = base;
            q.omega_m1 = q.omega_m2 = r.omega_m;
            q.damping = r.omega_m / base.quality_factor();
            q.coupling = 0.5 * r.omega_m * r.omega_m;
            q.detuning = -r.omega_m;
            q.bath = o == &*r.common ? BathKind::Common : BathKind::Separate;
            q.power = o->cooling.arg;
            ledger.result(analyze_steady_state(q));
        }
    }
    auto decreasing = [](const std::vector<double>& v) {
        return std::adjacent_find(v.begin(), v.end(), std::less_equal<>()) == v.end();
    };
    auto increasing = [](const std::vector<double>& v) {
        return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
    };
    const auto sb_min = std::min_element(sb.begin(), sb.end());
    const bool sb_interior = !sb.empty() && sb_min != sb.begin() && sb_min != sb.end() - 1;
    bool single_below = true;
    for (std::size_t i = 0; i < cb.size(); ++i) single_below = single_below && single[i] < cb[i];
    const bool ok = complete && decreasing(cb) && sb_interior && single_below && decreasing(g_cb) &&
                    decreasing(g_single) && increasing(g_sb);
    report(9, "sideband trends", ok,
           fmt("%zu points; CB min n_eff decreasing: %s (%.4f -> %.4f); SB interior minimum: %s (at w=%.0f); "
               "single below CB: %s; optimal g/w CB decreasing: %s, single decreasing: %s, SB increasing: %s",
               cb.size(), decreasing(cb) ? "yes" : "no", cb.front(), cb.back(), sb_interior ? "yes" : "no",
               omegas[static_cast<std::size_t>(sb_min - sb.begin())], single_below ? "yes" : "no",
               decreasing(g_cb) ? "yes" : "no", decreasing(g_single) ? "yes" : "no", increasing(g_sb) ? "yes" : "no"),
           start);
}

void criterion_g_anchor() {
    const auto start = Clock::now();
    const QuantumResult r = analyze_steady_state(fig4(BathKind::Separate));
    ledger.result(r);
    const double rel = std::abs(r.g_over_omega - 0.079) / 0.079;
    report(10, "g/omega_m anchor", rel <= 0.10, fmt("g/w = %.4f vs 0.079 (deviation %.1f%%, tol 10%%)", r.g_over_omega,
                                                    100.0 * rel),
           start);
}

void criterion_physicality() {
    const auto start = Clock::now();
    const bool ok = ledger.min_symplectic >= 0.5 - 1e-9 && ledger.min_e_n >= 0.0 && ledger.min_pearson >= -1.0 &&
                    ledger.max_pearson <= 1.0;
    report(11, "physicality suite", ok,
           fmt("%zu covariances min nu = %.6f (>= 0.5 - 1e-9); %zu E_N values min = %.3e; %zu Pearson values in "
               "[%.4f, %.4f]",
               ledger.covariances, ledger.min_symplectic, ledger.entanglement_values, ledger.min_e_n,
               ledger.pearson_values, ledger.min_pearson, ledger.max_pearson),
           start);
}

}  // namespace

int main() {
    const std::function<void()> criteria[] = {criterion_thermal,       criterion_lyapunov,     criterion_jacobian,
                                              criterion_normal_modes,  criterion_sync,         criterion_entanglement,
                                              criterion_anticorrelation, criterion_optimal_detuning,
                                              criterion_sideband,      criterion_g_anchor,     criterion_physicality};
    int id = 0;
    for (const auto& c : criteria) {
        ++id;
        try {
            c();
        } catch (const std::exception& e) {
            std::printf("[FAIL] %2d raised: %s\n", id, e.what());
            ++failures;
        }
    }
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
