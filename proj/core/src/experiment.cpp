#include "optomech/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "optomech/config.hpp"
#include "optomech/csv.hpp"
#include "optomech/error.hpp"
#include "optomech/parallel.hpp"

#ifndef OPTOMECH_VERSION
#define OPTOMECH_VERSION "unknown"
#endif

namespace optomech {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct KindName {
    ExperimentKind kind;
    std::string_view name;
};
constexpr KindName kKindNames[] = {
    {ExperimentKind::Trajectory, "trajectory"},
    {ExperimentKind::SyncMap, "syncmap"},
    {ExperimentKind::SyncThreshold, "syncthreshold"},
    {ExperimentKind::Steady, "steady"},
    {ExperimentKind::DetuningScan, "detuning-scan"},
    {ExperimentKind::PowerScan, "power-scan"},
    {ExperimentKind::OptimizeDetuning, "optimize-detuning"},
    {ExperimentKind::SidebandScan, "sideband-scan"},
};

// Both objectives at one point; NaN when the fixed point is unstable.
struct Objectives {
    double e_n = kNaN;
    double n_eff = kNaN;
    double g = kNaN;
};

Objectives evaluate(const SystemParams& p) {
    try {
        const QuantumResult r = analyze_steady_state(p);
        return {r.e_n_mech, r.n_eff[0], r.g_over_omega};
    } catch (const Error& e) {
        if (e.code() == ErrorCode::UnstableDrift) return {};
        throw;
    }
}

// Golden-section search for the maximum of f on [a, b]; NaN counts as -inf.
std::pair<double, double> golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto g = [&](double x) {
        const double v = f(x);
        return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
    };
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = g(c), fd = g(d);
    while (std::abs(b - a) > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = g(d);
        }
    }
    return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

// Grid search followed by golden refinement inside the neighbouring cells.
// `sign` = +1 maximizes, -1 minimizes. `to_param` maps the search coordinate
// to the value written into the result (identity or exp).
Optimum refine_optimum(const std::vector<double>& grid, const std::vector<double>& values, double sign,
                       const std::function<double(double)>& objective, double tol) {
    std::size_t best = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::isnan(values[i])) continue;
        if (best == grid.size() || sign * values[i] > sign * values[best]) best = i;
    }
    Optimum opt;
    if (best == grid.size()) return opt;
    const double a = grid[best == 0 ? 0 : best - 1];
    const double b = grid[best + 1 == grid.size() ? best : best + 1];
    auto [x, fx] = golden_max([&](double u) { return sign * objective(u); }, a, b, tol);
    if (sign * values[best] > fx) {
        x = grid[best];
        fx = sign * values[best];
    }
    opt.arg = x;
    opt.value = sign * fx;
    opt.boundary_limited = best == 0 || best + 1 == grid.size();
    return opt;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
    for (const auto& k : kKindNames)
        if (k.kind == kind) return k.name;
    return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
    for (const auto& k : kKindNames)
        if (k.name == text) return k.kind;
    throw Error(ErrorCode::ConfigError, "unknown experiment kind '" + std::string(text) + "'");
}

void Axis::validate(std::string_view name) const {
    const std::string n(name);
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error(ErrorCode::ConfigError, "axis " + n + " is not finite");
    if (count == 0) throw Error(ErrorCode::ConfigError, "axis " + n + " is empty");
    if (count > 1 && !(hi > lo)) throw Error(ErrorCode::ConfigError, "axis " + n + " needs hi > lo");
    if (log_spaced && !(lo > 0.0)) throw Error(ErrorCode::ConfigError, "log axis " + n + " needs lo > 0");
}

std::vector<double> Axis::values() const {
    if (!log_spaced) return linspace(lo, hi, count);
    auto v = linspace(std::log(lo), std::log(hi), count);
    for (auto& x : v) x = std::exp(x);
    return v;
}

void ExperimentSpec::validate() const {
    try {
        base.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
    for (const auto& [name, axis] : axes) axis.validate(name);
    auto need = [&](const char* name) {
        if (!axes.contains(name)) {
            throw Error(ErrorCode::ConfigError,
                        std::string(to_string(kind)) + " needs axis '" + name + "'");
        }
    };
    if (workers == 0) throw Error(ErrorCode::ConfigError, "workers must be >= 1");
    switch (kind) {
        case ExperimentKind::Trajectory:
            if (!(t_end > 0.0) || !(dt_sample > 0.0) || record_from < 0.0 || record_from >= t_end) {
                throw Error(ErrorCode::ConfigError, "trajectory needs t_end > record_from >= 0 and dt_sample > 0");
            }
            break;
        case ExperimentKind::SyncMap:
            need("frequency_detuning");
            need("coupling");
            break;
        case ExperimentKind::SyncThreshold: need("coupling"); break;
        case ExperimentKind::Steady: break;
        case ExperimentKind::DetuningScan: need("delta0"); break;
        case ExperimentKind::PowerScan: need("power"); break;
        case ExperimentKind::OptimizeDetuning: need("delta0"); break;
        case ExperimentKind::SidebandScan: need("omega_m"); break;
    }
    if (optimizer_grid < 64 &&
        (kind == ExperimentKind::OptimizeDetuning || kind == ExperimentKind::SidebandScan)) {
        throw Error(ErrorCode::ConfigError, "optimizer grid must have at least 64 points");
    }
}

DetuningOptimum optimize_detuning(const SystemParams& p, double lo, double hi, std::size_t grid, double tol) {
    if (grid < 64) throw Error(ErrorCode::InvalidParameter, "detuning grid needs >= 64 points");
    if (!(hi > lo)) throw Error(ErrorCode::InvalidParameter, "detuning range needs hi > lo");
    const auto xs = linspace(lo, hi, grid);
    std::vector<double> en(grid), ne(grid);
    DetuningOptimum out;
    for (std::size_t i = 0; i < grid; ++i) {
        SystemParams q = p;
        q.detuning = xs[i];
        const Objectives o = evaluate(q);
        en[i] = o.e_n;
        ne[i] = o.n_eff;
        if (std::isnan(o.e_n)) {
            ++out.skipped_cells;
        } else {
            ++out.stable_cells;
        }
    }
    if (out.stable_cells == 0) throw Error(ErrorCode::AllUnstable, "no stable cell over the detuning range");
    auto at = [&](double d) {
        SystemParams q = p;
        q.detuning = d;
        return evaluate(q);
    };
    out.entanglement = refine_optimum(xs, en, +1.0, [&](double d) { return at(d).e_n; }, tol);
    out.cooling = refine_optimum(xs, ne, -1.0, [&](double d) { return at(d).n_eff; }, tol);
    return out;
}

PowerOptimum optimize_power(const SystemParams& p, double lo, double hi, std::size_t grid, double tol) {
    if (grid < 2) throw Error(ErrorCode::InvalidParameter, "power grid needs >= 2 points");
    if (!(lo > 0.0) || !(hi > lo)) throw Error(ErrorCode::InvalidParameter, "power range needs 0 < lo < hi");
    const auto us = linspace(std::log(lo), std::log(hi), grid);
    std::vector<double> en(grid), ne(grid);
    PowerOptimum out;
    auto at = [&](double u) {
        SystemParams q = p;
        q.power = std::exp(u);
        return evaluate(q);
    };
    for (std::size_t i = 0; i < grid; ++i) {
        const Objectives o = at(us[i]);
        en[i] = o.e_n;
        ne[i] = o.n_eff;
        if (std::isnan(o.e_n)) {
            ++out.skipped_cells;
        } else {
            ++out.stable_cells;
        }
    }
    if (out.stable_cells == 0) throw Error(ErrorCode::AllUnstable, "no stable cell over the power range");
    out.entanglement = refine_optimum(us, en, +1.0, [&](double u) { return at(u).e_n; }, tol);
    out.cooling = refine_optimum(us, ne, -1.0, [&](double u) { return at(u).n_eff; }, tol);
    out.entanglement.arg = std::exp(out.entanglement.arg);
    out.cooling.arg = std::exp(out.cooling.arg);
    SystemParams q = p;
    q.power = out.entanglement.arg;
    out.g_at_entanglement = evaluate(q).g;
    q.power = out.cooling.arg;
    out.g_at_cooling = evaluate(q).g;
    return out;
}

std::pair<double, double> power_window(const SystemParams& p, double g_min, double g_max) {
    if (!(g_min > 0.0) || !(g_max > g_min)) throw Error(ErrorCode::InvalidParameter, "need 0 < g_min < g_max");
    const double w = p.omega_m1;
    const double photons = 0.25 / (0.25 + p.detuning * p.detuning);
    auto power_for = [&](double g) { return 2.0 * w * w * w * g * g / photons; };
    return {power_for(g_min), power_for(g_max)};
}

std::vector<SidebandRecord> sideband_scan(const SystemParams& p, std::span<const double> omegas,
                                          double relative_coupling, double g_min, double g_max, std::size_t grid,
                                          double tol, unsigned workers) {
    const double q_m = p.quality_factor();
    std::vector<SidebandRecord> out(omegas.size());
    parallel_for(omegas.size(), workers, [&](std::size_t i) {
        SidebandRecord& rec = out[i];
        rec.omega_m = omegas[i];
        SystemParams q = p;
        q.omega_m1 = q.omega_m2 = omegas[i];
        q.damping = omegas[i] / q_m;
        q.coupling = relative_coupling * omegas[i] * omegas[i];
        q.detuning = -omegas[i];
        const auto [lo, hi] = power_window(q, g_min, g_max);
        try {
            q.bath = BathKind::Common;
            rec.common = optimize_power(q, lo, hi, grid, tol);
            q.bath = BathKind::Separate;
            rec.separate = optimize_power(q, lo, hi, grid, tol);
            q.coupling = 0.0;
            rec.single = optimize_power(q, lo, hi, grid, tol);
        } catch (const Error& e) {
            rec.error = e.what();
        }
    });
    return out;
}

std::vector<QuantumRecord> quantum_scan(const SystemParams& p, std::string_view field,
                                        std::span<const double> values, std::span<const BathKind> baths,
                                        unsigned workers) {
    std::vector<QuantumRecord> out(values.size() * baths.size());
    for (std::size_t b = 0; b < baths.size(); ++b) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            SystemParams q = p;
            q.bath = baths[b];
            const double v = values[i];
            if (field == "delta0") {
                q.detuning = v;
            } else if (field == "power") {
                q.power = v;
            } else if (field == "coupling") {
                q.coupling = v;
            } else if (field == "kc_rel") {
                q.coupling = v * q.omega_m1 * q.omega_m1;
            } else if (field == "omega_m") {
                q.omega_m1 = q.omega_m2 = v;
            } else if (field != "none") {
                throw Error(ErrorCode::InvalidParameter, "cannot scan field '" + std::string(field) + "'");
            }
            out[b * values.size() + i].params = q;
        }
    }
    parallel_for(out.size(), workers, [&](std::size_t i) {
        QuantumRecord& rec = out[i];
        try {
            rec.result = analyze_steady_state(rec.params);
        } catch (const Error& e) {
            rec.status = e.code() == ErrorCode::UnstableDrift ? "unstable" : std::string(to_string(e.code()));
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// run()

namespace {

namespace fs = std::filesystem;

class OutputDir {
public:
    explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    std::ofstream open(const std::string& name, RunSummary& summary) const {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
        summary.files.push_back(path);
        return out;
    }

private:
    fs::path dir_;
};

std::vector<BathKind> baths_for(const ExperimentSpec& spec) {
    if (spec.both_baths) return {BathKind::Separate, BathKind::Common};
    return {spec.base.bath};
}

void write_quantum_header(csv::Writer& w) {
    w.header({"bath", "omega_m", "gamma", "kc", "delta0", "power", "n_th", "status", "x_st", "e_n_mech",
              "e_n_optmech", "n_eff", "g_over_omega", "residual", "stable_flag"});
}

void write_quantum_row(csv::Writer& w, const QuantumRecord& rec) {
    const SystemParams& p = rec.params;
    w.field(to_string(p.bath)).field(p.omega_m1).field(p.damping).field(p.coupling).field(p.detuning);
    w.field(p.power).field(p.n_th).field(std::string_view(rec.status));
    if (rec.result) {
        const QuantumResult& r = *rec.result;
        w.field(r.fixed_point.x_st).field(r.e_n_mech).field(r.e_n_optmech).field(r.n_eff[0]);
        w.field(r.g_over_omega).field(r.residual).field(static_cast<long long>(r.stable ? 1 : 0));
    } else {
        for (int i = 0; i < 6; ++i) w.field(kNaN);
        w.field(0LL);
    }
    w.end_row();
}

std::size_t write_quantum_table(const OutputDir& dir, const std::string& name, const std::vector<QuantumRecord>& rows,
                                RunSummary& summary) {
    auto out = dir.open(name, summary);
    csv::Writer w(out);
    write_quantum_header(w);
    std::size_t failed = 0;
    for (const auto& rec : rows) {
        write_quantum_row(w, rec);
        if (!rec.result) ++failed;
    }
    return failed;
}

void write_plot_script(const OutputDir& dir, const std::string& name, const std::string& body, RunSummary& summary) {
    auto out = dir.open(name, summary);
    out << "# gnuplot script; run from this directory: gnuplot " << name << "\n"
        << "set datafile separator ','\n"
        << "set key autotitle columnhead\n"
        << body;
}

void run_trajectory(const ExperimentSpec& spec, const OutputDir& dir, RunSummary& summary) {
    const ClassicalState s0 = spec.randomized_ic ? random_initial_state(spec.seed)
                                                 : default_initial_state(spec.sync.initial_displacement);
    IntegratorControls controls = spec.sync.integrator;
    controls.record_from = spec.record_from;
    const Trajectory traj = integrate(s0, spec.base, spec.t_end, spec.dt_sample, controls);
    auto out = dir.open("trajectory.csv", summary);
    csv::write_trajectory(out, traj);
    summary.cells = traj.size();
    write_plot_script(dir, "trajectory.gp",
                      "set xlabel 't'\nset ylabel 'x'\n"
                      "plot 'trajectory.csv' using 1:6 with lines title 'x1', '' using 1:8 with lines title 'x2'\n",
                      summary);
}

void run_sync_map(const ExperimentSpec& spec, const OutputDir& dir, RunSummary& summary) {
    const auto detunings = spec.axes.at("frequency_detuning").values();
    const auto couplings = spec.axes.at("coupling").values();
    SyncRunOptions options = spec.sync;
    if (spec.randomized_ic) options.random_ic_seed = spec.seed;
    for (BathKind bath : baths_for(spec)) {
        SystemParams p = spec.base;
        p.bath = bath;
        const auto cells = sync_map(p, detunings, couplings, options, spec.workers);
        const std::string stem = "sync_map_" + std::string(to_string(bath));
        auto out = dir.open(stem + ".csv", summary);
        csv::Writer w(out);
        w.header({"delta_omega_m", "kc", "c_zero", "c_max", "phase_lock", "period", "synchronized", "status"});
        for (const auto& c : cells) {
            w.field(c.frequency_detuning).field(c.coupling);
            if (c.result) {
                w.field(c.result->c_zero).field(c.result->c_max).field(c.result->phase_lock);
                w.field(c.result->period).field(static_cast<long long>(c.result->synchronized ? 1 : 0)).field("ok");
            } else {
                for (int i = 0; i < 4; ++i) w.field(kNaN);
                w.field(0LL).field(to_string(*c.error));
                ++summary.failed_cells;
            }
            w.end_row();
        }
        summary.cells += cells.size();
        write_plot_script(dir, stem + ".gp",
                          "set xlabel 'Delta omega_m'\nset ylabel 'K_c'\nset cblabel 'C_max'\n"
                          "set view map\nset cbrange [0:1]\n"
                          "plot '" + stem + ".csv' using 1:2:4 with image title 'C_max'\n",
                          summary);
    }
}

void run_sync_threshold(const ExperimentSpec& spec, const OutputDir& dir, RunSummary& summary) {
    const Axis& kc = spec.axes.at("coupling");
    std::vector<double> gammas{spec.base.damping};
    if (spec.axes.contains("gamma")) gammas = spec.axes.at("gamma").values();
    SyncRunOptions options = spec.sync;
    if (spec.randomized_ic) options.random_ic_seed = spec.seed;

    struct Row {
        BathKind bath;
        double gamma;
        double threshold = kNaN;
        std::string status = "ok";
    };
    std::vector<Row> rows;
    for (BathKind bath : baths_for(spec))
        for (double g : gammas) rows.push_back({bath, g});
    parallel_for(rows.size(), spec.workers, [&](std::size_t i) {
        SystemParams p = spec.base;
        p.bath = rows[i].bath;
        p.damping = rows[i].gamma;
        try {
            rows[i].threshold = sync_threshold(p, spec.threshold_detuning, kc.lo, kc.hi, options);
        } catch (const Error& e) {
            rows[i].status = std::string(to_string(e.code()));
        }
    });
    auto out = dir.open("sync_threshold.csv", summary);
    csv::Writer w(out);
    w.header({"bath", "gamma", "delta_omega_m", "kc_threshold", "status"});
    for (const auto& r : rows) {
        w.field(to_string(r.bath)).field(r.gamma).field(spec.threshold_detuning).field(r.threshold);
        w.field(std::string_view(r.status));
        w.end_row();
        if (r.status != "ok") ++summary.failed_cells;
    }
    summary.cells = rows.size();
    write_plot_script(dir, "sync_threshold.gp",
                      "set xlabel 'Gamma'\nset ylabel 'K_c^{thres}'\n"
                      "plot 'sync_threshold.csv' using 2:(strcol(1) eq 'cb' ? $4 : 1/0) with linespoints title 'CB', "
                      "'' using 2:(strcol(1) eq 'sb' ? $4 : 1/0) with linespoints title 'SB'\n",
                      summary);
}

void run_quantum_scan(const ExperimentSpec& spec, const OutputDir& dir, RunSummary& summary,
                      const std::string& field, const std::string& stem) {
    std::vector<double> values{0.0};
    if (field != "none") values = spec.axes.at(field).values();
    const auto baths = baths_for(spec);
    const auto rows = quantum_scan(spec.base, field, values, baths, spec.workers);
    summary.failed_cells += write_quantum_table(dir, stem + ".csv", rows, summary);
    summary.cells += rows.size();
    if (field == "none") {
        // Debug dumps of the linear system around the selected fixed point.
        for (const auto& rec : rows) {
            if (!rec.result) continue;
            const std::string b(to_string(rec.params.bath));
            auto m = dir.open("drift_" + b + ".csv", summary);
            csv::write_matrix(m, drift_matrix(rec.params, rec.result->fixed_point));
            if (rec.params.power > 0.0) {
                auto n = dir.open("noise_" + b + ".csv", summary);
                csv::write_matrix(n, noise_matrix(rec.params));
            }
        }
        return;
    }
    const std::string col = field == "delta0" ? "4" : field == "power" ? "6" : "4";
    write_plot_script(dir, stem + ".gp",
                      "set xlabel '" + field + "'\nset ylabel 'E_N'\nset y2label 'n_eff'\nset y2tics\n"
                      "plot '" + stem + ".csv' using " + col + ":(strcol(1) eq 'cb' ? $10 : 1/0) with lines title 'E_N CB', "
                      "'' using " + col + ":(strcol(1) eq 'sb' ? $10 : 1/0) with lines title 'E_N SB', "
                      "'' using " + col + ":(strcol(1) eq 'cb' ? $12 : 1/0) axes x1y2 with lines title 'n_eff CB', "
                      "'' using " + col + ":(strcol(1) eq 'sb' ? $12 : 1/0) axes x1y2 with lines title 'n_eff SB'\n",
                      summary);
}

void run_optimize_detuning(const ExperimentSpec& spec, const OutputDir& dir, RunSummary& summary) {
    const Axis& d = spec.axes.at("delta0");
    std::vector<double> rels{spec.base.relative_coupling()};
    if (spec.axes.contains("kc_rel")) rels = spec.axes.at("kc_rel").values();
    struct Row {
        BathKind bath;
        double rel;
        std::optional<DetuningOptimum> opt;
        std::string status = "ok";
    };
    std::vector<Row> rows;
    for (BathKind bath : baths_for(spec))
        for (double r : rels) rows.push_back({bath, r, std::nullopt});
    parallel_for(rows.size(), spec.workers, [&](std::size_t i) {
        SystemParams p = spec.base;
        p.bath = rows[i].bath;
        p.coupling = rows[i].rel * p.omega_m1 * p.omega_m1;
        try {
            rows[i].opt = optimize_detuning(p, d.lo, d.hi, std::max(spec.optimizer_grid, d.count), spec.optimizer_tol);
        } catch (const Error& e) {
            rows[i].status = std::string(to_string(e.code()));
        }
    });
    auto out = dir.open("optimize_detuning.csv", summary);
    csv::Writer w(out);
    w.header({"bath", "kc_rel", "omega_plus", "omega_minus", "omega_bar", "delta0_entanglement", "e_n_max",
              "entanglement_boundary", "delta0_cooling", "n_eff_min", "cooling_boundary", "stable_cells",
              "skipped_cells", "status"});
    for (const auto& r : rows) {
        SystemParams p = spec.base;
        p.coupling = r.rel * p.omega_m1 * p.omega_m1;
        const NormalModes modes = normal_modes(p);
        w.field(to_string(r.bath)).field(r.rel).field(modes.omega_plus).field(modes.omega_minus).field(modes.omega_bar);
        if (r.opt) {
            w.field(r.opt->entanglement.arg).field(r.opt->entanglement.value);
            w.field(static_cast<long long>(r.opt->entanglement.boundary_limited));
            w.field(r.opt->cooling.arg).field(r.opt->cooling.value);
            w.field(static_cast<long long>(r.opt->cooling.boundary_limited));
            w.field(static_cast<long long>(r.opt->stable_cells)).field(static_cast<long long>(r.opt->skipped_cells));
        } else {
            for (int i = 0; i < 8; ++i) w.field(kNaN);
            ++summary.failed_cells;
        }
        w.field(std::string_view(r.status));
        w.end_row();
    }
    summary.cells = rows.size();
    write_plot_script(dir, "optimize_detuning.gp",
                      "set xlabel 'K_c/omega_m^2'\nset ylabel 'Delta_0'\n"
                      "plot 'optimize_detuning.csv' using 2:(strcol(1) eq 'cb' ? $9 : 1/0) with linespoints title 'cooling CB', "
                      "'' using 2:(strcol(1) eq 'sb' ? $9 : 1/0) with linespoints title 'cooling SB', "
                      "'' using 2:(-$3) with lines title '-Omega_+', '' using 2:(-$4) with lines title '-Omega_-', "
                      "'' using 2:(-$5) with lines title '-Omega_bar'\n",
                      summary);
}

void run_sideband(const ExperimentSpec& spec, const OutputDir& dir, RunSummary& summary) {
    const auto omegas = spec.axes.at("omega_m").values();
    const auto records = sideband_scan(spec.base, omegas, spec.relative_coupling, spec.g_min, spec.g_max,
                                       spec.optimizer_grid, spec.optimizer_tol, spec.workers);
    auto out = dir.open("sideband_scan.csv", summary);
    csv::Writer w(out);
    w.header({"omega_m", "case", "e_n_max", "power_at_e_n_max", "g_at_e_n_max", "n_eff_min", "power_at_n_eff_min",
              "g_at_n_eff_min", "boundary_limited", "status"});
    for (const auto& rec : records) {
        const std::pair<const char*, const std::optional<PowerOptimum>*> cases[] = {
            {"cb", &rec.common}, {"sb", &rec.separate}, {"single", &rec.single}};
        for (const auto& [name, opt] : cases) {
            w.field(rec.omega_m).field(name);
            if (*opt) {
                const PowerOptimum& o = **opt;
                w.field(o.entanglement.value).field(o.entanglement.arg).field(o.g_at_entanglement);
                w.field(o.cooling.value).field(o.cooling.arg).field(o.g_at_cooling);
                w.field(static_cast<long long>(o.cooling.boundary_limited)).field("ok");
            } else {
                for (int i = 0; i < 6; ++i) w.field(kNaN);
                w.field(0LL).field(std::string_view(rec.error.empty() ? "missing" : rec.error));
                ++summary.failed_cells;
            }
            w.end_row();
        }
    }
    summary.cells = records.size() * 3;
    write_plot_script(dir, "sideband_scan.gp",
                      "set xlabel 'omega_m'\nset ylabel 'min n_eff'\nset logscale y\n"
                      "plot 'sideband_scan.csv' using 1:(strcol(2) eq 'cb' ? $6 : 1/0) with linespoints title 'CB', "
                      "'' using 1:(strcol(2) eq 'sb' ? $6 : 1/0) with linespoints title 'SB', "
                      "'' using 1:(strcol(2) eq 'single' ? $6 : 1/0) with linespoints title 'single OM'\n",
                      summary);
}

}  // namespace

RunSummary run(const ExperimentSpec& spec) {
    spec.validate();
    const OutputDir dir(spec.out_dir);
    RunSummary summary;
    {
        nlohmann::json manifest;
        manifest["version"] = OPTOMECH_VERSION;
        manifest["config"] = nlohmann::json::parse(to_json(spec));
        manifest["defaults"] = {
            {"initial_state", spec.randomized_ic ? "randomized (seeded)" : "x1 = x2 = initial_displacement, p = 0, a = 0"},
            {"transient", spec.sync.transient > 0.0 ? spec.sync.transient : default_transient(spec.base)},
            {"fixed_point_selection", "stable root with smallest |x_st|"},
            {"csv_number_format", "scientific, 12 significant digits"},
        };
        auto out = dir.open("manifest.json", summary);
        out << manifest.dump(2) << "\n";
    }
    switch (spec.kind) {
        case ExperimentKind::Trajectory: run_trajectory(spec, dir, summary); break;
        case ExperimentKind::SyncMap: run_sync_map(spec, dir, summary); break;
        case ExperimentKind::SyncThreshold: run_sync_threshold(spec, dir, summary); break;
        case ExperimentKind::Steady: run_quantum_scan(spec, dir, summary, "none", "steady"); break;
        case ExperimentKind::DetuningScan: run_quantum_scan(spec, dir, summary, "delta0", "detuning_scan"); break;
        case ExperimentKind::PowerScan: run_quantum_scan(spec, dir, summary, "power", "power_scan"); break;
        case ExperimentKind::OptimizeDetuning: run_optimize_detuning(spec, dir, summary); break;
        case ExperimentKind::SidebandScan: run_sideband(spec, dir, summary); break;
    }
    return summary;
}

}  // namespace optomech
