#include "optomech/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "optomech/error.hpp"

namespace optomech {

namespace {

using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::ConfigError, message); }

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) config_error("'" + where + "' must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) config_error("unknown key '" + key + "' in '" + where + "'");
    }
}

double number(const json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number()) config_error("'" + where + "." + key + "' must be a number");
    return v.get<double>();
}

template <typename T>
void read_number(const json& obj, const char* key, const std::string& where, T& out) {
    if (obj.contains(key)) out = static_cast<T>(number(obj, key, where));
}

void read_bool(const json& obj, const char* key, const std::string& where, bool& out) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_boolean()) config_error("'" + where + "." + key + "' must be a boolean");
    out = obj.at(key).get<bool>();
}

std::string read_string(const json& obj, const char* key, const std::string& where) {
    if (!obj.at(key).is_string()) config_error("'" + where + "." + key + "' must be a string");
    return obj.at(key).get<std::string>();
}

void parse_system(const json& sys, SystemParams& p) {
    reject_unknown(sys,
                   {"omega_m", "omega_m1", "omega_m2", "gamma", "quality_factor", "kc", "kc_rel", "delta0", "power",
                    "n_th", "thermal_ratio", "bath"},
                   "system");
    if (sys.contains("omega_m")) p.omega_m1 = p.omega_m2 = number(sys, "omega_m", "system");
    read_number(sys, "omega_m1", "system", p.omega_m1);
    read_number(sys, "omega_m2", "system", p.omega_m2);
    read_number(sys, "gamma", "system", p.damping);
    if (sys.contains("quality_factor")) {
        if (sys.contains("gamma")) config_error("give either system.gamma or system.quality_factor");
        p.damping = p.omega_m1 / number(sys, "quality_factor", "system");
    }
    read_number(sys, "kc", "system", p.coupling);
    if (sys.contains("kc_rel")) {
        if (sys.contains("kc")) config_error("give either system.kc or system.kc_rel");
        p.coupling = number(sys, "kc_rel", "system") * p.omega_m1 * p.omega_m1;
    }
    read_number(sys, "delta0", "system", p.detuning);
    read_number(sys, "power", "system", p.power);
    read_number(sys, "n_th", "system", p.n_th);
    if (sys.contains("thermal_ratio")) {
        if (sys.contains("n_th")) config_error("give either system.n_th or system.thermal_ratio");
        p.n_th = thermal_occupancy(number(sys, "thermal_ratio", "system"));
    }
    if (sys.contains("bath")) p.bath = parse_bath(read_string(sys, "bath", "system"));
}

Axis parse_axis(const json& a, const std::string& where) {
    reject_unknown(a, {"lo", "hi", "count", "log"}, where);
    Axis axis;
    if (!a.contains("lo") || !a.contains("hi") || !a.contains("count")) {
        config_error("'" + where + "' needs lo, hi and count");
    }
    axis.lo = number(a, "lo", where);
    axis.hi = number(a, "hi", where);
    const double count = number(a, "count", where);
    if (count < 1 || count != std::floor(count)) config_error("'" + where + ".count' must be a positive integer");
    axis.count = static_cast<std::size_t>(count);
    read_bool(a, "log", where, axis.log_spaced);
    return axis;
}

void parse_experiment(const json& e, ExperimentSpec& spec) {
    reject_unknown(e,
                   {"kind", "out", "workers", "seed", "randomized_ic", "both_baths", "axes", "trajectory", "sync",
                    "sideband", "optimizer"},
                   "experiment");
    if (e.contains("kind")) spec.kind = parse_experiment_kind(read_string(e, "kind", "experiment"));
    if (e.contains("out")) spec.out_dir = read_string(e, "out", "experiment");
    read_number(e, "workers", "experiment", spec.workers);
    read_number(e, "seed", "experiment", spec.seed);
    read_bool(e, "randomized_ic", "experiment", spec.randomized_ic);
    read_bool(e, "both_baths", "experiment", spec.both_baths);

    if (e.contains("axes")) {
        const auto& axes = e.at("axes");
        reject_unknown(axes, {"frequency_detuning", "coupling", "kc_rel", "delta0", "power", "omega_m", "gamma"},
                       "experiment.axes");
        for (const auto& [name, a] : axes.items()) spec.axes[name] = parse_axis(a, "experiment.axes." + name);
    }
    if (e.contains("trajectory")) {
        const auto& t = e.at("trajectory");
        reject_unknown(t, {"t_end", "dt_sample", "record_from"}, "experiment.trajectory");
        read_number(t, "t_end", "experiment.trajectory", spec.t_end);
        read_number(t, "dt_sample", "experiment.trajectory", spec.dt_sample);
        read_number(t, "record_from", "experiment.trajectory", spec.record_from);
    }
    if (e.contains("sync")) {
        const auto& s = e.at("sync");
        const std::string w = "experiment.sync";
        reject_unknown(s,
                       {"transient", "dt_sample", "initial_displacement", "window", "window_periods", "n_delays",
                        "threshold", "frequency_detuning", "rel_tol", "abs_tol"},
                       w);
        read_number(s, "transient", w, spec.sync.transient);
        read_number(s, "dt_sample", w, spec.sync.dt_sample);
        read_number(s, "initial_displacement", w, spec.sync.initial_displacement);
        read_number(s, "window", w, spec.sync.scan.window);
        read_number(s, "window_periods", w, spec.sync.scan.window_periods);
        read_number(s, "n_delays", w, spec.sync.scan.n_delays);
        read_number(s, "threshold", w, spec.sync.scan.threshold);
        read_number(s, "frequency_detuning", w, spec.threshold_detuning);
        read_number(s, "rel_tol", w, spec.sync.integrator.rel_tol);
        read_number(s, "abs_tol", w, spec.sync.integrator.abs_tol);
    }
    if (e.contains("sideband")) {
        const auto& s = e.at("sideband");
        reject_unknown(s, {"relative_coupling", "g_min", "g_max"}, "experiment.sideband");
        read_number(s, "relative_coupling", "experiment.sideband", spec.relative_coupling);
        read_number(s, "g_min", "experiment.sideband", spec.g_min);
        read_number(s, "g_max", "experiment.sideband", spec.g_max);
    }
    if (e.contains("optimizer")) {
        const auto& o = e.at("optimizer");
        reject_unknown(o, {"grid", "tol"}, "experiment.optimizer");
        read_number(o, "grid", "experiment.optimizer", spec.optimizer_grid);
        read_number(o, "tol", "experiment.optimizer", spec.optimizer_tol);
    }
}

}  // namespace

ExperimentSpec parse_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::exception& e) {
        config_error(std::string("malformed JSON: ") + e.what());
    }
    ExperimentSpec spec;
    try {
        reject_unknown(doc, {"system", "experiment"}, "<root>");
        if (doc.contains("system")) parse_system(doc.at("system"), spec.base);
        if (doc.contains("experiment")) parse_experiment(doc.at("experiment"), spec);
    } catch (const json::exception& e) {
        config_error(e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        config_error(e.what());
    }
    return spec;
}

ExperimentSpec load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void apply_overrides(ExperimentSpec& spec, const ParamOverrides& o) {
    SystemParams& p = spec.base;
    if (o.omega_m) p.omega_m1 = p.omega_m2 = *o.omega_m;
    if (o.gamma) p.damping = *o.gamma;
    if (o.kc) p.coupling = *o.kc;
    if (o.delta0) p.detuning = *o.delta0;
    if (o.power) p.power = *o.power;
    if (o.n_th) p.n_th = *o.n_th;
    if (o.bath) {
        p.bath = *o.bath;
        spec.both_baths = false;
    }
}

std::string to_json(const ExperimentSpec& spec) {
    const SystemParams& p = spec.base;
    json sys = {{"omega_m1", p.omega_m1}, {"omega_m2", p.omega_m2}, {"gamma", p.damping},
                {"kc", p.coupling},       {"delta0", p.detuning},   {"power", p.power},
                {"n_th", p.n_th},         {"bath", std::string(to_string(p.bath))}};
    json axes = json::object();
    for (const auto& [name, a] : spec.axes) {
        axes[name] = {{"lo", a.lo}, {"hi", a.hi}, {"count", a.count}, {"log", a.log_spaced}};
    }
    json exp = {
        {"kind", std::string(to_string(spec.kind))},
        {"out", spec.out_dir.string()},
        {"workers", spec.workers},
        {"seed", spec.seed},
        {"randomized_ic", spec.randomized_ic},
        {"both_baths", spec.both_baths},
        {"axes", axes},
        {"trajectory", {{"t_end", spec.t_end}, {"dt_sample", spec.dt_sample}, {"record_from", spec.record_from}}},
        {"sync",
         {{"transient", spec.sync.transient > 0.0 ? spec.sync.transient : default_transient(p)},
          {"dt_sample", spec.sync.dt_sample},
          {"initial_displacement", spec.sync.initial_displacement},
          {"window", spec.sync.scan.window},
          {"window_periods", spec.sync.scan.window_periods},
          {"n_delays", spec.sync.scan.n_delays},
          {"threshold", spec.sync.scan.threshold},
          {"frequency_detuning", spec.threshold_detuning},
          {"rel_tol", spec.sync.integrator.rel_tol},
          {"abs_tol", spec.sync.integrator.abs_tol}}},
        {"sideband", {{"relative_coupling", spec.relative_coupling}, {"g_min", spec.g_min}, {"g_max", spec.g_max}}},
        {"optimizer", {{"grid", spec.optimizer_grid}, {"tol", spec.optimizer_tol}}},
    };
    return json{{"system", sys}, {"experiment", exp}}.dump(2);
}

}  // namespace optomech
