#include "sers/scenario.hpp"

#include "sers/parallel.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace sers {

using nlohmann::json;

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

const json& require_type(const json& j, json::value_t type, const std::string& name) {
    const bool ok = type == json::value_t::number_float ? j.is_number() : j.type() == type;
    if (!ok) throw ConfigError("config: field '" + name + "' has the wrong type");
    return j;
}

double number(const json& j, const std::string& name) {
    if (!j.is_number()) throw ConfigError("config: field '" + name + "' must be numeric");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError("config: field '" + name + "' must be finite");
    return v;
}

PeakKind line_from_string(const std::string& s) {
    if (s == "stokes") return PeakKind::stokes;
    if (s == "antistokes") return PeakKind::anti_stokes;
    throw ConfigError("config: line must be 'stokes' or 'antistokes'");
}

std::vector<ModelKind> default_models(Task t) {
    switch (t) {
        case Task::spectrum: return {ModelKind::om};
        case Task::csi_map: return {ModelKind::om_res};
        case Task::ratio_map:
        case Task::thermal_sweep: return {ModelKind::om, ModelKind::res, ModelKind::om_res};
        case Task::analytic: return {ModelKind::om_res};
    }
    return {};
}

Operator vibron_number(const LindbladModel& m) {
    const auto& spec = m.space->at(labels::vibron);
    const Operator v = m.local(labels::vibron, destroy(spec.dim));
    return v.adjoint() * v;
}

double vibron_population(const LindbladModel& m, const DensityMatrix& rho) {
    return expectation(vibron_number(m), rho).real();
}

LindbladModel model_for(const ScenarioConfig& c, ModelKind kind, const ModelParams& p) {
    return build_model(kind, p, c.g_om, c.delta_c_prime);
}

json error_record(const std::string& context, const std::exception& e) {
    std::string type = "Error";
    if (dynamic_cast<const SingularShiftError*>(&e)) type = "SingularShiftError";
    else if (dynamic_cast<const SolverError*>(&e)) type = "SolverError";
    else if (dynamic_cast<const UndefinedCorrelationError*>(&e)) type = "UndefinedCorrelationError";
    else if (dynamic_cast<const IntegratorError*>(&e)) type = "IntegratorError";
    else if (dynamic_cast<const ParameterError*>(&e)) type = "ParameterError";
    else if (dynamic_cast<const ConfigError*>(&e)) type = "ConfigError";
    else if (dynamic_cast<const DimensionError*>(&e)) type = "DimensionError";
    else if (dynamic_cast<const IoError*>(&e)) type = "IoError";
    return json{{"context", context}, {"type", type}, {"message", e.what()}};
}

// Resolved config without the execution-only fields, so sidecars stay
// byte-identical across worker counts and output prefixes.
json recorded_config(const ScenarioConfig& c) {
    json j = to_json(c);
    j.erase("workers");
    j.erase("out");
    return j;
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

std::string cell_label(const std::string& xn, double x, const std::string& yn, double y) {
    return xn + "=" + format_number(x) + " " + yn + "=" + format_number(y);
}

void add_map_errors(RunReport& r, const RatioMap& m, const std::string& what) {
    for (std::size_t ix = 0; ix < m.x_axis.size(); ++ix) {
        for (std::size_t iy = 0; iy < m.y_axis.size(); ++iy) {
            const std::size_t k = m.index(ix, iy);
            if (m.valid[k] || m.errors[k].empty()) continue;
            r.errors.push_back({{"context", what + " " + cell_label(m.x_name, m.x_axis[ix], m.y_name, m.y_axis[iy])},
                                {"type", "CellError"},
                                {"message", m.errors[k]}});
        }
    }
}

}  // namespace

// ---------------------------------------------------------------- Axis

Axis Axis::range(double lo, double hi, std::size_t n) {
    Axis a;
    a.from_range = true;
    a.min = lo;
    a.max = hi;
    a.count = n;
    try {
        a.values = linear_grid(lo, hi, n);
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return a;
}

Axis Axis::list(std::vector<double> v) {
    if (v.empty()) throw ConfigError("config: empty axis");
    Axis a;
    a.values = std::move(v);
    return a;
}

Axis Axis::from_json(const json& j, const std::string& name) {
    if (j.is_array()) {
        std::vector<double> v;
        for (const auto& e : j) v.push_back(number(e, name + "[]"));
        if (v.empty()) throw ConfigError("config: axis '" + name + "' is empty");
        for (std::size_t k = 1; k < v.size(); ++k) {
            if (!(v[k] > v[k - 1])) throw ConfigError("config: axis '" + name + "' must be strictly increasing");
        }
        return list(std::move(v));
    }
    if (!j.is_object()) throw ConfigError("config: axis '" + name + "' must be an array or {min, max, count}");
    for (const auto& [key, _] : j.items()) {
        if (key != "min" && key != "max" && key != "count") {
            throw ConfigError("config: axis '" + name + "' has unknown field '" + key + "'");
        }
    }
    if (!j.contains("min") || !j.contains("max") || !j.contains("count")) {
        throw ConfigError("config: axis '" + name + "' needs min, max and count");
    }
    if (!j["count"].is_number_integer() || j["count"].get<long long>() < 1) {
        throw ConfigError("config: axis '" + name + "' count must be a positive integer (grid is empty)");
    }
    return range(number(j["min"], name + ".min"), number(j["max"], name + ".max"),
                 static_cast<std::size_t>(j["count"].get<long long>()));
}

json Axis::to_json() const {
    if (from_range) return json{{"min", min}, {"max", max}, {"count", count}};
    return json(values);
}

// ---------------------------------------------------------------- config

std::string to_string(Task task) {
    switch (task) {
        case Task::spectrum: return "spectrum";
        case Task::ratio_map: return "ratio-map";
        case Task::csi_map: return "csi-map";
        case Task::analytic: return "analytic";
        case Task::thermal_sweep: return "thermal-sweep";
    }
    return "unknown";
}

Task task_from_string(const std::string& name) {
    for (Task t : {Task::spectrum, Task::ratio_map, Task::csi_map, Task::analytic, Task::thermal_sweep}) {
        if (to_string(t) == name) return t;
    }
    throw ConfigError("config: unknown task '" + name + "'");
}

ScenarioConfig resolve_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    static const std::set<std::string> known = {"task",   "model",     "params",        "g_om",   "delta_c_prime",
                                                "line",   "grid",      "x_axis",        "y_axis", "omega_axis",
                                                "T_axis", "sensor",    "n_v",           "out",    "workers",
                                                "check_truncation", "derived"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw ConfigError("config: unknown field '" + key + "'");
    }

    ScenarioConfig c;
    if (j.contains("task")) c.task = task_from_string(require_type(j["task"], json::value_t::string, "task").get<std::string>());
    c.params = params_from_json(j.value("params", json::object()));

    c.models = default_models(c.task);
    if (j.contains("model") && !j["model"].is_null()) {
        std::vector<ModelKind> req;
        if (j["model"].is_string()) {
            req.push_back(model_kind_from_string(j["model"].get<std::string>()));
        } else if (j["model"].is_array()) {
            for (const auto& e : j["model"]) {
                req.push_back(model_kind_from_string(require_type(e, json::value_t::string, "model[]").get<std::string>()));
            }
        } else {
            throw ConfigError("config: model must be a string or an array of strings");
        }
        if (req.empty()) throw ConfigError("config: model list is empty");
        if (c.task == Task::ratio_map || c.task == Task::thermal_sweep) {
            if (req != c.models) {
                throw ConfigError("config: " + to_string(c.task) + " always compares the om, res and om_res models");
            }
        }
        if (c.task == Task::csi_map || c.task == Task::analytic) {
            for (auto k : req) {
                if (k == ModelKind::bright) throw ConfigError("config: the bright model is not available for this task");
            }
        }
        c.models = req;
    }

    EliminatedParams derived;
    try {
        derived = eliminate_off_resonant(c.params);
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.g_om = derived.g_om;
    c.delta_c_prime = derived.delta_c_prime;
    if (j.contains("g_om") && !j["g_om"].is_null()) {
        c.g_om = number(j["g_om"], "g_om");
        c.g_om_derived = false;
    }
    if (j.contains("delta_c_prime") && !j["delta_c_prime"].is_null()) {
        c.delta_c_prime = number(j["delta_c_prime"], "delta_c_prime");
        c.delta_c_prime_derived = false;
    }
    if (j.contains("line")) c.line = line_from_string(require_type(j["line"], json::value_t::string, "line").get<std::string>());

    if (j.contains("grid") && !j["grid"].is_null()) c.grid = Axis::from_json(j["grid"], "grid");
    if (c.grid) {
        for (std::size_t k = 1; k < c.grid->values.size(); ++k) {
            if (!(c.grid->values[k] > c.grid->values[k - 1])) throw ConfigError("config: grid must be strictly increasing");
        }
    }
    c.x_axis = j.contains("x_axis") ? Axis::from_json(j["x_axis"], "x_axis") : Axis::range(235.0, 285.0, 11);
    c.y_axis = j.contains("y_axis") ? Axis::from_json(j["y_axis"], "y_axis") : Axis::range(254.0, 294.0, 11);
    c.omega_axis = j.contains("omega_axis") ? Axis::from_json(j["omega_axis"], "omega_axis")
                                            : Axis::list({1.0, 2.0, 4.0, 8.0, 16.0});
    c.T_axis = j.contains("T_axis") ? Axis::from_json(j["T_axis"], "T_axis")
                                    : Axis::list({0.0, 75.0, 150.0, 225.0, 300.0});
    for (double v : c.omega_axis.values) {
        if (v < 0.0) throw ConfigError("config: omega_axis values must be non-negative");
    }
    for (double v : c.T_axis.values) {
        if (v < 0.0) throw ConfigError("config: T_axis values must be non-negative");
    }

    c.sensor_Gamma = c.params.kappa_v;
    if (j.contains("sensor")) {
        const json& s = require_type(j["sensor"], json::value_t::object, "sensor");
        for (const auto& [key, _] : s.items()) {
            if (key != "Gamma" && key != "epsilon_ratio") throw ConfigError("config: sensor has unknown field '" + key + "'");
        }
        if (s.contains("Gamma") && !s["Gamma"].is_null()) c.sensor_Gamma = number(s["Gamma"], "sensor.Gamma");
        if (s.contains("epsilon_ratio")) c.sensor_epsilon_ratio = number(s["epsilon_ratio"], "sensor.epsilon_ratio");
    }
    try {
        SensorConfig probe{0.0, 0.0, c.sensor_Gamma, c.sensor_Gamma * c.sensor_epsilon_ratio};
        probe.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!(c.sensor_epsilon_ratio > 0.0)) throw ConfigError("config: sensor.epsilon_ratio must be positive");

    if (j.contains("n_v") && !j["n_v"].is_null()) {
        c.n_v = number(j["n_v"], "n_v");
        if (*c.n_v < 0.0) throw ConfigError("config: n_v must be non-negative");
    }
    if (j.contains("check_truncation")) {
        c.check_truncation = require_type(j["check_truncation"], json::value_t::boolean, "check_truncation").get<bool>();
    }
    if (j.contains("workers")) {
        if (!j["workers"].is_number_integer() || j["workers"].get<long long>() < 1) {
            throw ConfigError("config: workers must be a positive integer");
        }
        c.workers = static_cast<int>(j["workers"].get<long long>());
    }
    if (j.contains("out")) {
        c.out = require_type(j["out"], json::value_t::string, "out").get<std::string>();
        if (c.out.empty()) throw ConfigError("config: out must not be empty");
    }
    return c;
}

json to_json(const ScenarioConfig& c) {
    json models = json::array();
    for (auto k : c.models) models.push_back(to_string(k));
    json j{{"task", to_string(c.task)},
           {"model", models},
           {"params", params_to_json(c.params)},
           {"g_om", c.g_om},
           {"delta_c_prime", c.delta_c_prime},
           {"line", c.line == PeakKind::stokes ? "stokes" : "antistokes"},
           {"grid", c.grid ? c.grid->to_json() : json(nullptr)},
           {"x_axis", c.x_axis.to_json()},
           {"y_axis", c.y_axis.to_json()},
           {"omega_axis", c.omega_axis.to_json()},
           {"T_axis", c.T_axis.to_json()},
           {"sensor", {{"Gamma", c.sensor_Gamma}, {"epsilon_ratio", c.sensor_epsilon_ratio}}},
           {"n_v", c.n_v ? json(*c.n_v) : json(nullptr)},
           {"check_truncation", c.check_truncation},
           {"workers", c.workers},
           {"out", c.out},
           {"derived", {{"g_om", c.g_om_derived}, {"delta_c_prime", c.delta_c_prime_derived}}}};
    return j;
}

std::string config_hash(const ScenarioConfig& c) {
    json j = to_json(c);
    j.erase("workers");
    j.erase("out");
    j.erase("derived");
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json RunReport::to_json() const {
    return json{{"task", task}, {"config_hash", config_hash}, {"files", files}, {"errors", errors}, {"summary", summary}};
}

// ---------------------------------------------------------------- writers

std::string format_number(double x) {
    if (std::isnan(x)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    return f;
}

void finish(std::ofstream& f, const std::string& path) {
    f.flush();
    if (!f) throw IoError("write to '" + path + "' failed");
}

}  // namespace

void write_spectrum_csv(const std::string& path, const Spectrum& s, const std::string& hash) {
    auto f = open_out(path);
    f << "# config_hash=" << hash << "\n";
    f << "omega_THz,S\n";
    for (std::size_t k = 0; k < s.omega.size(); ++k) f << format_number(s.omega[k]) << ',' << format_number(s.values[k]) << '\n';
    finish(f, path);
}

void write_ratio_map_csv(const std::string& path, const RatioMap& m, const std::string& hash, bool converged_column) {
    auto f = open_out(path);
    f << "# config_hash=" << hash << "\n";
    f << m.x_name << ',' << m.y_name << ',' << m.value_name << ',' << (converged_column ? "converged" : "valid") << '\n';
    for (std::size_t ix = 0; ix < m.x_axis.size(); ++ix) {
        for (std::size_t iy = 0; iy < m.y_axis.size(); ++iy) {
            const std::size_t k = m.index(ix, iy);
            const bool flag = converged_column ? (m.valid[k] && m.converged[k]) : m.valid[k];
            f << format_number(m.x_axis[ix]) << ',' << format_number(m.y_axis[iy]) << ','
              << (m.valid[k] ? format_number(m.values[k]) : std::string()) << ',' << (flag ? 1 : 0) << '\n';
        }
    }
    finish(f, path);
}

void write_json(const std::string& path, const json& j) {
    auto f = open_out(path);
    f << j.dump(2) << '\n';
    finish(f, path);
}

// ---------------------------------------------------------------- spectrum

RunReport run_spectrum(const ScenarioConfig& c) {
    RunReport r;
    r.task = to_string(c.task);
    r.config_hash = config_hash(c);
    const ModelParams& p = c.params;
    const std::vector<double> grid = c.grid ? c.grid->values : default_grid(p.omega_L, p.omega_v, p.kappa_v);
    const double line_omega = c.line == PeakKind::stokes ? p.omega_L - p.omega_v : p.omega_L + p.omega_v;

    for (ModelKind kind : c.models) {
        const std::string tag = to_string(kind);
        try {
            const LindbladModel m = model_for(c, kind, p);
            SteadyStateReport ss;
            const DensityMatrix rho = steady_state(m, {}, &ss);
            Spectrum s = emission_spectrum(m, rho, grid, c.workers);
            s.params_hash = r.config_hash;

            json peaks = json::array();
            for (const auto& pk : s.peaks) {
                peaks.push_back({{"kind", to_string(pk.kind)},
                                 {"omega_center", pk.omega_center},
                                 {"height", pk.height},
                                 {"method", to_string(pk.method)}});
            }
            double line_value = nan_value;
            for (const auto& pk : s.peaks) {
                if (pk.method == PeakMethod::resolvent_point && pk.kind == c.line) line_value = pk.height;
            }

            json trunc{{"checked", false}, {"observable", c.line == PeakKind::stokes ? "stokes_peak" : "antistokes_peak"}};
            if (c.check_truncation) {
                const ModelParams raised = with_raised_truncations(p);
                const LindbladModel m2 = model_for(c, kind, raised);
                const std::size_t d2 = m2.space->dimension();
                // Raised bright-mode spaces exceed what a direct solve handles here.
                if (d2 * d2 <= 40000) {
                    const DensityMatrix rho2 = steady_state(m2);
                    EmissionSolver es2(m2, rho2);
                    const double v2 = es2.density(line_omega);
                    const double change = std::abs(v2 - line_value) / std::max(std::abs(line_value), 1e-300);
                    trunc["checked"] = true;
                    trunc["raised_value"] = v2;
                    trunc["relative_change"] = change;
                    trunc["converged"] = change < 0.01;
                } else {
                    trunc["converged"] = nullptr;
                    trunc["reason"] = "raised space too large for a direct solve";
                }
            }

            const Operator a = m.cavity_annihilator();
            json side{{"config_hash", r.config_hash},
                      {"model", tag},
                      {"dimension", m.space->dimension()},
                      {"rayleigh_weight", s.rayleigh_weight},
                      {"cavity_population", s.cavity_population},
                      {"cavity_amplitude", cplx_json(expectation(a, rho))},
                      {"vibron_population", vibron_population(m, rho)},
                      {"line_value", line_value},
                      {"integrated_spectrum", integrate_spectrum(s)},
                      {"peaks", peaks},
                      {"steady_state",
                       {{"residual", ss.residual},
                        {"second_eigenvalue", ss.second_eigenvalue},
                        {"trace_error", std::abs(rho.trace() - 1.0)},
                        {"min_eigenvalue", rho.min_eigenvalue()}}},
                      {"truncation", trunc}};
            if (kind != ModelKind::bright) {
                side["g_om"] = c.g_om;
                side["delta_c_prime"] = c.delta_c_prime;
            }
            const std::string base = c.out + "_spectrum_" + tag;
            write_spectrum_csv(base + ".csv", s, r.config_hash);
            write_json(base + ".json", side);
            r.files.push_back(base + ".csv");
            r.files.push_back(base + ".json");
            r.summary[tag] = {{"line_value", line_value},
                              {"vibron_population", side["vibron_population"]},
                              {"cavity_population", s.cavity_population}};
        } catch (const Error& e) {
            r.errors.push_back(error_record("model " + tag, e));
        }
    }
    return r;
}

// ---------------------------------------------------------------- ratio maps

MapAgreement compare_maps(const RatioMap& a, const RatioMap& b) {
    if (a.size() != b.size()) throw DimensionError("compare_maps: shape mismatch");
    MapAgreement m;
    std::size_t sign = 0, decade = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!a.valid[k] || !b.valid[k]) continue;
        ++m.compared;
        if ((a.values[k] >= 0.0) == (b.values[k] >= 0.0)) ++sign;
        if (std::abs(a.values[k] - b.values[k]) <= 1.0) ++decade;
    }
    if (m.compared > 0) {
        m.sign_fraction = static_cast<double>(sign) / static_cast<double>(m.compared);
        m.decade_fraction = static_cast<double>(decade) / static_cast<double>(m.compared);
    }
    return m;
}

namespace {

struct LineProbe {
    double peak{0.0};
    double n_v{0.0};
};

LineProbe probe_line(const LindbladModel& m, double omega) {
    const DensityMatrix rho = steady_state(m);
    EmissionSolver es(m, rho);
    return {es.density(omega), vibron_population(m, rho)};
}

double log_ratio(double num, double den) {
    if (!(num > 0.0) || !(den > 0.0) || !std::isfinite(num) || !std::isfinite(den)) return nan_value;
    return std::log10(num / den);
}

}  // namespace

RatioMapSet compute_ratio_maps(const ScenarioConfig& c) {
    const auto& xs = c.x_axis.values;
    const auto& ys = c.y_axis.values;
    RatioMapSet set{RatioMap(xs, ys), RatioMap(xs, ys), RatioMap(xs, ys),
                    RatioMap(xs, ys), RatioMap(xs, ys), RatioMap(xs, ys)};
    const std::size_t ny = ys.size();
    const std::size_t n = xs.size() * ny;
    const double omega = c.line == PeakKind::stokes ? c.params.omega_L - c.params.omega_v
                                                     : c.params.omega_L + c.params.omega_v;

    struct Cell {
        double v[6] = {nan_value, nan_value, nan_value, nan_value, nan_value, nan_value};
        std::string error;
    };
    std::vector<Cell> cells(n);
    parallel_for(n, c.workers, [&](std::size_t k) {
        Cell& cell = cells[k];
        try {
            ModelParams q = c.params;
            q.omega_r = ys[k % ny];
            const double dcp = xs[k / ny] - q.omega_L;
            const LineProbe om = probe_line(build_H_om(q, c.g_om, dcp), omega);
            const LineProbe res = probe_line(build_H_res(q, dcp), omega);
            const LineProbe tot = probe_line(build_H_om_res(q, c.g_om, dcp), omega);

            ModelParams q_om = q;
            q_om.g_r = 0.0;
            q_om.g0_r = 0.0;
            const RamanCoefficients ct = raman_coefficients(q, c.g_om, dcp);
            const RamanCoefficients co = raman_coefficients(q_om, c.g_om, dcp);
            const RamanCoefficients cr = raman_coefficients(q, 0.0, dcp);
            const double gv = q.kappa_v;
            const double th_t = theoretical_peak(ct, c.line, tot.n_v, gv);
            cell.v[0] = log_ratio(tot.peak, om.peak);
            cell.v[1] = log_ratio(tot.peak, res.peak);
            cell.v[2] = log_ratio(th_t, theoretical_peak(co, c.line, om.n_v, gv));
            cell.v[3] = log_ratio(th_t, theoretical_peak(cr, c.line, res.n_v, gv));
            cell.v[4] = log_ratio(tot.n_v, om.n_v);
            cell.v[5] = log_ratio(tot.n_v, res.n_v);
        } catch (const Error& e) {
            cell.error = e.what();
        }
    });

    RatioMap* maps[6] = {&set.numeric_vs_om,   &set.numeric_vs_res, &set.analytic_vs_om,
                         &set.analytic_vs_res, &set.vibron_vs_om,   &set.vibron_vs_res};
    for (std::size_t k = 0; k < n; ++k) {
        for (int m = 0; m < 6; ++m) {
            const double v = cells[k].v[m];
            if (cells[k].error.empty() && std::isfinite(v)) {
                maps[m]->set(k / ny, k % ny, v);
            } else {
                maps[m]->mask(k / ny, k % ny, cells[k].error.empty() ? "non-positive or non-finite ratio" : cells[k].error);
            }
        }
    }
    return set;
}

RunReport run_ratio_map(const ScenarioConfig& c) {
    RunReport r;
    r.task = to_string(c.task);
    r.config_hash = config_hash(c);
    const RatioMapSet set = compute_ratio_maps(c);
    const std::string line = c.line == PeakKind::stokes ? "stokes" : "antistokes";
    const std::pair<const RatioMap*, std::string> outputs[] = {
        {&set.numeric_vs_om, "ratio_" + line + "_numeric_vs_om"},
        {&set.numeric_vs_res, "ratio_" + line + "_numeric_vs_res"},
        {&set.analytic_vs_om, "ratio_" + line + "_analytic_vs_om"},
        {&set.analytic_vs_res, "ratio_" + line + "_analytic_vs_res"},
        {&set.vibron_vs_om, "vibron_ratio_vs_om"},
        {&set.vibron_vs_res, "vibron_ratio_vs_res"}};
    json masked = json::object();
    for (const auto& [map, name] : outputs) {
        const std::string path = c.out + "_" + name + ".csv";
        write_ratio_map_csv(path, *map, r.config_hash, false);
        r.files.push_back(path);
        masked[name] = map->masked_count();
    }
    add_map_errors(r, set.numeric_vs_om, "ratio-map cell");

    const MapAgreement a_om = compare_maps(set.numeric_vs_om, set.analytic_vs_om);
    const MapAgreement a_res = compare_maps(set.numeric_vs_res, set.analytic_vs_res);
    double max_numeric = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < set.numeric_vs_om.size(); ++k) {
        if (set.numeric_vs_om.valid[k]) max_numeric = std::max(max_numeric, set.numeric_vs_om.values[k]);
    }
    r.summary = {{"line", line},
                 {"masked", masked},
                 {"agreement_vs_om", {{"compared", a_om.compared}, {"sign", a_om.sign_fraction}, {"decade", a_om.decade_fraction}}},
                 {"agreement_vs_res",
                  {{"compared", a_res.compared}, {"sign", a_res.sign_fraction}, {"decade", a_res.decade_fraction}}},
                 {"max_numeric_vs_om", std::isfinite(max_numeric) ? json(max_numeric) : json(nullptr)}};
    const std::string side = c.out + "_ratio_map.json";
    write_json(side, {{"config_hash", r.config_hash}, {"config", recorded_config(c)}, {"summary", r.summary}});
    r.files.push_back(side);
    return r;
}

// ---------------------------------------------------------------- CSI maps

RunReport run_csi_map(const ScenarioConfig& c) {
    RunReport r;
    r.task = to_string(c.task);
    r.config_hash = config_hash(c);
    json masked = json::object();
    for (ModelKind kind : c.models) {
        const std::string tag = to_string(kind);
        CsiMapSpec spec;
        spec.kind = kind;
        spec.g_om = c.g_om;
        spec.Gamma = c.sensor_Gamma;
        spec.epsilon_ratio = c.sensor_epsilon_ratio;
        spec.omega_c_prime = c.x_axis.values;
        spec.omega_r = c.y_axis.values;
        spec.workers = c.workers;
        const RatioMap map = csi_map(c.params, spec);
        const std::string path = c.out + "_csi_" + tag + ".csv";
        write_ratio_map_csv(path, map, r.config_hash, true);
        r.files.push_back(path);
        add_map_errors(r, map, "csi-map " + tag + " cell");
        std::size_t conv = 0;
        double max_log = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < map.size(); ++k) {
            if (!map.valid[k]) continue;
            conv += map.converged[k] ? 1 : 0;
            max_log = std::max(max_log, map.values[k]);
        }
        masked[tag] = map.masked_count();
        r.summary[tag] = {{"masked", map.masked_count()},
                          {"converged", conv},
                          {"max_log10R", std::isfinite(max_log) ? json(max_log) : json(nullptr)}};
    }
    const std::string side = c.out + "_csi.json";
    write_json(side, {{"config_hash", r.config_hash},
                      {"config", recorded_config(c)},
                      {"sensor", {{"Gamma", c.sensor_Gamma}, {"epsilon", c.sensor_Gamma * c.sensor_epsilon_ratio}}},
                      {"summary", r.summary}});
    r.files.push_back(side);
    return r;
}

// ---------------------------------------------------------------- thermal sweep

ThermalSweep compute_thermal_sweep(const ScenarioConfig& c) {
    const auto& omegas = c.omega_axis.values;
    const auto& temps = c.T_axis.values;
    ThermalSweep out;
    out.ratio = RatioMap(omegas, temps);
    out.ratio.x_name = "Omega_THz";
    out.ratio.y_name = "T_K";
    out.n_f.assign(omegas.size(), nan_value);
    out.T_E.assign(omegas.size(), nan_value);
    const double omega = c.params.omega_L + c.params.omega_v;
    const std::size_t nT = temps.size();
    const std::size_t nO = omegas.size();

    // Jobs: one per (Omega, T) cell, then one n_f solve per Omega.
    struct Job {
        double value{nan_value};
        std::string error;
    };
    std::vector<Job> jobs(nO * nT + nO);
    parallel_for(jobs.size(), c.workers, [&](std::size_t k) {
        Job& job = jobs[k];
        try {
            ModelParams q = c.params;
            if (k < nO * nT) {
                q.Omega = omegas[k / nT];
                q.T = temps[k % nT];
                const LineProbe tot = probe_line(build_H_om_res(q, c.g_om, c.delta_c_prime), omega);
                const LineProbe res = probe_line(build_H_res(q, c.delta_c_prime), omega);
                job.value = log_ratio(tot.peak, res.peak);
                if (!std::isfinite(job.value)) job.error = "non-positive or non-finite ratio";
            } else {
                q.Omega = omegas[k - nO * nT];
                q.T = 0.0;
                const LindbladModel m = build_H_om(q, c.g_om, c.delta_c_prime);
                job.value = vibron_population(m, steady_state(m));
            }
        } catch (const Error& e) {
            job.error = e.what();
        }
    });
    for (std::size_t k = 0; k < nO * nT; ++k) {
        if (jobs[k].error.empty()) out.ratio.set(k / nT, k % nT, jobs[k].value);
        else out.ratio.mask(k / nT, k % nT, jobs[k].error);
    }
    for (std::size_t i = 0; i < nO; ++i) {
        const Job& job = jobs[nO * nT + i];
        if (!job.error.empty()) continue;
        out.n_f[i] = job.value;
        if (job.value > 0.0) out.T_E[i] = equalization_temperature(c.params.omega_v, job.value);
    }
    return out;
}

RunReport run_thermal_sweep(const ScenarioConfig& c) {
    RunReport r;
    r.task = to_string(c.task);
    r.config_hash = config_hash(c);
    const ThermalSweep sweep = compute_thermal_sweep(c);
    const std::string map_path = c.out + "_thermal.csv";
    write_ratio_map_csv(map_path, sweep.ratio, r.config_hash, false);
    r.files.push_back(map_path);
    add_map_errors(r, sweep.ratio, "thermal-sweep cell");

    const std::string te_path = c.out + "_thermal_TE.csv";
    {
        std::ofstream f(te_path, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open '" + te_path + "' for writing");
        f << "# config_hash=" << r.config_hash << "\n";
        f << "Omega_THz,n_f,T_E_K\n";
        for (std::size_t i = 0; i < sweep.n_f.size(); ++i) {
            f << format_number(c.omega_axis.values[i]) << ',' << format_number(sweep.n_f[i]) << ','
              << format_number(sweep.T_E[i]) << '\n';
        }
        if (!f) throw IoError("write to '" + te_path + "' failed");
    }
    r.files.push_back(te_path);
    for (std::size_t i = 0; i < sweep.n_f.size(); ++i) {
        if (!std::isfinite(sweep.T_E[i])) {
            r.errors.push_back({{"context", "equalization temperature Omega=" + format_number(c.omega_axis.values[i])},
                                {"type", "CellError"},
                                {"message", "n_f unavailable or not positive"}});
        }
    }
    r.summary = {{"masked", sweep.ratio.masked_count()}, {"T_E", sweep.T_E}, {"n_f", sweep.n_f}};
    const std::string side = c.out + "_thermal.json";
    write_json(side, {{"config_hash", r.config_hash}, {"config", recorded_config(c)}, {"summary", r.summary}});
    r.files.push_back(side);
    return r;
}

// ---------------------------------------------------------------- analytic

RunReport run_analytic(const ScenarioConfig& c) {
    RunReport r;
    r.task = to_string(c.task);
    r.config_hash = config_hash(c);
    const ModelParams& p = c.params;
    json table;
    try {
        const EliminatedParams e = eliminate_off_resonant(p);
        const RamanCoefficients rc = raman_coefficients(p, c.g_om, c.delta_c_prime);
        double n_v = 0.0;
        std::string n_v_source = "override";
        if (c.n_v) {
            n_v = *c.n_v;
        } else {
            const LindbladModel m = build_H_om_res(p, c.g_om, c.delta_c_prime);
            n_v = vibron_population(m, steady_state(m));
            n_v_source = "numeric steady state (om_res)";
        }
        table = {{"config_hash", r.config_hash},
                 {"levels", {{"N", p.N}, {"g0", p.g0}, {"g", p.g}, {"delta", p.delta_b()}}},
                 {"g_om_from_levels", e.g_om},
                 {"cavity_redshift", e.redshift},
                 {"delta_c_prime_from_levels", e.delta_c_prime},
                 {"g_om", c.g_om},
                 {"delta_c_prime", c.delta_c_prime},
                 {"alpha_s", cplx_json(rc.alpha_s)},
                 {"alpha_s_abs", std::abs(rc.alpha_s)},
                 {"Gamma_eff", rc.Gamma_eff},
                 {"xi_mean", cplx_json(rc.xi_mean)},
                 {"C_off_S", cplx_json(rc.C_off_S)},
                 {"C_off_aS", cplx_json(rc.C_off_aS)},
                 {"C_res_S", cplx_json(rc.C_res_S)},
                 {"C_res_aS", cplx_json(rc.C_res_aS)},
                 {"n_v", n_v},
                 {"n_v_source", n_v_source},
                 {"gamma_v", p.kappa_v},
                 {"S_theo_stokes_peak", theoretical_peak(rc, PeakKind::stokes, n_v, p.kappa_v)},
                 {"S_theo_antistokes_peak", theoretical_peak(rc, PeakKind::anti_stokes, n_v, p.kappa_v)}};
    } catch (const Error& e) {
        r.errors.push_back(error_record("analytic table", e));
        return r;
    }
    const std::string path = c.out + "_analytic.json";
    write_json(path, table);
    r.files.push_back(path);
    r.summary = table;
    return r;
}

RunReport run_task(const ScenarioConfig& c) {
    RunReport r;
    try {
        switch (c.task) {
            case Task::spectrum: r = run_spectrum(c); break;
            case Task::ratio_map: r = run_ratio_map(c); break;
            case Task::csi_map: r = run_csi_map(c); break;
            case Task::analytic: r = run_analytic(c); break;
            case Task::thermal_sweep: r = run_thermal_sweep(c); break;
        }
    } catch (const Error& e) {
        r.task = to_string(c.task);
        r.config_hash = config_hash(c);
        r.errors.push_back(error_record("task " + to_string(c.task), e));
    }
    if (!r.ok()) {
        const std::string path = c.out + "_error.json";
        try {
            write_json(path, {{"config_hash", r.config_hash}, {"task", r.task}, {"errors", r.errors}});
            r.files.push_back(path);
        } catch (const IoError&) {
        }
    }
    return r;
}

}  // namespace sers
