// scenario.hpp - resolved run configurations and the task runners behind the
// command-line tool.

#pragma once

#include "sers/photon_stats.hpp"
#include "sers/raman_analytics.hpp"
#include "sers/ratio_map.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace sers {

// A 1-D axis given either as {"min", "max", "count"} or as an explicit array.
struct Axis {
    std::vector<double> values;
    bool from_range{false};
    double min{0.0};
    double max{0.0};
    std::size_t count{0};

    static Axis range(double lo, double hi, std::size_t n);
    static Axis list(std::vector<double> v);
    static Axis from_json(const nlohmann::json& j, const std::string& name);
    nlohmann::json to_json() const;
};

enum class Task { spectrum, ratio_map, csi_map, analytic, thermal_sweep };

std::string to_string(Task task);
Task task_from_string(const std::string& name);

struct ScenarioConfig {
    Task task{Task::spectrum};
    std::vector<ModelKind> models;
    ModelParams params;
    // Effective optomechanical parameters. When the config leaves them out
    // they follow from the off-resonant levels in `params`.
    double g_om{0.0};
    double delta_c_prime{0.0};
    bool g_om_derived{true};
    bool delta_c_prime_derived{true};
    PeakKind line{PeakKind::anti_stokes};
    std::optional<Axis> grid;  // spectrum frequencies; default grid when empty
    Axis x_axis;               // omega_c' = omega_L + delta_c'
    Axis y_axis;               // omega_r
    Axis omega_axis;           // thermal sweep drive amplitudes
    Axis T_axis;               // thermal sweep temperatures
    double sensor_Gamma{0.0};
    double sensor_epsilon_ratio{0.01};
    std::optional<double> n_v;  // analytic task: vibron occupancy override
    bool check_truncation{true};
    int workers{1};
    std::string out{"sers"};
};

// Strict parse of a config document: unknown keys, wrong types, empty grids
// and invalid parameters raise ConfigError. Missing keys take defaults.
ScenarioConfig resolve_config(const nlohmann::json& j);

// Fully resolved form with every default and derived value filled in;
// resolve_config(to_json(c)) reproduces the same computation.
nlohmann::json to_json(const ScenarioConfig& c);

// FNV-1a 64-bit hash (16 hex digits) of the resolved config without the
// execution-only fields `workers` and `out`.
std::string config_hash(const ScenarioConfig& c);

struct RunReport {
    std::string task;
    std::string config_hash;
    std::vector<std::string> files;
    nlohmann::json errors = nlohmann::json::array();
    nlohmann::json summary = nlohmann::json::object();

    bool ok() const { return errors.empty(); }
    nlohmann::json to_json() const;
};

RunReport run_spectrum(const ScenarioConfig& c);
RunReport run_ratio_map(const ScenarioConfig& c);
RunReport run_csi_map(const ScenarioConfig& c);
RunReport run_thermal_sweep(const ScenarioConfig& c);
RunReport run_analytic(const ScenarioConfig& c);

// Dispatches on c.task. When errors occurred, also writes <out>_error.json.
RunReport run_task(const ScenarioConfig& c);

// Results of the ratio-map task, exposed for tests.
struct RatioMapSet {
    RatioMap numeric_vs_om;
    RatioMap numeric_vs_res;
    RatioMap analytic_vs_om;
    RatioMap analytic_vs_res;
    RatioMap vibron_vs_om;
    RatioMap vibron_vs_res;
};
RatioMapSet compute_ratio_maps(const ScenarioConfig& c);

// Cell-wise comparison of two log-ratio maps over cells valid in both.
struct MapAgreement {
    std::size_t compared{0};
    double sign_fraction{0.0};    // same sign (zero counts as positive)
    double decade_fraction{0.0};  // |a - b| <= 1
};
MapAgreement compare_maps(const RatioMap& a, const RatioMap& b);

// log10 of the combined over resonant-only anti-Stokes peak on the
// (Omega, T) grid, plus the equalization temperature per Omega.
struct ThermalSweep {
    RatioMap ratio;  // x = Omega, y = T
    std::vector<double> n_f;
    std::vector<double> T_E;
};
ThermalSweep compute_thermal_sweep(const ScenarioConfig& c);

// Writers. The first line of every CSV is "# config_hash=<hash>".
void write_spectrum_csv(const std::string& path, const Spectrum& s, const std::string& hash);
void write_ratio_map_csv(const std::string& path, const RatioMap& m, const std::string& hash, bool converged_column);
void write_json(const std::string& path, const nlohmann::json& j);

// Fixed-format number used in every CSV.
std::string format_number(double x);

}  // namespace sers
