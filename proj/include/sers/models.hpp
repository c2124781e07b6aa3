// models.hpp - Hamiltonians and collapse lists for the SERS scenarios.
//
// Frequencies and rates are stored in "caption convention": the number X
// where a frequency is quoted as X/2pi in THz. The evolution uses them as
// angular frequencies directly (hbar = 1), so the 2pi never appears.

#pragma once

#include "sers/quantum_ops.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace sers {

// Subsystem labels shared by every model.
namespace labels {
inline constexpr const char* cavity = "cavity";
inline constexpr const char* vibron = "vibron";
inline constexpr const char* bright = "bright";
inline constexpr const char* emitter = "emitter";
}  // namespace labels

struct ModelParams {
    double omega_c{270.0};     // bare cavity frequency
    double omega_L{240.0};     // laser frequency
    double omega_v{30.0};      // vibron frequency
    double Omega{4.0};         // drive amplitude
    double kappa{33.0};        // cavity decay
    double kappa_v{0.06};      // vibron decay
    double gamma{5e-5};        // electronic spontaneous decay
    int N{1000};               // off-resonant level count
    double g0{3.0};            // per-level electron-vibron coupling
    double g{2.5};             // per-level cavity coupling
    double omega_off{673.0};   // off-resonant transition frequency
    double omega_r{270.0};     // zero-phonon line of the near-resonant level
    double g0_r{3.0};          // near-resonant electron-vibron coupling
    double g_r{2.5};           // near-resonant cavity coupling
    double T{0.0};             // vibron bath temperature, kelvin
    int trunc_cavity{10};
    int trunc_vibron{3};
    int trunc_bright{4};

    double delta_c() const noexcept { return omega_c - omega_L; }
    double delta_b() const noexcept { return omega_off - omega_L; }
    double delta_r() const noexcept { return omega_r - omega_L; }

    // Throws ParameterError on negative rates, N < 1, truncations < 2 or
    // non-finite values.
    void validate() const;

    bool operator==(const ModelParams&) const = default;
};

// Field names match the struct members exactly. Unknown keys are rejected;
// missing keys keep their defaults.
ModelParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const ModelParams& p);

enum class ModelKind { om, res, om_res, bright };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct Collapse {
    double rate{0.0};
    Operator op;
};

struct LindbladModel {
    SpacePtr space;
    Operator H;                      // rotating frame of the laser
    std::vector<Collapse> collapses;  // (rate/2) * D[op]

    // Read back by the spectra and photon-stats layers.
    ModelKind kind{ModelKind::om};
    double omega_L{0.0};
    double omega_v{0.0};
    std::string cavity_label{labels::cavity};

    Operator cavity_annihilator() const;
    Operator local(const std::string& label, const Operator& op) const { return embed(space, label, op); }
    void validate() const;
};

// Standard optomechanical Hamiltonian with renormalized detuning and
// effective coupling. Space: [cavity, vibron].
LindbladModel build_H_om(const ModelParams& p, double g_om, double delta_c_prime);

// Collective bright-boson model. Space: [cavity, bright, vibron].
LindbladModel build_H_B(const ModelParams& p);

// Optomechanical model plus one near-resonant two-level transition.
// Space: [cavity, vibron, emitter].
LindbladModel build_H_om_res(const ModelParams& p, double g_om, double delta_c_prime);

// Purely resonant model: build_H_om_res with g_om = 0.
LindbladModel build_H_res(const ModelParams& p, double delta_c_prime);

// Dispatch on kind; `bright` ignores g_om and delta_c_prime.
LindbladModel build_model(ModelKind kind, const ModelParams& p, double g_om, double delta_c_prime);

// Bose occupation of the vibron at temperature T (kelvin).
double thermal_occupancy(double omega_v, double T);

// Same model with every truncation raised by one, for convergence checks.
ModelParams with_raised_truncations(const ModelParams& p);

}  // namespace sers
