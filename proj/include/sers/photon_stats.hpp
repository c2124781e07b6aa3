// photon_stats.hpp - frequency-filtered zero-delay photon correlations.
//
// Two weakly coupled, decaying two-level sensors play the role of filters of
// linewidth Gamma centred at omega_1 and omega_2. Normalized sensor
// population correlators converge to the filtered g2 as epsilon -> 0.

#pragma once

#include "sers/liouville.hpp"
#include "sers/ratio_map.hpp"

#include <optional>
#include <string>

namespace sers {

namespace labels {
inline constexpr const char* sensor1 = "sensor1";
inline constexpr const char* sensor2 = "sensor2";
}  // namespace labels

struct SensorConfig {
    double omega_1{0.0};  // lab frame
    double omega_2{0.0};
    double Gamma{0.06};
    double epsilon{0.0006};

    // Throws ParameterError unless Gamma > 0 and 0 <= epsilon <= Gamma/20.
    void validate() const;
};

// Stokes/anti-Stokes sensor pair for a model: omega_L -+ omega_v, epsilon
// = Gamma * epsilon_ratio.
SensorConfig raman_sensors(const LindbladModel& model, double Gamma, double epsilon_ratio = 0.01);

// Appends two sensors to the model's space (they vary fastest).
LindbladModel attach_sensors(const LindbladModel& model, const SensorConfig& cfg);

// Populations and normalized coincidence of the two sensors for one
// configuration.
struct SensorReadout {
    double n1{0.0};
    double n2{0.0};
    double n12{0.0};
    double g2{0.0};  // n12 / (n1 n2)
};

// Steady state of the sensor-augmented model and its readout. Throws
// UndefinedCorrelationError when either population is below 1e-14.
SensorReadout sensor_readout(const LindbladModel& model, const SensorConfig& cfg);

struct CsiResult {
    double g2_cross{0.0};
    double g2_11{0.0};
    double g2_22{0.0};
    double R{0.0};
    bool converged{false};
    // Same quantities at epsilon/2, used for the convergence flag.
    double g2_cross_half{0.0};
    double g2_11_half{0.0};
    double g2_22_half{0.0};
    double R_half{0.0};
    double n1{0.0};  // sensor populations of the cross configuration
    double n2{0.0};
};

struct G2Set {
    double cross{0.0};
    double auto_1{0.0};
    double auto_2{0.0};
    double n1{0.0};
    double n2{0.0};
    double R() const { return cross * cross / (auto_1 * auto_2); }
};

// Cross correlation plus the two auto correlations, each auto correlation
// from a degenerate sensor pair.
G2Set filtered_g2_set(const LindbladModel& model, const SensorConfig& cfg);

// Full result with epsilon halving; converged when every g2 and R move by
// less than `tolerance` (relative).
CsiResult filtered_g2(const LindbladModel& model, const SensorConfig& cfg, double tolerance = 0.05);

struct CsiMapSpec {
    ModelKind kind{ModelKind::om_res};
    double g_om{0.1};
    double Gamma{0.06};
    double epsilon_ratio{0.01};
    std::vector<double> omega_c_prime;  // x axis: omega_L + delta_c_prime
    std::vector<double> omega_r;        // y axis
    int workers{1};
};

// log10 R per cell; failing cells are masked with their error text.
RatioMap csi_map(const ModelParams& p, const CsiMapSpec& spec);

}  // namespace sers
