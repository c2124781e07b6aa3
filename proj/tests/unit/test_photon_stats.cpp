#include <doctest.h>

#include "helpers.hpp"
#include "sers/photon_stats.hpp"

using namespace sers;
using testing_support::small_params;

TEST_CASE("sensor configuration validation") {
    SensorConfig ok{210.0, 270.0, 0.06, 0.0006};
    CHECK_NOTHROW(ok.validate());
    SensorConfig strong{210.0, 270.0, 0.06, 0.01};
    CHECK_THROWS_AS(strong.validate(), ParameterError);
    SensorConfig bad{210.0, 270.0, 0.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    const auto m = build_H_om(small_params(), 0.1, 15.0);
    const SensorConfig r = raman_sensors(m, 0.06);
    CHECK(r.omega_1 == 210.0);
    CHECK(r.omega_2 == 270.0);
    CHECK(r.epsilon == doctest::Approx(0.0006));
}

TEST_CASE("attached sensors extend the space") {
    const auto m = build_H_om(small_params(), 0.1, 15.0);
    const auto s = attach_sensors(m, raman_sensors(m, 0.06));
    CHECK(s.space->dimension() == 4 * m.space->dimension());
    CHECK(s.space->contains(labels::sensor1));
    CHECK(s.space->contains(labels::sensor2));
    CHECK(s.collapses.size() == m.collapses.size() + 2);
    CHECK(s.H.is_hermitian());
}

TEST_CASE("sector solver matches a direct steady state") {
    ModelParams p = small_params();
    p.trunc_cavity = 4;
    const auto m = build_H_om(p, 0.3, 15.0);
    const SensorConfig cfg{p.omega_L - p.omega_v, p.omega_L + p.omega_v, 0.06, 0.0006};
    const SensorReadout r = sensor_readout(m, cfg);
    const auto full = attach_sensors(m, cfg);
    const DensityMatrix rho = steady_state(full);
    const Operator s1 = full.local(labels::sensor1, sigma_minus());
    const Operator s2 = full.local(labels::sensor2, sigma_minus());
    const double n1 = expectation(s1.adjoint() * s1, rho).real();
    const double n2 = expectation(s2.adjoint() * s2, rho).real();
    const double n12 = expectation(s1.adjoint() * s2.adjoint() * s2 * s1, rho).real();
    CHECK(r.n1 == doctest::Approx(n1).epsilon(1e-6));
    CHECK(r.n2 == doctest::Approx(n2).epsilon(1e-6));
    CHECK(r.n12 == doctest::Approx(n12).epsilon(1e-5));
}

TEST_CASE("coherent light gives uncorrelated filtered photons") {
    const ModelParams p = small_params();
    const auto m = build_H_om(p, 0.0, 15.0);
    const SensorConfig cfg{p.omega_L, p.omega_L + 0.06, 0.06, 0.0006};
    const CsiResult r = filtered_g2(m, cfg);
    CHECK(r.g2_cross == doctest::Approx(1.0).epsilon(0.02));
    CHECK(r.g2_11 == doctest::Approx(1.0).epsilon(0.02));
    CHECK(r.g2_22 == doctest::Approx(1.0).epsilon(0.02));
    CHECK(r.R == doctest::Approx(1.0).epsilon(0.05));
    CHECK(r.converged);
}

TEST_CASE("undriven system has undefined correlations") {
    ModelParams p = small_params();
    p.Omega = 0.0;
    const auto m = build_H_om(p, 0.1, 15.0);
    CHECK_THROWS_AS(filtered_g2(m, raman_sensors(m, 0.06)), UndefinedCorrelationError);
}

TEST_CASE("optomechanical pairs are bunched") {
    const ModelParams p;
    const auto m = build_H_om(p, 0.1, 15.0);
    const CsiResult r = filtered_g2(m, raman_sensors(m, p.kappa_v));
    CHECK(r.g2_cross > 1.0);
    CHECK(r.converged);
    CHECK(std::abs(r.R_half - r.R) / r.R < 0.05);
}
