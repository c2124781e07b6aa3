#include <doctest.h>

#include "sers/sers.h"

#include <cmath>
#include <string>

TEST_CASE("model lifecycle through the C interface") {
    sers_model* m = nullptr;
    REQUIRE(sers_model_create(SERS_MODEL_OM, R"({"trunc_cavity": 6})", 0.1, 15.0, &m) == SERS_OK);
    size_t dim = 0;
    CHECK(sers_model_dimension(m, &dim) == SERS_OK);
    CHECK(dim == 18);
    sers_state* s = nullptr;
    REQUIRE(sers_steady_state(m, &s) == SERS_OK);
    double re = 0, im = 0;
    CHECK(sers_state_trace(s, &re, &im) == SERS_OK);
    CHECK(std::abs(re - 1.0) < 1e-10);
    double n = -1;
    CHECK(sers_state_population(m, s, "cavity", &n) == SERS_OK);
    CHECK(n > 0.0);
    CHECK(sers_state_population(m, s, "emitter", &n) == SERS_ERR_PARAMETER);
    double peak = 0, rayleigh = 0;
    CHECK(sers_peak_value(m, s, 270.0, &peak) == SERS_OK);
    const double grid[3] = {269.9, 270.0, 270.1};
    double values[3] = {0, 0, 0};
    CHECK(sers_emission_spectrum(m, s, grid, 3, 1, values, &rayleigh) == SERS_OK);
    CHECK(values[1] == doctest::Approx(peak).epsilon(1e-12));
    CHECK(rayleigh > 0.0);
    sers_state_free(s);
    sers_model_free(m);
}

TEST_CASE("derived couplings through NaN arguments") {
    sers_model* m = nullptr;
    CHECK(sers_model_create(SERS_MODEL_OM, nullptr, NAN, NAN, &m) == SERS_OK);
    sers_model_free(m);
}

TEST_CASE("error codes and messages") {
    sers_model* m = nullptr;
    CHECK(sers_model_create(SERS_MODEL_OM, "{\"kappa\": -1}", 0.1, 15.0, &m) == SERS_ERR_CONFIG);
    CHECK(m == nullptr);
    CHECK(std::string(sers_last_error()).size() > 0);
    CHECK(sers_model_create(SERS_MODEL_OM, "{not json", 0.1, 15.0, &m) == SERS_ERR_CONFIG);
    CHECK(sers_model_create(SERS_MODEL_OM, "{\"bogus\": 1}", 0.1, 15.0, &m) == SERS_ERR_CONFIG);
    CHECK(sers_model_create(SERS_MODEL_OM, nullptr, 0.1, 15.0, nullptr) == SERS_ERR_INVALID_ARGUMENT);
    double x = 0;
    CHECK(sers_thermal_occupancy(30.0, -5.0, &x) == SERS_ERR_PARAMETER);
    CHECK(sers_thermal_occupancy(30.0, 0.0, &x) == SERS_OK);
    CHECK(x == 0.0);
    CHECK(std::string(sers_last_error()).empty());
}

TEST_CASE("scalar helpers") {
    double g = 0, t = 0, n = 0;
    CHECK(sers_g_om_from_levels(1000, 3.0, 2.5, 433.0, &g) == SERS_OK);
    CHECK(g == doctest::Approx(0.1).epsilon(0.05));
    CHECK(sers_thermal_occupancy(30.0, 150.0, &n) == SERS_OK);
    CHECK(sers_equalization_temperature(30.0, n, &t) == SERS_OK);
    CHECK(t == doctest::Approx(150.0).epsilon(1e-12));
}

TEST_CASE("filtered correlations through the C interface") {
    sers_model* m = nullptr;
    REQUIRE(sers_model_create(SERS_MODEL_OM, R"({"trunc_cavity": 5})", 0.1, 15.0, &m) == SERS_OK);
    sers_g2_result r{};
    CHECK(sers_filtered_g2(m, 0.06, 0.01, &r) == SERS_OK);
    CHECK(r.g2_cross > 1.0);
    CHECK(r.converged == 1);
    CHECK(sers_filtered_g2(m, 0.06, 0.5, &r) == SERS_ERR_PARAMETER);
    sers_model_free(m);
}

TEST_CASE("config resolution and runs") {
    char* out = nullptr;
    CHECK(sers_resolve_config("{}", &out) == SERS_OK);
    REQUIRE(out != nullptr);
    CHECK(std::string(out).find("\"omega_L\": 240.0") != std::string::npos);
    sers_free_string(out);
    CHECK(sers_resolve_config("{\"task\": \"dance\"}", &out) == SERS_ERR_CONFIG);
    char* report = nullptr;
    CHECK(sers_run("{\"task\": \"analytic\", \"n_v\": 0.0, \"out\": \"/nonexistent-dir/x\"}", &report) ==
          SERS_ERR_RUN_FAILED);
    REQUIRE(report != nullptr);
    CHECK(std::string(report).find("IoError") != std::string::npos);
    sers_free_string(report);
}
