#include "sers/sers.h"

#include "sers/photon_stats.hpp"
#include "sers/raman_analytics.hpp"
#include "sers/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

struct sers_model {
    sers::LindbladModel model;
};

struct sers_state {
    sers::DensityMatrix rho;
};

namespace {

thread_local std::string last_error;

sers_status fail(sers_status code, const std::string& msg) {
    last_error = msg;
    return code;
}

template <class F>
sers_status guarded(F&& f) {
    try {
        last_error.clear();
        return f();
    } catch (const sers::SingularShiftError& e) {
        return fail(SERS_ERR_SINGULAR_SHIFT, e.what());
    } catch (const sers::SolverError& e) {
        return fail(SERS_ERR_SOLVER, e.what());
    } catch (const sers::ParameterError& e) {
        return fail(SERS_ERR_PARAMETER, e.what());
    } catch (const sers::ConfigError& e) {
        return fail(SERS_ERR_CONFIG, e.what());
    } catch (const sers::DimensionError& e) {
        return fail(SERS_ERR_DIMENSION, e.what());
    } catch (const sers::SpaceMismatchError& e) {
        return fail(SERS_ERR_DIMENSION, e.what());
    } catch (const sers::IntegratorError& e) {
        return fail(SERS_ERR_INTEGRATOR, e.what());
    } catch (const sers::UndefinedCorrelationError& e) {
        return fail(SERS_ERR_UNDEFINED_CORRELATION, e.what());
    } catch (const sers::IoError& e) {
        return fail(SERS_ERR_IO, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(SERS_ERR_CONFIG, std::string("json: ") + e.what());
    } catch (const std::bad_alloc&) {
        return fail(SERS_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SERS_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SERS_ERR_INTERNAL, "unknown error");
    }
}

char* duplicate(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

nlohmann::json parse(const char* text) {
    if (!text || !*text) return nlohmann::json::object();
    return nlohmann::json::parse(text);
}

sers::ModelKind to_kind(sers_model_kind k) {
    switch (k) {
        case SERS_MODEL_OM: return sers::ModelKind::om;
        case SERS_MODEL_RES: return sers::ModelKind::res;
        case SERS_MODEL_OM_RES: return sers::ModelKind::om_res;
        case SERS_MODEL_BRIGHT: return sers::ModelKind::bright;
    }
    throw sers::ParameterError("unknown model kind");
}

#define REQUIRE(cond, what) \
    if (!(cond)) return fail(SERS_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* sers_version(void) { return "0.1.0"; }

const char* sers_last_error(void) { return last_error.c_str(); }

void sers_free_string(char* s) { std::free(s); }

sers_status sers_model_create(sers_model_kind kind, const char* params_json, double g_om, double delta_c_prime,
                              sers_model** out) {
    REQUIRE(out, "out is null");
    *out = nullptr;
    return guarded([&] {
        const sers::ModelParams p = sers::params_from_json(parse(params_json));
        if (std::isnan(g_om) || std::isnan(delta_c_prime)) {
            const sers::EliminatedParams e = sers::eliminate_off_resonant(p);
            if (std::isnan(g_om)) g_om = e.g_om;
            if (std::isnan(delta_c_prime)) delta_c_prime = e.delta_c_prime;
        }
        *out = new sers_model{sers::build_model(to_kind(kind), p, g_om, delta_c_prime)};
        return SERS_OK;
    });
}

void sers_model_free(sers_model* model) { delete model; }

sers_status sers_model_dimension(const sers_model* model, size_t* out) {
    REQUIRE(model && out, "null argument");
    *out = model->model.space->dimension();
    return SERS_OK;
}

sers_status sers_steady_state(const sers_model* model, sers_state** out) {
    REQUIRE(model && out, "null argument");
    *out = nullptr;
    return guarded([&] {
        *out = new sers_state{sers::steady_state(model->model)};
        return SERS_OK;
    });
}

void sers_state_free(sers_state* state) { delete state; }

sers_status sers_state_trace(const sers_state* state, double* re, double* im) {
    REQUIRE(state && re && im, "null argument");
    const sers::cplx t = state->rho.trace();
    *re = t.real();
    *im = t.imag();
    return SERS_OK;
}

sers_status sers_state_population(const sers_model* model, const sers_state* state, const char* label, double* out) {
    REQUIRE(model && state && label && out, "null argument");
    return guarded([&] {
        const auto& space = model->model.space;
        if (!space->contains(label)) throw sers::ParameterError(std::string("model has no subsystem '") + label + "'");
        const auto& spec = space->at(label);
        if (spec.kind != sers::SubsystemKind::boson) throw sers::ParameterError("population needs a bosonic subsystem");
        const sers::Operator a = model->model.local(label, sers::destroy(spec.dim));
        *out = sers::expectation(a.adjoint() * a, state->rho).real();
        return SERS_OK;
    });
}

sers_status sers_peak_value(const sers_model* model, const sers_state* state, double omega, double* out) {
    REQUIRE(model && state && out, "null argument");
    return guarded([&] {
        *out = sers::peak_value(model->model, state->rho, omega).height;
        return SERS_OK;
    });
}

sers_status sers_emission_spectrum(const sers_model* model, const sers_state* state, const double* omega,
                                   size_t count, int workers, double* values, double* rayleigh_weight) {
    REQUIRE(model && state && omega && values, "null argument");
    REQUIRE(count > 0, "empty grid");
    return guarded([&] {
        const sers::Spectrum s = sers::emission_spectrum(model->model, state->rho,
                                                         std::vector<double>(omega, omega + count), workers);
        std::copy(s.values.begin(), s.values.end(), values);
        if (rayleigh_weight) *rayleigh_weight = s.rayleigh_weight;
        return SERS_OK;
    });
}

sers_status sers_thermal_occupancy(double omega_v, double T, double* out) {
    REQUIRE(out, "out is null");
    return guarded([&] {
        *out = sers::thermal_occupancy(omega_v, T);
        return SERS_OK;
    });
}

sers_status sers_equalization_temperature(double omega_v, double n_f, double* out) {
    REQUIRE(out, "out is null");
    return guarded([&] {
        *out = sers::equalization_temperature(omega_v, n_f);
        return SERS_OK;
    });
}

sers_status sers_g_om_from_levels(int count, double g0, double g, double delta, double* out) {
    REQUIRE(out, "out is null");
    return guarded([&] {
        *out = sers::g_om_from_levels(sers::uniform_levels(count, g0, g, delta));
        return SERS_OK;
    });
}

sers_status sers_filtered_g2(const sers_model* model, double Gamma, double epsilon_ratio, sers_g2_result* out) {
    REQUIRE(model && out, "null argument");
    return guarded([&] {
        const sers::SensorConfig cfg = sers::raman_sensors(model->model, Gamma, epsilon_ratio);
        const sers::CsiResult r = sers::filtered_g2(model->model, cfg);
        *out = sers_g2_result{r.g2_cross, r.g2_11, r.g2_22, r.R, r.R_half, r.converged ? 1 : 0};
        return SERS_OK;
    });
}

sers_status sers_resolve_config(const char* config_json, char** out) {
    REQUIRE(out, "out is null");
    *out = nullptr;
    return guarded([&] {
        const sers::ScenarioConfig c = sers::resolve_config(parse(config_json));
        *out = duplicate(sers::to_json(c).dump(2));
        return SERS_OK;
    });
}

sers_status sers_run(const char* config_json, char** report) {
    if (report) *report = nullptr;
    return guarded([&] {
        const sers::ScenarioConfig c = sers::resolve_config(parse(config_json));
        const sers::RunReport r = sers::run_task(c);
        if (report) *report = duplicate(r.to_json().dump(2));
        if (!r.ok()) {
            last_error = r.errors.front().value("message", std::string("run failed"));
            return SERS_ERR_RUN_FAILED;
        }
        return SERS_OK;
    });
}

}  // extern "C"
