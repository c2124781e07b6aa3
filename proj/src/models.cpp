#include "sers/models.hpp"

#include <cmath>
#include <limits>

namespace sers {

namespace {

constexpr double planck_h = 6.62607015e-34;   // J s (exact SI)
constexpr double boltzmann_k = 1.380649e-23;  // J/K (exact SI)
constexpr double thz = 1e12;

void require_nonnegative(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw ParameterError(std::string("ModelParams: ") + name + " is not finite");
    }
    if (value < 0.0) {
        throw ParameterError(std::string("ModelParams: ") + name + " must be non-negative");
    }
}

void append_vibron_bath(LindbladModel& m, const ModelParams& p, const Operator& v) {
    const double n_th = thermal_occupancy(p.omega_v, p.T);
    m.collapses.push_back({p.kappa_v * (n_th + 1.0), v});
    if (n_th > 0.0) m.collapses.push_back({p.kappa_v * n_th, v.adjoint()});
}

}  // namespace

void ModelParams::validate() const {
    require_nonnegative(omega_c, "omega_c");
    require_nonnegative(omega_L, "omega_L");
    require_nonnegative(omega_v, "omega_v");
    require_nonnegative(Omega, "Omega");
    require_nonnegative(kappa, "kappa");
    require_nonnegative(kappa_v, "kappa_v");
    require_nonnegative(gamma, "gamma");
    require_nonnegative(g0, "g0");
    require_nonnegative(g, "g");
    require_nonnegative(omega_off, "omega_off");
    require_nonnegative(omega_r, "omega_r");
    require_nonnegative(g0_r, "g0_r");
    require_nonnegative(g_r, "g_r");
    require_nonnegative(T, "T");
    if (N < 1) throw ParameterError("ModelParams: N must be >= 1");
    if (trunc_cavity < 2 || trunc_vibron < 2 || trunc_bright < 2) {
        throw ParameterError("ModelParams: truncations must be >= 2");
    }
}

#define SERS_PARAM_FIELDS(X)                                                                        \
    X(omega_c) X(omega_L) X(omega_v) X(Omega) X(kappa) X(kappa_v) X(gamma) X(N) X(g0) X(g) X(omega_off) \
        X(omega_r) X(g0_r) X(g_r) X(T) X(trunc_cavity) X(trunc_vibron) X(trunc_bright)

ModelParams params_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigError("params: expected a flat JSON object");
    }
    ModelParams p;
    for (const auto& [key, value] : j.items()) {
        bool known = false;
#define SERS_READ_FIELD(name)                                                              \
    if (key == #name) {                                                                    \
        known = true;                                                                      \
        if (!value.is_number()) throw ConfigError("params: field '" #name "' must be numeric"); \
        if constexpr (std::is_integral_v<decltype(p.name)>) {                              \
            if (!value.is_number_integer()) {                                              \
                throw ConfigError("params: field '" #name "' must be an integer");          \
            }                                                                              \
        }                                                                                  \
        p.name = value.get<decltype(p.name)>();                                            \
    }
        SERS_PARAM_FIELDS(SERS_READ_FIELD)
#undef SERS_READ_FIELD
        if (!known) throw ConfigError("params: unknown field '" + key + "'");
    }
    try {
        p.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    return p;
}

nlohmann::json params_to_json(const ModelParams& p) {
    nlohmann::json j = nlohmann::json::object();
#define SERS_WRITE_FIELD(name) j[#name] = p.name;
    SERS_PARAM_FIELDS(SERS_WRITE_FIELD)
#undef SERS_WRITE_FIELD
    return j;
}

#undef SERS_PARAM_FIELDS

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::om: return "om";
        case ModelKind::res: return "res";
        case ModelKind::om_res: return "om_res";
        case ModelKind::bright: return "bright";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "om") return ModelKind::om;
    if (name == "res") return ModelKind::res;
    if (name == "om_res") return ModelKind::om_res;
    if (name == "bright") return ModelKind::bright;
    throw ConfigError("unknown model '" + name + "' (expected om, res, om_res or bright)");
}

Operator LindbladModel::cavity_annihilator() const {
    return embed(space, cavity_label, destroy(space->at(cavity_label).dim));
}

void LindbladModel::validate() const {
    if (!space) throw DimensionError("LindbladModel: missing space");
    if (!H.is_hermitian(1e-12)) throw ParameterError("LindbladModel: Hamiltonian is not Hermitian");
    for (const auto& c : collapses) {
        if (!(c.rate >= 0.0)) throw ParameterError("LindbladModel: negative collapse rate");
        if (c.op.dimension() != space->dimension()) throw DimensionError("LindbladModel: collapse dimension");
    }
}

LindbladModel build_H_om(const ModelParams& p, double g_om, double delta_c_prime) {
    p.validate();
    if (!std::isfinite(g_om) || !std::isfinite(delta_c_prime)) {
        throw ParameterError("build_H_om: g_om and delta_c_prime must be finite");
    }
    LindbladModel m;
    m.kind = ModelKind::om;
    m.omega_L = p.omega_L;
    m.omega_v = p.omega_v;
    m.space = make_space({SubsystemSpec::boson(labels::cavity, static_cast<std::size_t>(p.trunc_cavity)),
                          SubsystemSpec::boson(labels::vibron, static_cast<std::size_t>(p.trunc_vibron))});
    const Operator a = m.local(labels::cavity, destroy(static_cast<std::size_t>(p.trunc_cavity)));
    const Operator v = m.local(labels::vibron, destroy(static_cast<std::size_t>(p.trunc_vibron)));
    const Operator ad = a.adjoint();
    const Operator vd = v.adjoint();
    const Operator n_a = ad * a;

    m.H = delta_c_prime * n_a + p.omega_v * (vd * v) + p.Omega * (ad + a) + g_om * (n_a * (vd + v));
    m.collapses.push_back({p.kappa, a});
    append_vibron_bath(m, p, v);
    return m;
}

LindbladModel build_H_B(const ModelParams& p) {
    p.validate();
    LindbladModel m;
    m.kind = ModelKind::bright;
    m.omega_L = p.omega_L;
    m.omega_v = p.omega_v;
    m.space = make_space({SubsystemSpec::boson(labels::cavity, static_cast<std::size_t>(p.trunc_cavity)),
                          SubsystemSpec::boson(labels::bright, static_cast<std::size_t>(p.trunc_bright)),
                          SubsystemSpec::boson(labels::vibron, static_cast<std::size_t>(p.trunc_vibron))});
    const Operator a = m.local(labels::cavity, destroy(static_cast<std::size_t>(p.trunc_cavity)));
    const Operator b = m.local(labels::bright, destroy(static_cast<std::size_t>(p.trunc_bright)));
    const Operator v = m.local(labels::vibron, destroy(static_cast<std::size_t>(p.trunc_vibron)));
    const Operator ad = a.adjoint();
    const Operator bd = b.adjoint();
    const Operator vd = v.adjoint();
    const Operator n_b = bd * b;

    m.H = p.delta_b() * n_b + p.delta_c() * (ad * a) + p.omega_v * (vd * v) + p.Omega * (ad + a) +
          p.g0 * (n_b * (vd + v)) + (std::sqrt(static_cast<double>(p.N)) * p.g) * (bd * a + b * ad);
    m.collapses.push_back({p.kappa, a});
    append_vibron_bath(m, p, v);
    m.collapses.push_back({p.gamma, b});
    return m;
}

LindbladModel build_H_om_res(const ModelParams& p, double g_om, double delta_c_prime) {
    p.validate();
    if (!std::isfinite(g_om) || !std::isfinite(delta_c_prime)) {
        throw ParameterError("build_H_om_res: g_om and delta_c_prime must be finite");
    }
    LindbladModel m;
    m.kind = g_om == 0.0 ? ModelKind::res : ModelKind::om_res;
    m.omega_L = p.omega_L;
    m.omega_v = p.omega_v;
    m.space = make_space({SubsystemSpec::boson(labels::cavity, static_cast<std::size_t>(p.trunc_cavity)),
                          SubsystemSpec::boson(labels::vibron, static_cast<std::size_t>(p.trunc_vibron)),
                          SubsystemSpec::two_level(labels::emitter)});
    const Operator a = m.local(labels::cavity, destroy(static_cast<std::size_t>(p.trunc_cavity)));
    const Operator v = m.local(labels::vibron, destroy(static_cast<std::size_t>(p.trunc_vibron)));
    const Operator xi = m.local(labels::emitter, sigma_minus());
    const Operator ad = a.adjoint();
    const Operator vd = v.adjoint();
    const Operator xid = xi.adjoint();
    const Operator n_a = ad * a;
    const Operator n_xi = xid * xi;

    m.H = delta_c_prime * n_a + p.omega_v * (vd * v) + p.Omega * (ad + a) + g_om * (n_a * (vd + v)) +
          p.delta_r() * n_xi + p.g0_r * (n_xi * (vd + v)) + p.g_r * (xid * a + xi * ad);
    m.collapses.push_back({p.kappa, a});
    append_vibron_bath(m, p, v);
    m.collapses.push_back({p.gamma, xi});
    return m;
}

LindbladModel build_H_res(const ModelParams& p, double delta_c_prime) {
    return build_H_om_res(p, 0.0, delta_c_prime);
}

LindbladModel build_model(ModelKind kind, const ModelParams& p, double g_om, double delta_c_prime) {
    switch (kind) {
        case ModelKind::om: return build_H_om(p, g_om, delta_c_prime);
        case ModelKind::res: return build_H_res(p, delta_c_prime);
        case ModelKind::om_res: {
            auto m = build_H_om_res(p, g_om, delta_c_prime);
            m.kind = ModelKind::om_res;
            return m;
        }
        case ModelKind::bright: return build_H_B(p);
    }
    throw ParameterError("build_model: unknown kind");
}

double thermal_occupancy(double omega_v, double T) {
    if (!(T >= 0.0)) {
        throw ParameterError("thermal_occupancy: temperature must be non-negative");
    }
    if (T == 0.0) return 0.0;
    const double x = planck_h * omega_v * thz / (boltzmann_k * T);
    return 1.0 / std::expm1(x);
}

ModelParams with_raised_truncations(const ModelParams& p) {
    ModelParams q = p;
    q.trunc_cavity += 1;
    q.trunc_vibron += 1;
    q.trunc_bright += 1;
    return q;
}

}  // namespace sers
