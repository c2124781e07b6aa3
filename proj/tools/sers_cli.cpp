// sers-cli: runs spectrum, ratio-map, csi-map, thermal-sweep and analytic
// scenarios through the C interface and writes CSV/JSON outputs.

#include "sers/sers.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace {

using nlohmann::json;

struct CString {
    char* p{nullptr};
    ~CString() { sers_free_string(p); }
};

void print_error(const std::string& type, const std::string& message) {
    std::cerr << json{{"error", {{"type", type}, {"message", message}}}}.dump() << '\n';
}

std::string status_name(sers_status s) {
    switch (s) {
        case SERS_OK: return "ok";
        case SERS_ERR_INVALID_ARGUMENT: return "InvalidArgument";
        case SERS_ERR_PARAMETER: return "ParameterError";
        case SERS_ERR_CONFIG: return "ConfigError";
        case SERS_ERR_DIMENSION: return "DimensionError";
        case SERS_ERR_SOLVER: return "SolverError";
        case SERS_ERR_SINGULAR_SHIFT: return "SingularShiftError";
        case SERS_ERR_INTEGRATOR: return "IntegratorError";
        case SERS_ERR_UNDEFINED_CORRELATION: return "UndefinedCorrelationError";
        case SERS_ERR_IO: return "IoError";
        case SERS_ERR_RUN_FAILED: return "RunFailed";
        case SERS_ERR_INTERNAL: return "InternalError";
    }
    return "Error";
}

struct Options {
    std::string config;
    std::optional<std::string> out;
    std::optional<int> workers;
    std::optional<std::string> line;
    std::vector<std::string> models;
    bool print_config{false};
};

int run(const std::string& task, const Options& o) {
    json doc = json::object();
    if (!o.config.empty()) {
        std::ifstream f(o.config);
        if (!f) {
            print_error("IoError", "cannot read config '" + o.config + "'");
            return 2;
        }
        try {
            doc = json::parse(f);
        } catch (const json::exception& e) {
            print_error("ConfigError", std::string("invalid JSON: ") + e.what());
            return 2;
        }
        if (!doc.is_object()) {
            print_error("ConfigError", "config must be a JSON object");
            return 2;
        }
    }
    if (doc.contains("task") && doc["task"] != task) {
        print_error("ConfigError", "config task '" + doc["task"].dump() + "' does not match subcommand '" + task + "'");
        return 2;
    }
    doc["task"] = task;
    if (o.out) doc["out"] = *o.out;
    if (o.workers) doc["workers"] = *o.workers;
    if (o.line) doc["line"] = *o.line;
    if (!o.models.empty()) doc["model"] = o.models;

    const std::string text = doc.dump();
    if (o.print_config) {
        CString resolved;
        const sers_status s = sers_resolve_config(text.c_str(), &resolved.p);
        if (s != SERS_OK) {
            print_error(status_name(s), sers_last_error());
            return 2;
        }
        std::cout << resolved.p << '\n';
        return 0;
    }

    CString report;
    const sers_status s = sers_run(text.c_str(), &report.p);
    if (report.p) std::cout << report.p << '\n';
    if (s == SERS_OK) return 0;
    if (!report.p) {
        print_error(status_name(s), sers_last_error());
        return s == SERS_ERR_CONFIG || s == SERS_ERR_PARAMETER ? 2 : 1;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SERS emission, ratio-map and photon-statistics scenarios"};
    app.require_subcommand(1);
    Options o;
    const std::vector<std::pair<std::string, std::string>> tasks = {
        {"spectrum", "emission spectra per model"},
        {"ratio-map", "numeric and analytic log-ratio maps over (omega_c', omega_r)"},
        {"csi-map", "Cauchy-Schwarz ratio maps from filtered correlations"},
        {"thermal-sweep", "enhancement ratio over (Omega, T) and the equalization temperature"},
        {"analytic", "table of effective couplings and Raman coefficients"}};
    std::string chosen;
    for (const auto& [name, help] : tasks) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output path prefix");
        sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--line", o.line, "Raman line")->check(CLI::IsMember({"stokes", "antistokes"}));
        sub->add_option("--model", o.models, "model(s)")->check(CLI::IsMember({"om", "res", "om_res", "bright"}));
        sub->add_flag("--print-config", o.print_config, "print the resolved config and exit");
        sub->callback([&chosen, n = name] { chosen = n; });
    }
    CLI11_PARSE(app, argc, argv);
    return run(chosen, o);
}
