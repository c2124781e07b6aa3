#include <doctest.h>

#include "sers/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sers;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json load(const std::string& name) {
    std::ifstream f(std::string(SERS_SOURCE_DIR) + "/configs/" + name);
    REQUIRE(f.good());
    return json::parse(f);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string temp_prefix(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / "sers_unit";
    fs::create_directories(dir);
    return (dir / tag).string();
}

}  // namespace

TEST_CASE("omitting every optional field gives the golden parameter set") {
    const ScenarioConfig golden = resolve_config(load("golden_defaults.json"));
    const ScenarioConfig empty = resolve_config(json::object());
    CHECK(golden.params == empty.params);
    CHECK(golden.params == ModelParams{});
    CHECK(config_hash(golden) == config_hash(empty));
    CHECK(to_json(golden) == to_json(empty));
}

TEST_CASE("checked-in configs resolve") {
    for (const char* name : {"bright_vs_om.json", "resonant_spectra.json", "detuned_spectra.json", "antistokes_map.json", "stokes_map.json", "csi_map.json",
                             "thermal.json", "room_temperature.json", "analytic.json"}) {
        CAPTURE(name);
        CHECK_NOTHROW(resolve_config(load(name)));
    }
}

TEST_CASE("derived couplings unless overridden") {
    const ScenarioConfig c = resolve_config(json::object());
    CHECK(c.g_om_derived);
    CHECK(c.g_om == doctest::Approx(0.1000058670).epsilon(1e-9));
    const ScenarioConfig d = resolve_config({{"g_om", 0.1}, {"delta_c_prime", 15.0}});
    CHECK_FALSE(d.g_om_derived);
    CHECK(d.g_om == 0.1);
    CHECK(d.delta_c_prime == 15.0);
}

TEST_CASE("strict config validation") {
    CHECK_THROWS_AS(resolve_config({{"colour", "red"}}), ConfigError);
    CHECK_THROWS_AS(resolve_config({{"task", "movie"}}), ConfigError);
    CHECK_THROWS_AS(resolve_config({{"grid", json::array()}}), ConfigError);
    CHECK_THROWS_AS(resolve_config({{"grid", {{"min", 200.0}, {"max", 280.0}, {"count", 0}}}}), ConfigError);
    CHECK_THROWS_AS(resolve_config({{"grid", {200.0, 199.0}}}), ConfigError);
    CHECK_THROWS_AS(resolve_config({{"x_axis", {{"min", 1.0}, {"max", 2.0}}}}), ConfigError);
    CHECK_THROWS_AS(resolve_config({{"line", "rayleigh"}}), ConfigError);
    CHECK_THROWS_AS(resolve_config({{"workers", 0}}), ConfigError);
    CHECK_THROWS_AS(resolve_config({{"sensor", {{"epsilon_ratio", 0.2}}}}), ConfigError);
    CHECK_THROWS_AS(resolve_config({{"task", "csi-map"}, {"model", "bright"}}), ConfigError);
    CHECK_THROWS_AS(resolve_config({{"task", "ratio-map"}, {"model", "om"}}), ConfigError);
    CHECK_THROWS(resolve_config({{"params", {{"kappa", -3.0}}}}));
}

TEST_CASE("hash ignores execution-only fields and survives a round trip") {
    const ScenarioConfig a = resolve_config({{"workers", 1}, {"out", "a"}});
    const ScenarioConfig b = resolve_config({{"workers", 4}, {"out", "b"}});
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    const ScenarioConfig c = resolve_config({{"params", {{"Omega", 4.5}}}});
    CHECK(config_hash(a) != config_hash(c));
    const ScenarioConfig r = resolve_config(to_json(c));
    CHECK(config_hash(r) == config_hash(c));
    CHECK(r.params == c.params);
    CHECK(r.g_om == c.g_om);
}

TEST_CASE("analytic task output") {
    ScenarioConfig c = resolve_config(load("analytic.json"));
    c.out = temp_prefix("analytic");
    const RunReport r = run_task(c);
    REQUIRE(r.ok());
    const json j = json::parse(slurp(c.out + "_analytic.json"));
    CHECK(j["alpha_s_abs"].get<double>() == doctest::Approx(0.179).epsilon(0.01));
    CHECK(j["g_om_from_levels"].get<double>() == doctest::Approx(0.1).epsilon(0.05));
    CHECK(j["config_hash"] == r.config_hash);
    const std::string first = slurp(c.out + "_analytic.json");
    run_task(c);
    CHECK(slurp(c.out + "_analytic.json") == first);
}

TEST_CASE("zero couplings give an all-zero coefficient table") {
    ScenarioConfig c = resolve_config(
        {{"task", "analytic"}, {"g_om", 0.0}, {"n_v", 0.0}, {"params", {{"g_r", 0.0}, {"g0_r", 0.0}}}});
    c.out = temp_prefix("analytic_zero");
    const RunReport r = run_task(c);
    REQUIRE(r.ok());
    for (const char* k : {"C_off_S", "C_off_aS", "C_res_S", "C_res_aS", "xi_mean"}) {
        CHECK(r.summary[k][0].get<double>() == 0.0);
        CHECK(r.summary[k][1].get<double>() == 0.0);
    }
    CHECK(r.summary["S_theo_antistokes_peak"].get<double>() == 0.0);
}

TEST_CASE("spectrum task writes reproducible files") {
    json cfg = {{"task", "spectrum"},
                {"model", {"om", "om_res"}},
                {"g_om", 0.1},
                {"delta_c_prime", 15.0},
                {"grid", {{"min", 268.0}, {"max", 272.0}, {"count", 21}}},
                {"check_truncation", false},
                {"params", {{"trunc_cavity", 5}}}};
    cfg["out"] = temp_prefix("spec_a");
    ScenarioConfig a = resolve_config(cfg);
    cfg["out"] = temp_prefix("spec_b");
    cfg["workers"] = 3;
    ScenarioConfig b = resolve_config(cfg);
    const RunReport ra = run_task(a);
    const RunReport rb = run_task(b);
    REQUIRE(ra.ok());
    REQUIRE(rb.ok());
    CHECK(ra.files.size() == 4);
    for (const char* tail : {"_spectrum_om.csv", "_spectrum_om.json", "_spectrum_om_res.csv", "_spectrum_om_res.json"}) {
        CHECK(slurp(a.out + tail) == slurp(b.out + tail));
    }
    const std::string csv = slurp(a.out + "_spectrum_om.csv");
    CHECK(csv.rfind("# config_hash=" + ra.config_hash + "\nomega_THz,S\n", 0) == 0);
    const json side = json::parse(slurp(a.out + "_spectrum_om_res.json"));
    CHECK(side["config_hash"] == ra.config_hash);
    CHECK(side.contains("rayleigh_weight"));
    CHECK(side.contains("vibron_population"));
    CHECK(side.contains("cavity_population"));
    CHECK(side["peaks"].size() >= 2);
}

TEST_CASE("truncation flag is reported") {
    json cfg = {{"task", "spectrum"},
                {"model", "om"},
                {"g_om", 0.1},
                {"delta_c_prime", 15.0},
                {"grid", {269.9, 270.0, 270.1}},
                {"params", {{"trunc_cavity", 6}}},
                {"out", temp_prefix("trunc")}};
    const RunReport r = run_task(resolve_config(cfg));
    REQUIRE(r.ok());
    const json side = json::parse(slurp(temp_prefix("trunc") + "_spectrum_om.json"));
    CHECK(side["truncation"]["checked"] == true);
    CHECK(side["truncation"]["converged"] == true);
}

TEST_CASE("degenerate ratio map reduces to spectrum peak ratios") {
    const ScenarioConfig c = resolve_config({{"task", "ratio-map"},
                                             {"g_om", 0.1},
                                             {"x_axis", {255.0}},
                                             {"y_axis", {270.0}},
                                             {"params", {{"trunc_cavity", 6}}}});
    const RatioMapSet set = compute_ratio_maps(c);
    REQUIRE(set.numeric_vs_om.valid[0]);
    ModelParams p = c.params;
    p.omega_r = 270.0;
    const double w = p.omega_L + p.omega_v;
    const auto om = build_H_om(p, 0.1, 15.0);
    const auto res = build_H_res(p, 15.0);
    const auto tot = build_H_om_res(p, 0.1, 15.0);
    const double s_om = peak_value(om, steady_state(om), w).height;
    const double s_res = peak_value(res, steady_state(res), w).height;
    const double s_tot = peak_value(tot, steady_state(tot), w).height;
    CHECK(std::abs(set.numeric_vs_om.values[0] - std::log10(s_tot / s_om)) < 1e-12);
    CHECK(std::abs(set.numeric_vs_res.values[0] - std::log10(s_tot / s_res)) < 1e-12);
}

TEST_CASE("map comparison") {
    RatioMap a({1.0, 2.0}, {1.0, 2.0});
    RatioMap b({1.0, 2.0}, {1.0, 2.0});
    a.set(0, 0, 1.0);
    b.set(0, 0, 1.5);
    a.set(0, 1, -0.5);
    b.set(0, 1, 0.7);
    a.set(1, 0, 3.0);
    b.set(1, 0, 0.5);
    a.set(1, 1, 2.0);
    b.mask(1, 1, "failed");
    const MapAgreement m = compare_maps(a, b);
    CHECK(m.compared == 3);
    CHECK(m.sign_fraction == doctest::Approx(2.0 / 3.0));
    CHECK(m.decade_fraction == doctest::Approx(1.0 / 3.0));
    CHECK(b.masked_count() == 1);
    CHECK(std::isnan(b.values[b.index(1, 1)]));
}

TEST_CASE("failing cells produce an error record") {
    ScenarioConfig c = resolve_config({{"task", "csi-map"},
                                       {"model", "om"},
                                       {"x_axis", {255.0}},
                                       {"y_axis", {270.0}},
                                       {"params", {{"Omega", 0.0}, {"trunc_cavity", 4}}}});
    c.out = temp_prefix("csi_fail");
    const RunReport r = run_task(c);
    CHECK_FALSE(r.ok());
    REQUIRE(fs::exists(c.out + "_error.json"));
    const json e = json::parse(slurp(c.out + "_error.json"));
    CHECK(e["errors"].size() == 1);
    const std::string csv = slurp(c.out + "_csi_om.csv");
    CHECK(csv.find("255,270,,0") != std::string::npos);
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(std::nan("")) == "");
}
