#include "cactuss/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "cactuss/error.hpp"

namespace cactuss {

using nlohmann::json;

namespace {

void require_known(const json& j, const char* what, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw FormatError(std::string(what) + " must be a JSON object");
    for (const auto& [k, _] : j.items()) {
        bool ok = false;
        for (const char* key : keys) ok = ok || k == key;
        if (!ok) throw FormatError(std::string(what) + ": unknown field '" + k + "'");
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->template get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

ProbeConfig probe_from_json(const json& j) {
    require_known(j, "probe config",
                  {"probe_width", "probe_angle", "image_depth", "focus_depth", "scan_lines", "axial_resolution",
                   "center_frequency_mhz"});
    ProbeConfig p;
    read(j, "probe_width", p.probe_width);
    read(j, "probe_angle", p.probe_angle);
    read(j, "image_depth", p.image_depth);
    read(j, "focus_depth", p.focus_depth);
    read(j, "scan_lines", p.scan_lines);
    read(j, "axial_resolution", p.axial_resolution);
    read(j, "center_frequency_mhz", p.center_frequency_mhz);
    p.validate();
    return p;
}

json to_json(const ProbeConfig& p) {
    return {{"probe_width", p.probe_width},
            {"probe_angle", p.probe_angle},
            {"image_depth", p.image_depth},
            {"focus_depth", p.focus_depth},
            {"scan_lines", p.scan_lines},
            {"axial_resolution", p.axial_resolution},
            {"center_frequency_mhz", p.center_frequency_mhz}};
}

SimConfig sim_from_json(const json& j) {
    require_known(j, "sim config",
                  {"elevational_rays", "rf_noise", "scale_exponent_1", "scale_exponent_2", "tgc_alpha", "tgc_scale",
                   "mode", "rng_seed", "elevational_spread_deg"});
    SimConfig s;
    read(j, "elevational_rays", s.elevational_rays);
    read(j, "rf_noise", s.rf_noise);
    read(j, "scale_exponent_1", s.scale_exponent_1);
    read(j, "scale_exponent_2", s.scale_exponent_2);
    read(j, "tgc_alpha", s.tgc_alpha);
    read(j, "tgc_scale", s.tgc_scale);
    read(j, "rng_seed", s.rng_seed);
    read(j, "elevational_spread_deg", s.elevational_spread_deg);
    std::string mode = render_mode_name(s.mode);
    read(j, "mode", mode);
    s.mode = parse_render_mode(mode);
    s.validate();
    return s;
}

json to_json(const SimConfig& s) {
    return {{"elevational_rays", s.elevational_rays},
            {"rf_noise", s.rf_noise},
            {"scale_exponent_1", s.scale_exponent_1},
            {"scale_exponent_2", s.scale_exponent_2},
            {"tgc_alpha", s.tgc_alpha},
            {"tgc_scale", s.tgc_scale},
            {"mode", render_mode_name(s.mode)},
            {"rng_seed", s.rng_seed},
            {"elevational_spread_deg", s.elevational_spread_deg}};
}

PhantomSpec phantom_from_json(const json& j) {
    require_known(j, "phantom spec",
                  {"dims", "spacing", "layer_thicknesses", "aorta", "vertebra", "rng_seed", "perturbation"});
    PhantomSpec s;
    read(j, "dims", s.dims);
    read(j, "spacing", s.spacing);
    if (auto it = j.find("layer_thicknesses"); it != j.end()) {
        require_known(*it, "layer_thicknesses", {"skin", "fat", "muscle"});
        read(*it, "skin", s.layers.skin);
        read(*it, "fat", s.layers.fat);
        read(*it, "muscle", s.layers.muscle);
    }
    if (auto it = j.find("aorta"); it != j.end()) {
        require_known(*it, "aorta", {"center_mm", "diameter_mm", "axis"});
        read(*it, "center_mm", s.aorta.center_mm);
        read(*it, "diameter_mm", s.aorta.diameter_mm);
        std::string axis = "z";
        read(*it, "axis", axis);
        if (axis != "z") throw ValidationError("aorta axis must be z");
    }
    if (auto it = j.find("vertebra"); it != j.end()) {
        require_known(*it, "vertebra", {"center_mm", "radius_mm", "present"});
        read(*it, "center_mm", s.vertebra.center_mm);
        read(*it, "radius_mm", s.vertebra.radius_mm);
        read(*it, "present", s.vertebra.present);
    }
    read(j, "rng_seed", s.rng_seed);
    read(j, "perturbation", s.perturbation);
    s.validate();
    return s;
}

json to_json(const PhantomSpec& s) {
    return {{"dims", s.dims},
            {"spacing", s.spacing},
            {"layer_thicknesses", {{"skin", s.layers.skin}, {"fat", s.layers.fat}, {"muscle", s.layers.muscle}}},
            {"aorta", {{"center_mm", s.aorta.center_mm}, {"diameter_mm", s.aorta.diameter_mm}, {"axis", "z"}}},
            {"vertebra",
             {{"center_mm", s.vertebra.center_mm},
              {"radius_mm", s.vertebra.radius_mm},
              {"present", s.vertebra.present}}},
            {"rng_seed", s.rng_seed},
            {"perturbation", s.perturbation}};
}

AugmentConfig augment_from_json(const json& j) {
    require_known(j, "augment config", {"rotation_deg", "translation_frac", "scale_range", "noise_sd", "enabled"});
    AugmentConfig a;
    read(j, "rotation_deg", a.rotation_deg);
    read(j, "translation_frac", a.translation_frac);
    read(j, "scale_range", a.scale_range);
    read(j, "noise_sd", a.noise_sd);
    read(j, "enabled", a.enabled);
    a.validate();
    return a;
}

json to_json(const AugmentConfig& a) {
    return {{"rotation_deg", a.rotation_deg},
            {"translation_frac", a.translation_frac},
            {"scale_range", a.scale_range},
            {"noise_sd", a.noise_sd},
            {"enabled", a.enabled}};
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw FormatError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

}  // namespace cactuss
