#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "taxel/calibration.hpp"
#include "taxel/decoder.hpp"
#include "taxel/errors.hpp"
#include "taxel/physics.hpp"
#include "taxel/readout.hpp"

namespace taxel {

using nlohmann::json;

enum class Interpolation : std::uint8_t { Step, Linear };

/// One point of a stimulus timeline. Absent fields carry the previous
/// keyframe's value forward; on the first keyframe they mean "no stimulus".
/// Each axis is driven either by force or by displacement, never both.
struct Keyframe {
    double t_s = 0.0;
    std::optional<double> normal_force_n;
    std::optional<double> shear_force_x_n;
    std::optional<double> shear_force_y_n;
    std::optional<double> eta_mm;
    std::optional<double> lambda_x_mm;
    std::optional<double> lambda_y_mm;
    std::optional<double> distance_mm;
    std::optional<bool> grounded;
    std::optional<bool> ground_plane;

    bool operator==(const Keyframe&) const = default;
};

struct ScenarioConfig {
    SensorModel sensor{};
    NoiseModel noise{};
    CdcConfig cdc{};
    bool ground_plane = false;
    double ground_plane_leakage = 0.0;
    unsigned self_every = 1;
    double contact_area_mm2 = 196.0;
    ClassifierThresholds thresholds{};

    bool operator==(const ScenarioConfig&) const = default;
};

struct Scenario {
    std::string name;
    std::string description;
    Interpolation interpolation = Interpolation::Linear;
    ScenarioConfig config{};
    std::vector<Keyframe> keyframes;

    bool operator==(const Scenario&) const = default;

    /// Stimulus channels driven anywhere in the timeline:
    /// "normal", "shear_x", "shear_y", "proximity", "ground_plane".
    std::vector<std::string> stimulus_channels() const {
        bool normal = false, sx = false, sy = false, prox = false, gp = false;
        for (const auto& k : keyframes) {
            normal |= k.normal_force_n || k.eta_mm;
            sx |= k.shear_force_x_n || k.lambda_x_mm;
            sy |= k.shear_force_y_n || k.lambda_y_mm;
            prox |= k.distance_mm.has_value() || k.grounded.has_value();
            gp |= k.ground_plane.has_value();
        }
        std::vector<std::string> out;
        if (normal) out.emplace_back("normal");
        if (sx) out.emplace_back("shear_x");
        if (sy) out.emplace_back("shear_y");
        if (prox) out.emplace_back("proximity");
        if (gp) out.emplace_back("ground_plane");
        return out;
    }

    bool uses_ground_plane() const {
        if (config.ground_plane) {
            return true;
        }
        return std::any_of(keyframes.begin(), keyframes.end(),
                           [](const Keyframe& k) { return k.ground_plane.value_or(false); });
    }

    void validate() const;
};

// ---------------------------------------------------------------------------
// Timeline resolution

/// Dense per-keyframe values after carry-forward.
struct ResolvedKeyframe {
    double t_s = 0.0;
    bool normal_by_force = true;
    double normal = 0.0;  // N or mm
    bool shear_x_by_force = true;
    double shear_x = 0.0;
    bool shear_y_by_force = true;
    double shear_y = 0.0;
    double distance_mm = std::numeric_limits<double>::infinity();
    bool grounded = true;
    bool ground_plane = false;
};

namespace detail {

[[noreturn]] inline void keyframe_error(std::size_t i, const std::string& what) {
    throw ValidationError("keyframe " + std::to_string(i) + ": " + what);
}

}  // namespace detail

inline std::vector<ResolvedKeyframe> resolve_keyframes(const Scenario& sc) {
    if (sc.keyframes.empty()) {
        throw ValidationError("scenario '" + sc.name + "' has no keyframes");
    }
    // Each axis uses one representation across the whole timeline.
    auto mode_of = [&](auto force, auto disp, const char* axis) {
        bool any_force = false, any_disp = false;
        for (std::size_t i = 0; i < sc.keyframes.size(); ++i) {
            const auto& k = sc.keyframes[i];
            const bool f = (k.*force).has_value();
            const bool d = (k.*disp).has_value();
            if (f && d) {
                detail::keyframe_error(i, std::string(axis) + " given both as force and displacement");
            }
            any_force |= f;
            any_disp |= d;
        }
        if (any_force && any_disp) {
            throw ValidationError(std::string(axis) + " mixes force and displacement keyframes");
        }
        return !any_disp;
    };
    const bool normal_force = mode_of(&Keyframe::normal_force_n, &Keyframe::eta_mm, "normal");
    const bool sx_force = mode_of(&Keyframe::shear_force_x_n, &Keyframe::lambda_x_mm, "shear_x");
    const bool sy_force = mode_of(&Keyframe::shear_force_y_n, &Keyframe::lambda_y_mm, "shear_y");

    std::vector<ResolvedKeyframe> out;
    ResolvedKeyframe cur;
    cur.normal_by_force = normal_force;
    cur.shear_x_by_force = sx_force;
    cur.shear_y_by_force = sy_force;
    cur.ground_plane = sc.config.ground_plane;
    for (std::size_t i = 0; i < sc.keyframes.size(); ++i) {
        const auto& k = sc.keyframes[i];
        if (!std::isfinite(k.t_s)) {
            detail::keyframe_error(i, "time must be finite");
        }
        if (i > 0 && !(k.t_s > sc.keyframes[i - 1].t_s)) {
            detail::keyframe_error(i, "times must be strictly increasing");
        }
        cur.t_s = k.t_s;
        if (auto v = normal_force ? k.normal_force_n : k.eta_mm) cur.normal = *v;
        if (auto v = sx_force ? k.shear_force_x_n : k.lambda_x_mm) cur.shear_x = *v;
        if (auto v = sy_force ? k.shear_force_y_n : k.lambda_y_mm) cur.shear_y = *v;
        if (k.distance_mm) {
            if (!(*k.distance_mm >= 0.0)) {
                detail::keyframe_error(i, "distance_mm must be >= 0");
            }
            cur.distance_mm = *k.distance_mm;
        }
        if (k.grounded) cur.grounded = *k.grounded;
        if (k.ground_plane) cur.ground_plane = *k.ground_plane;
        out.push_back(cur);
    }
    return out;
}

/// Quasi-static deformation described by a resolved keyframe.
inline DeformationState static_deformation(const ResolvedKeyframe& k, const ScenarioConfig& cfg) {
    const auto& g = cfg.sensor.geometry;
    const auto& m = cfg.sensor.material;
    DeformationState def;
    if (k.normal_by_force) {
        AppliedLoad load;
        load.normal_n = k.normal;
        load.contact_area_mm2 = cfg.contact_area_mm2;
        def.eta_mm = displacement_from_forces(m, g, load).eta_mm;
    } else {
        def.eta_mm = k.normal;
    }
    def.lambda_x_mm = k.shear_x_by_force ? shear_displacement_from_force(m, k.shear_x) : k.shear_x;
    def.lambda_y_mm = k.shear_y_by_force ? shear_displacement_from_force(m, k.shear_y) : k.shear_y;
    def.validate(g);
    return def;
}

inline void Scenario::validate() const {
    if (name.empty()) {
        throw ValidationError("scenario needs a name");
    }
    config.sensor.validate();
    config.noise.validate();
    config.cdc.validate();
    config.thresholds.validate();
    if (!(config.contact_area_mm2 > 0.0)) {
        throw ValidationError("contact area must be positive");
    }
    MuxSchedule probe = MuxSchedule::with_self(config.self_every);
    probe.ground_plane_leakage = config.ground_plane_leakage;
    probe.validate();
    const auto resolved = resolve_keyframes(*this);
    for (std::size_t i = 0; i < resolved.size(); ++i) {
        try {
            (void)static_deformation(resolved[i], config);
        } catch (const Error& e) {
            detail::keyframe_error(i, e.what());
        }
    }
}

/// Stimulus at time t, interpolated between resolved keyframes.
inline ResolvedKeyframe interpolate(const std::vector<ResolvedKeyframe>& ks, Interpolation mode,
                                    double t) {
    if (t <= ks.front().t_s) {
        ResolvedKeyframe k = ks.front();
        k.t_s = t;
        return k;
    }
    if (t >= ks.back().t_s) {
        ResolvedKeyframe k = ks.back();
        k.t_s = t;
        return k;
    }
    const auto it = std::upper_bound(ks.begin(), ks.end(), t,
                                     [](double v, const ResolvedKeyframe& k) { return v < k.t_s; });
    const ResolvedKeyframe& a = *(it - 1);
    const ResolvedKeyframe& b = *it;
    ResolvedKeyframe out = a;
    out.t_s = t;
    if (mode == Interpolation::Linear) {
        const double w = (t - a.t_s) / (b.t_s - a.t_s);
        auto lerp = [w](double x, double y) { return x + w * (y - x); };
        out.normal = lerp(a.normal, b.normal);
        out.shear_x = lerp(a.shear_x, b.shear_x);
        out.shear_y = lerp(a.shear_y, b.shear_y);
        if (std::isfinite(a.distance_mm) && std::isfinite(b.distance_mm) && a.grounded == b.grounded) {
            out.distance_mm = lerp(a.distance_mm, b.distance_mm);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON schema

namespace detail {

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what) {
    throw ValidationError("schema error at " + (path.empty() ? std::string("/") : path) + ": " + what);
}

inline std::string child(const std::string& path, std::string_view key) {
    return path + "/" + std::string(key);
}

inline void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) {
        schema_error(path, "expected object");
    }
}

inline void allow_keys(const json& j, std::initializer_list<std::string_view> keys,
                       const std::string& path) {
    require_object(j, path);
    for (const auto& [k, v] : j.items()) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
            schema_error(child(path, k), "unknown key");
        }
    }
}

inline double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) {
        schema_error(path, "expected number");
    }
    return j.get<double>();
}

inline void read_number(const json& obj, std::string_view key, double& out, const std::string& path) {
    if (auto it = obj.find(std::string(key)); it != obj.end()) {
        out = as_number(*it, child(path, key));
    }
}

inline void read_bool(const json& obj, std::string_view key, bool& out, const std::string& path) {
    if (auto it = obj.find(std::string(key)); it != obj.end()) {
        if (!it->is_boolean()) {
            schema_error(child(path, key), "expected boolean");
        }
        out = it->get<bool>();
    }
}

inline void read_unsigned(const json& obj, std::string_view key, unsigned& out, const std::string& path) {
    if (auto it = obj.find(std::string(key)); it != obj.end()) {
        if (!it->is_number_unsigned()) {
            schema_error(child(path, key), "expected non-negative integer");
        }
        out = it->get<unsigned>();
    }
}

inline std::optional<double> opt_number(const json& obj, std::string_view key, const std::string& path) {
    if (auto it = obj.find(std::string(key)); it != obj.end() && !it->is_null()) {
        return as_number(*it, child(path, key));
    }
    return std::nullopt;
}

inline std::optional<bool> opt_bool(const json& obj, std::string_view key, const std::string& path) {
    if (auto it = obj.find(std::string(key)); it != obj.end() && !it->is_null()) {
        if (!it->is_boolean()) {
            schema_error(child(path, key), "expected boolean");
        }
        return it->get<bool>();
    }
    return std::nullopt;
}

inline std::string preset_name(const json& j, const std::string& path) {
    if (!j.is_string()) {
        schema_error(path, "expected preset name or object");
    }
    return j.get<std::string>();
}

inline MaterialModel material_from_json(const json& j, const std::string& path) {
    if (j.is_string()) {
        const auto n = preset_name(j, path);
        if (n == "paper") return paper_material();
        if (n == "paper_line_fit") return paper_material(TaxelGeometry{}, SensitivityTarget::line_fit());
        schema_error(path, "unknown material preset '" + n + "'");
    }
    allow_keys(j, {"e1_kpa", "e2_kpa", "strain_break", "strain_max", "shear_compliance_mm_per_n",
                   "shear_max_mm", "damping_kpa_s"}, path);
    MaterialModel m = paper_material();
    read_number(j, "e1_kpa", m.e1_kpa, path);
    read_number(j, "e2_kpa", m.e2_kpa, path);
    read_number(j, "strain_break", m.strain_break, path);
    read_number(j, "strain_max", m.strain_max, path);
    read_number(j, "shear_compliance_mm_per_n", m.shear_compliance_mm_per_n, path);
    read_number(j, "shear_max_mm", m.shear_max_mm, path);
    read_number(j, "damping_kpa_s", m.damping_kpa_s, path);
    return m;
}

inline ProximityParams proximity_from_json(const json& j, const std::string& path) {
    if (j.is_string()) {
        const auto n = preset_name(j, path);
        if (n == "finger_approach") return ProximityParams::finger_approach();
        if (n == "light_contact") return ProximityParams::light_contact();
        schema_error(path, "unknown proximity preset '" + n + "'");
    }
    allow_keys(j, {"z_max_mm", "delta_contact", "decay_mm", "insulator_rise"}, path);
    ProximityParams p;
    read_number(j, "z_max_mm", p.z_max_mm, path);
    read_number(j, "delta_contact", p.delta_contact, path);
    read_number(j, "decay_mm", p.decay_mm, path);
    read_number(j, "insulator_rise", p.insulator_rise, path);
    return p;
}

inline ParasiticModel parasitics_from_json(const json& j, const std::string& path, double c0) {
    if (j.is_string()) {
        const auto n = preset_name(j, path);
        if (n == "none") return ParasiticModel::none();
        if (n == "unshielded") return ParasiticModel::unshielded(c0);
        if (n == "shielded") return ParasiticModel::shielded_preset(c0);
        schema_error(path, "unknown parasitics preset '" + n + "'");
    }
    allow_keys(j, {"offsets_pf", "shielded"}, path);
    ParasiticModel p;
    if (auto it = j.find("offsets_pf"); it != j.end()) {
        const auto op = child(path, "offsets_pf");
        if (!it->is_array() || it->size() != 4) {
            schema_error(op, "expected array of 4 numbers");
        }
        for (std::size_t i = 0; i < 4; ++i) {
            p.offsets_pf[i] = as_number((*it)[i], child(op, std::to_string(i)));
        }
    }
    read_bool(j, "shielded", p.shielded, path);
    return p;
}

inline ScenarioConfig config_from_json(const json& j, const std::string& path) {
    allow_keys(j, {"geometry", "material", "proximity", "self_cap", "parasitics", "crosstalk", "noise",
                   "cdc", "ground_plane", "ground_plane_leakage", "self_every", "contact_area_mm2",
                   "thresholds"}, path);
    ScenarioConfig c;
    if (auto it = j.find("geometry"); it != j.end()) {
        const auto p = child(path, "geometry");
        allow_keys(*it, {"gap_mm", "overlap_length_mm", "overlap_width_mm", "eps_w_pf"}, p);
        read_number(*it, "gap_mm", c.sensor.geometry.gap_mm, p);
        read_number(*it, "overlap_length_mm", c.sensor.geometry.overlap_length_mm, p);
        read_number(*it, "overlap_width_mm", c.sensor.geometry.overlap_width_mm, p);
        read_number(*it, "eps_w_pf", c.sensor.geometry.eps_w_pf, p);
    }
    if (auto it = j.find("material"); it != j.end()) {
        c.sensor.material = material_from_json(*it, child(path, "material"));
    }
    if (auto it = j.find("proximity"); it != j.end()) {
        c.sensor.proximity = proximity_from_json(*it, child(path, "proximity"));
    }
    if (auto it = j.find("self_cap"); it != j.end()) {
        const auto p = child(path, "self_cap");
        allow_keys(*it, {"baseline_pf", "delta_contact_pf", "z_max_mm", "decay_mm"}, p);
        read_number(*it, "baseline_pf", c.sensor.self_cap.baseline_pf, p);
        read_number(*it, "delta_contact_pf", c.sensor.self_cap.delta_contact_pf, p);
        read_number(*it, "z_max_mm", c.sensor.self_cap.z_max_mm, p);
        read_number(*it, "decay_mm", c.sensor.self_cap.decay_mm, p);
    }
    if (auto it = j.find("parasitics"); it != j.end()) {
        c.sensor.parasitics = parasitics_from_json(*it, child(path, "parasitics"),
                                                   c.sensor.geometry.baseline_pf());
    }
    if (auto it = j.find("crosstalk"); it != j.end()) {
        const auto p = child(path, "crosstalk");
        allow_keys(*it, {"xy_coupling"}, p);
        read_number(*it, "xy_coupling", c.sensor.crosstalk.xy_coupling, p);
    }
    if (auto it = j.find("noise"); it != j.end()) {
        const auto p = child(path, "noise");
        allow_keys(*it, {"sigma_pf", "seed"}, p);
        read_number(*it, "sigma_pf", c.noise.sigma_pf, p);
        if (auto s = it->find("seed"); s != it->end()) {
            if (!s->is_number_unsigned()) {
                schema_error(child(p, "seed"), "expected non-negative integer");
            }
            c.noise.seed = s->get<std::uint64_t>();
        }
    }
    if (auto it = j.find("cdc"); it != j.end()) {
        const auto p = child(path, "cdc");
        allow_keys(*it, {"lsb_ff", "sample_period_s", "full_scale_pf"}, p);
        read_number(*it, "lsb_ff", c.cdc.lsb_ff, p);
        read_number(*it, "sample_period_s", c.cdc.sample_period_s, p);
        read_number(*it, "full_scale_pf", c.cdc.full_scale_pf, p);
    }
    read_bool(j, "ground_plane", c.ground_plane, path);
    read_number(j, "ground_plane_leakage", c.ground_plane_leakage, path);
    read_unsigned(j, "self_every", c.self_every, path);
    read_number(j, "contact_area_mm2", c.contact_area_mm2, path);
    if (auto it = j.find("thresholds"); it != j.end()) {
        const auto p = child(path, "thresholds");
        allow_keys(*it, {"epsilon_rel", "proximity_band_min", "proximity_band_max", "self_presence_rel",
                         "self_contact_rel"}, p);
        read_number(*it, "epsilon_rel", c.thresholds.epsilon_rel, p);
        read_number(*it, "proximity_band_min", c.thresholds.proximity_band_min, p);
        read_number(*it, "proximity_band_max", c.thresholds.proximity_band_max, p);
        read_number(*it, "self_presence_rel", c.thresholds.self_presence_rel, p);
        read_number(*it, "self_contact_rel", c.thresholds.self_contact_rel, p);
    }
    return c;
}

inline Keyframe keyframe_from_json(const json& j, const std::string& path) {
    allow_keys(j, {"t", "normal_force_n", "shear_force_x_n", "shear_force_y_n", "eta_mm", "lambda_x_mm",
                   "lambda_y_mm", "distance_mm", "grounded", "ground_plane"}, path);
    Keyframe k;
    auto t = j.find("t");
    if (t == j.end()) {
        schema_error(child(path, "t"), "missing required key");
    }
    k.t_s = as_number(*t, child(path, "t"));
    k.normal_force_n = opt_number(j, "normal_force_n", path);
    k.shear_force_x_n = opt_number(j, "shear_force_x_n", path);
    k.shear_force_y_n = opt_number(j, "shear_force_y_n", path);
    k.eta_mm = opt_number(j, "eta_mm", path);
    k.lambda_x_mm = opt_number(j, "lambda_x_mm", path);
    k.lambda_y_mm = opt_number(j, "lambda_y_mm", path);
    k.distance_mm = opt_number(j, "distance_mm", path);
    k.grounded = opt_bool(j, "grounded", path);
    k.ground_plane = opt_bool(j, "ground_plane", path);
    return k;
}

}  // namespace detail

/// Parses and validates a scenario document.
inline Scenario scenario_from_json(const json& j) {
    using namespace detail;
    allow_keys(j, {"name", "description", "interpolation", "config", "keyframes"}, "");
    Scenario sc;
    auto name = j.find("name");
    if (name == j.end() || !name->is_string()) {
        schema_error("/name", "expected string");
    }
    sc.name = name->get<std::string>();
    if (auto d = j.find("description"); d != j.end()) {
        if (!d->is_string()) {
            schema_error("/description", "expected string");
        }
        sc.description = d->get<std::string>();
    }
    if (auto it = j.find("interpolation"); it != j.end()) {
        const std::string v = it->is_string() ? it->get<std::string>() : "";
        if (v == "linear") {
            sc.interpolation = Interpolation::Linear;
        } else if (v == "step") {
            sc.interpolation = Interpolation::Step;
        } else {
            schema_error("/interpolation", "expected \"linear\" or \"step\"");
        }
    }
    if (auto it = j.find("config"); it != j.end()) {
        sc.config = config_from_json(*it, "/config");
    }
    auto kf = j.find("keyframes");
    if (kf == j.end() || !kf->is_array()) {
        schema_error("/keyframes", "expected array");
    }
    for (std::size_t i = 0; i < kf->size(); ++i) {
        sc.keyframes.push_back(keyframe_from_json((*kf)[i], "/keyframes/" + std::to_string(i)));
    }
    sc.validate();
    return sc;
}

/// Fully expanded document; presets are written out as objects.
inline json scenario_to_json(const Scenario& sc) {
    const auto& s = sc.config.sensor;
    json cfg;
    cfg["geometry"] = {{"gap_mm", s.geometry.gap_mm},
                       {"overlap_length_mm", s.geometry.overlap_length_mm},
                       {"overlap_width_mm", s.geometry.overlap_width_mm},
                       {"eps_w_pf", s.geometry.eps_w_pf}};
    cfg["material"] = {{"e1_kpa", s.material.e1_kpa},
                       {"e2_kpa", s.material.e2_kpa},
                       {"strain_break", s.material.strain_break},
                       {"strain_max", s.material.strain_max},
                       {"shear_compliance_mm_per_n", s.material.shear_compliance_mm_per_n},
                       {"shear_max_mm", s.material.shear_max_mm},
                       {"damping_kpa_s", s.material.damping_kpa_s}};
    cfg["proximity"] = {{"z_max_mm", s.proximity.z_max_mm},
                        {"delta_contact", s.proximity.delta_contact},
                        {"decay_mm", s.proximity.decay_mm},
                        {"insulator_rise", s.proximity.insulator_rise}};
    cfg["self_cap"] = {{"baseline_pf", s.self_cap.baseline_pf},
                       {"delta_contact_pf", s.self_cap.delta_contact_pf},
                       {"z_max_mm", s.self_cap.z_max_mm},
                       {"decay_mm", s.self_cap.decay_mm}};
    cfg["parasitics"] = {{"offsets_pf", s.parasitics.offsets_pf}, {"shielded", s.parasitics.shielded}};
    cfg["crosstalk"] = {{"xy_coupling", s.crosstalk.xy_coupling}};
    cfg["noise"] = {{"sigma_pf", sc.config.noise.sigma_pf}, {"seed", sc.config.noise.seed}};
    cfg["cdc"] = {{"lsb_ff", sc.config.cdc.lsb_ff},
                  {"sample_period_s", sc.config.cdc.sample_period_s},
                  {"full_scale_pf", sc.config.cdc.full_scale_pf}};
    cfg["ground_plane"] = sc.config.ground_plane;
    cfg["ground_plane_leakage"] = sc.config.ground_plane_leakage;
    cfg["self_every"] = sc.config.self_every;
    cfg["contact_area_mm2"] = sc.config.contact_area_mm2;
    const auto& th = sc.config.thresholds;
    cfg["thresholds"] = {{"epsilon_rel", th.epsilon_rel},
                         {"proximity_band_min", th.proximity_band_min},
                         {"proximity_band_max", th.proximity_band_max},
                         {"self_presence_rel", th.self_presence_rel},
                         {"self_contact_rel", th.self_contact_rel}};

    json frames = json::array();
    for (const auto& k : sc.keyframes) {
        json f;
        f["t"] = k.t_s;
        auto put = [&](const char* key, const auto& v) {
            if (v) f[key] = *v;
        };
        put("normal_force_n", k.normal_force_n);
        put("shear_force_x_n", k.shear_force_x_n);
        put("shear_force_y_n", k.shear_force_y_n);
        put("eta_mm", k.eta_mm);
        put("lambda_x_mm", k.lambda_x_mm);
        put("lambda_y_mm", k.lambda_y_mm);
        put("distance_mm", k.distance_mm);
        put("grounded", k.grounded);
        put("ground_plane", k.ground_plane);
        frames.push_back(std::move(f));
    }
    json out;
    out["name"] = sc.name;
    if (!sc.description.empty()) {
        out["description"] = sc.description;
    }
    out["interpolation"] = sc.interpolation == Interpolation::Linear ? "linear" : "step";
    out["config"] = std::move(cfg);
    out["keyframes"] = std::move(frames);
    return out;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open scenario file '" + path + "'");
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("scenario file '" + path + "' is not valid JSON: " + e.what());
    }
    return scenario_from_json(j);
}

inline void save_scenario(const Scenario& sc, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write scenario file '" + path + "'");
    }
    out << scenario_to_json(sc).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Built-in timelines

namespace detail {

inline Scenario builtin(std::string name, std::string description, std::vector<Keyframe> frames,
                        Interpolation mode = Interpolation::Linear) {
    Scenario sc;
    sc.name = std::move(name);
    sc.description = std::move(description);
    sc.interpolation = mode;
    sc.config.noise = NoiseModel{0.002, 42};
    sc.keyframes = std::move(frames);
    return sc;
}

}  // namespace detail

/// Scenarios covering every truth-table row plus a combined three-axis load.
inline std::vector<Scenario> builtin_scenarios() {
    using detail::builtin;
    std::vector<Scenario> out;
    auto kf = [](double t) {
        Keyframe k;
        k.t_s = t;
        return k;
    };
    {
        Keyframe a = kf(0.0), b = kf(1.0);
        out.push_back(builtin("idle", "No stimulus; decoded values stay at the noise floor.", {a, b}));
    }
    {
        Keyframe a = kf(0.0), b = kf(2.0), c = kf(2.5), d = kf(3.5), e = kf(4.0);
        a.distance_mm = 15.0;
        a.normal_force_n = 0.0;
        b.distance_mm = 0.0;
        c.distance_mm = 0.0;
        d.normal_force_n = 0.2;
        e.normal_force_n = 0.2;
        out.push_back(builtin("approach_touch", "Finger approaches from 15 mm, touches, then presses lightly.",
                              {a, b, c, d, e}));
    }
    {
        Keyframe a = kf(0.0), b = kf(2.0), c = kf(3.0);
        a.distance_mm = 15.0;
        b.distance_mm = 0.0;
        out.push_back(builtin("light_touch", "Finger approaches and rests on the surface.", {a, b, c}));
    }
    {
        Keyframe a = kf(0.0), b = kf(1.0), c = kf(2.0);
        a.normal_force_n = 0.0;
        b.normal_force_n = 0.98;  // 5 kPa over the 14 x 14 mm indenter
        out.push_back(builtin("press_5kPa", "Normal press to 5 kPa, then hold.", {a, b, c}));
    }
    struct ShearCase {
        const char* name;
        double fx, fy;
    };
    for (const auto& s : {ShearCase{"shear_px", 0.4, 0.0}, ShearCase{"shear_nx", -0.4, 0.0},
                          ShearCase{"shear_py", 0.0, 0.4}, ShearCase{"shear_ny", 0.0, -0.4}}) {
        Keyframe a = kf(0.0), b = kf(1.0), c = kf(2.0);
        if (s.fx != 0.0) {
            a.shear_force_x_n = 0.0;
            b.shear_force_x_n = s.fx;
        } else {
            a.shear_force_y_n = 0.0;
            b.shear_force_y_n = s.fy;
        }
        out.push_back(builtin(s.name, "Pure shear of 0.4 N, then hold.", {a, b, c}));
    }
    {
        Keyframe a = kf(0.0), b = kf(2.0), c = kf(3.0), d = kf(4.0), e = kf(4.5);
        a.normal_force_n = 0.0;
        a.shear_force_x_n = 0.0;
        a.shear_force_y_n = 0.0;
        b.normal_force_n = 1.5;
        b.shear_force_x_n = 0.3;
        b.shear_force_y_n = 0.2;
        d.normal_force_n = 0.0;
        d.shear_force_x_n = 0.0;
        d.shear_force_y_n = 0.0;
        out.push_back(builtin("strawberry", "Simultaneous normal and two-axis shear ramps, hold, release.",
                              {a, b, c, d, e}));
    }
    return out;
}

inline Scenario find_builtin(std::string_view name) {
    for (auto& s : builtin_scenarios()) {
        if (s.name == name) {
            return s;
        }
    }
    throw ValidationError("no built-in scenario named '" + std::string(name) + "'");
}

}  // namespace taxel
