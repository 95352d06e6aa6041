#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "taxel/errors.hpp"
#include "taxel/run.hpp"

namespace taxel {

inline constexpr std::array<std::string_view, 14> kCsvColumns{
    "t", "C1", "C2", "C3", "C4", "self_cap", "normal_strain", "shear_x", "shear_y",
    "shear_mag", "shear_angle", "pressure_kPa", "shear_N", "class"};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace detail

inline void write_csv_header(std::ostream& os) {
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
        os << (i ? "," : "") << kCsvColumns[i];
    }
    os << '\n';
}

inline std::string csv_row(const RunStep& s) {
    using detail::num;
    std::string row = num(s.t_s);
    for (double c : s.frame.c_pf) {
        row += ',' + num(c);
    }
    row += ',';
    if (s.self_cap_pf) {
        row += num(*s.self_cap_pf);
    }
    const auto& d = s.decoded;
    for (double v : {d.normal_strain, d.shear_x_mm, d.shear_y_mm, d.shear_magnitude_mm, d.shear_angle_deg,
                     d.pressure_kpa, d.shear_force_n}) {
        row += ',' + num(v);
    }
    row += ',' + d.stimulus.label();
    return row;
}

inline void write_csv(std::ostream& os, const RunReport& r) {
    write_csv_header(os);
    for (const auto& s : r.steps) {
        os << csv_row(s) << '\n';
    }
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json report_to_json(const RunReport& r) {
    using nlohmann::json;
    json steps = json::array();
    for (const auto& s : r.steps) {
        const auto& d = s.decoded;
        json j;
        j["t"] = s.t_s;
        j["frame_t"] = s.frame.t_s;
        j["c_pf"] = s.frame.c_pf;
        j["self_cap_pf"] = s.self_cap_pf ? json(*s.self_cap_pf) : json(nullptr);
        j["decoded"] = {{"normal_strain", d.normal_strain},
                        {"shear_x_mm", d.shear_x_mm},
                        {"shear_y_mm", d.shear_y_mm},
                        {"shear_strain_x", d.shear_strain_x},
                        {"shear_strain_y", d.shear_strain_y},
                        {"shear_magnitude_mm", d.shear_magnitude_mm},
                        {"shear_angle_deg", d.shear_angle_deg},
                        {"pressure_kpa", d.pressure_kpa},
                        {"shear_force_n", d.shear_force_n},
                        {"saturated", d.saturated},
                        {"class", d.stimulus.label()}};
        steps.push_back(std::move(j));
    }
    json out;
    out["scenario"] = r.scenario;
    out["seed"] = r.seed;
    out["step_dt_s"] = r.step_dt_s;
    out["baseline"] = {{"t", r.baseline.t_s}, {"c_pf", r.baseline.c_pf}};
    out["baseline_self_pf"] = r.baseline_self_pf ? json(*r.baseline_self_pf) : json(nullptr);
    out["steps"] = std::move(steps);
    out["summary"] = {{"max_pressure_kpa", r.summary.max_pressure_kpa},
                      {"max_shear_mm", r.summary.max_shear_mm},
                      {"max_shear_n", r.summary.max_shear_n},
                      {"saturated_steps", r.summary.saturated_steps},
                      {"class_sequence", r.summary.class_sequence}};
    out["warnings"] = r.warnings;
    return out;
}

inline RunReport report_from_json(const nlohmann::json& j) {
    try {
        RunReport r;
        r.scenario = j.at("scenario").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.step_dt_s = j.at("step_dt_s").get<double>();
        r.baseline = CapacitanceFrame::mutual(j.at("baseline").at("t").get<double>(),
                                              j.at("baseline").at("c_pf").get<Quad>());
        if (!j.at("baseline_self_pf").is_null()) {
            r.baseline_self_pf = j.at("baseline_self_pf").get<double>();
        }
        for (const auto& s : j.at("steps")) {
            RunStep st;
            st.t_s = s.at("t").get<double>();
            st.frame = CapacitanceFrame::mutual(s.at("frame_t").get<double>(), s.at("c_pf").get<Quad>());
            if (!s.at("self_cap_pf").is_null()) {
                st.self_cap_pf = s.at("self_cap_pf").get<double>();
            }
            const auto& d = s.at("decoded");
            st.decoded.normal_strain = d.at("normal_strain").get<double>();
            st.decoded.shear_x_mm = d.at("shear_x_mm").get<double>();
            st.decoded.shear_y_mm = d.at("shear_y_mm").get<double>();
            st.decoded.shear_strain_x = d.at("shear_strain_x").get<double>();
            st.decoded.shear_strain_y = d.at("shear_strain_y").get<double>();
            st.decoded.shear_magnitude_mm = d.at("shear_magnitude_mm").get<double>();
            st.decoded.shear_angle_deg = d.at("shear_angle_deg").get<double>();
            st.decoded.pressure_kpa = d.at("pressure_kpa").get<double>();
            st.decoded.shear_force_n = d.at("shear_force_n").get<double>();
            st.decoded.saturated = d.at("saturated").get<bool>();
            st.decoded.stimulus = StimulusClass::parse(d.at("class").get<std::string>());
            r.steps.push_back(std::move(st));
        }
        const auto& sm = j.at("summary");
        r.summary.max_pressure_kpa = sm.at("max_pressure_kpa").get<double>();
        r.summary.max_shear_mm = sm.at("max_shear_mm").get<double>();
        r.summary.max_shear_n = sm.at("max_shear_n").get<double>();
        r.summary.saturated_steps = sm.at("saturated_steps").get<std::size_t>();
        r.summary.class_sequence = sm.at("class_sequence").get<std::vector<std::string>>();
        r.warnings = j.at("warnings").get<std::vector<std::string>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed report JSON: ") + e.what());
    }
}

enum class ExportFormat { Csv, Json };

inline void export_report(const RunReport& r, ExportFormat fmt, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    if (fmt == ExportFormat::Csv) {
        write_csv(out, r);
    } else {
        out << report_to_json(r).dump(2) << '\n';
    }
    if (!out) {
        throw Error("write to '" + path + "' failed");
    }
}

}  // namespace taxel
