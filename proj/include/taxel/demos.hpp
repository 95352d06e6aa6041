#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "taxel/errors.hpp"
#include "taxel/physics.hpp"
#include "taxel/run.hpp"
#include "taxel/scenario.hpp"

namespace taxel {

inline constexpr double kGravity = 9.81;

// ---------------------------------------------------------------------------
// Gripper: a cup held between two taxels while water is poured in.

struct GripperParams {
    double ramp_g_per_s = 20.0;
    double final_mass_g = 80.0;
    double friction = 0.5;
    double grip_force_n = 1.0;
    double hold_s = 0.5;
    NoiseModel noise{};

    void validate() const {
        if (!(ramp_g_per_s > 0.0 && final_mass_g > 0.0 && friction > 0.0 && grip_force_n > 0.0)) {
            throw ValidationError("gripper parameters must be positive");
        }
        if (!(hold_s >= 0.0)) {
            throw ValidationError("gripper hold time must be >= 0");
        }
    }
};

/// Tangential load carried by one taxel; the two fingers share it equally.
inline double gripper_tangential_n(double mass_g) { return 0.5 * mass_g * 1e-3 * kGravity; }

struct GripperResult {
    RunReport report;
    std::vector<double> mass_g;  // per step
};

inline Scenario gripper_scenario(const GripperParams& p) {
    p.validate();
    Scenario sc;
    sc.name = "gripper";
    sc.description = "Cup held at constant grip while its mass ramps up; gravity loads -Y shear.";
    sc.config.noise = p.noise;
    const double t_ramp = p.final_mass_g / p.ramp_g_per_s;
    Keyframe a, b, c;
    a.t_s = 0.0;
    a.normal_force_n = p.grip_force_n;
    a.shear_force_y_n = 0.0;
    b.t_s = t_ramp;
    b.shear_force_y_n = -gripper_tangential_n(p.final_mass_g);
    sc.keyframes = {a, b};
    if (p.hold_s > 0.0) {
        c.t_s = t_ramp + p.hold_s;
        sc.keyframes.push_back(c);
    }
    return sc;
}

inline GripperResult gripper_demo(const GripperParams& p = {}) {
    const Scenario sc = gripper_scenario(p);
    GripperResult out;
    out.report = run(sc);
    for (const auto& s : out.report.steps) {
        out.mass_g.push_back(std::min(p.final_mass_g, p.ramp_g_per_s * std::max(0.0, s.t_s)));
    }
    const double required = gripper_tangential_n(p.final_mass_g);
    if (required > p.friction * p.grip_force_n) {
        out.report.warnings.push_back("slip warning: tangential load " + std::to_string(required) +
                                      " N exceeds friction limit " +
                                      std::to_string(p.friction * p.grip_force_n) + " N");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Proximity versus light press.
//
// Case A: a finger approaches to a few millimetres, hovers, retracts.
// Case B: a finger touches and presses just enough that the pressure rise
// cancels part of the contact drop. Both hold segments give the same mutual
// signature; the ground plane plus a SELF read separates them.

struct AmbiguityParams {
    double hover_mm = 2.0;
    NoiseModel noise{};
};

struct AmbiguityCase {
    RunReport report;
    RunStep segment;  // step in the middle of the hold
};

struct AmbiguityResult {
    AmbiguityCase mutual_a, mutual_b;
    AmbiguityCase augmented_a, augmented_b;
    double press_eta_mm = 0.0;

    /// Largest per-channel difference between the two mutual-only segments.
    double signature_gap_pf() const {
        double gap = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            gap = std::max(gap, std::abs(mutual_a.segment.frame.c_pf[i] - mutual_b.segment.frame.c_pf[i]));
        }
        return gap;
    }
    bool collision() const { return mutual_a.segment.decoded.stimulus == mutual_b.segment.decoded.stimulus; }
    bool resolved() const {
        return augmented_a.segment.decoded.stimulus.kind == StimulusKind::Proximity &&
               augmented_b.segment.decoded.stimulus.kind == StimulusKind::Pressure;
    }
};

/// Press depth that makes a touching finger read like one hovering at
/// `hover_mm`: C0 f_contact / (1 - eta/d) = C0 f_hover.
inline double ambiguity_press_eta(const SensorModel& s, double hover_mm) {
    const double f_hover = proximity_factor(ProximityStimulus::finger(hover_mm), s.proximity);
    const double f_contact = proximity_factor(ProximityStimulus::finger(0.0), s.proximity);
    return s.geometry.gap_mm * (1.0 - f_contact / f_hover);
}

namespace detail {

inline Scenario ambiguity_case_a(double hover_mm) {
    Scenario sc;
    sc.name = "ambiguity_a";
    sc.description = "Approach to hover, hold, retract.";
    Keyframe k0, k1, k2, k3;
    k0.t_s = 0.0;
    k0.distance_mm = 15.0;
    k1.t_s = 1.0;
    k1.distance_mm = hover_mm;
    k2.t_s = 2.0;
    k3.t_s = 3.0;
    k3.distance_mm = 15.0;
    sc.keyframes = {k0, k1, k2, k3};
    return sc;
}

inline Scenario ambiguity_case_b(double eta_mm) {
    Scenario sc;
    sc.name = "ambiguity_b";
    sc.description = "Touch, press lightly, hold, release.";
    Keyframe k0, k1, k2, k3, k4;
    k0.t_s = 0.0;
    k0.distance_mm = 15.0;
    k0.eta_mm = 0.0;
    k1.t_s = 1.0;
    k1.distance_mm = 0.0;
    k1.eta_mm = 0.0;
    k2.t_s = 1.5;
    k2.eta_mm = eta_mm;
    k3.t_s = 2.5;
    k4.t_s = 3.0;
    k4.eta_mm = 0.0;
    sc.keyframes = {k0, k1, k2, k3, k4};
    return sc;
}

inline AmbiguityCase run_case(Scenario sc, bool ground_plane, const NoiseModel& noise, double t_mid) {
    sc.config.noise = noise;
    sc.config.ground_plane = ground_plane;
    if (ground_plane) {
        sc.name += "_ground_plane";
    }
    AmbiguityCase c;
    c.report = run(sc);
    const auto it = std::min_element(c.report.steps.begin(), c.report.steps.end(),
                                     [t_mid](const RunStep& x, const RunStep& y) {
                                         return std::abs(x.t_s - t_mid) < std::abs(y.t_s - t_mid);
                                     });
    c.segment = *it;
    return c;
}

}  // namespace detail

inline AmbiguityResult ambiguity_demo(const AmbiguityParams& p = {}) {
    AmbiguityResult r;
    r.press_eta_mm = ambiguity_press_eta(SensorModel{}, p.hover_mm);
    const Scenario a = detail::ambiguity_case_a(p.hover_mm);
    const Scenario b = detail::ambiguity_case_b(r.press_eta_mm);
    r.mutual_a = detail::run_case(a, false, p.noise, 1.5);
    r.mutual_b = detail::run_case(b, false, p.noise, 2.0);
    r.augmented_a = detail::run_case(a, true, p.noise, 1.5);
    r.augmented_b = detail::run_case(b, true, p.noise, 2.0);
    return r;
}

}  // namespace taxel
