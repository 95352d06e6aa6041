#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "taxel/errors.hpp"
#include "taxel/material.hpp"
#include "taxel/physics.hpp"

namespace taxel {

namespace detail {

inline void require_mutual(const CapacitanceFrame& f, const char* which) {
    if (f.mode != FrameMode::Mutual) {
        throw ValidationError(std::string(which) + " frame must be a mutual-mode frame");
    }
}

// (d / eps_w) * (C_neg * C_pos' - C_pos * C_neg') / (C_pos' + C_neg')
inline double pair_shear(const CapacitanceFrame& base, const CapacitanceFrame& cur,
                         const TaxelGeometry& g, Electrode neg, Electrode pos) {
    require_mutual(base, "baseline");
    require_mutual(cur, "current");
    const double c_neg = base.c_pf[index(neg)];
    const double c_pos = base.c_pf[index(pos)];
    const double c_neg_now = cur.c_pf[index(neg)];
    const double c_pos_now = cur.c_pf[index(pos)];
    const double den = c_pos_now + c_neg_now;
    if (!(den > 0.0)) {
        throw DomainError("shear pair sum must be positive");
    }
    return g.gap_mm / g.eps_w_pf * (c_neg * c_pos_now - c_pos * c_neg_now) / den;
}

}  // namespace detail

/// eta/d from the channel sums: sum(dC) / sum(C').
inline double normal_strain(const CapacitanceFrame& base, const CapacitanceFrame& cur) {
    detail::require_mutual(base, "baseline");
    detail::require_mutual(cur, "current");
    double delta = 0.0;
    double now = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        delta += cur.c_pf[i] - base.c_pf[i];
        now += cur.c_pf[i];
    }
    if (!(now > 0.0)) {
        throw DomainError("current channel sum must be positive");
    }
    return delta / now;
}

/// Shear displacement along the E1-E3 axis in mm, positive toward E3.
inline double shear_x(const CapacitanceFrame& base, const CapacitanceFrame& cur,
                      const TaxelGeometry& g) {
    return detail::pair_shear(base, cur, g, g.axes.x_neg, g.axes.x_pos);
}

/// Shear displacement along the E2-E4 axis in mm, positive toward E2.
inline double shear_y(const CapacitanceFrame& base, const CapacitanceFrame& cur,
                      const TaxelGeometry& g) {
    return detail::pair_shear(base, cur, g, g.axes.y_neg, g.axes.y_pos);
}

struct ShearVector {
    double magnitude_mm = 0.0;
    double angle_deg = 0.0;  // [0, 360)
    bool zero = true;        // angle is meaningless when set

    bool operator==(const ShearVector&) const = default;
};

inline ShearVector shear_vector(double sx, double sy) {
    ShearVector v;
    v.magnitude_mm = std::hypot(sx, sy);
    if (v.magnitude_mm == 0.0) {
        return v;
    }
    v.zero = false;
    double a = std::atan2(sy, sx) * 180.0 / std::numbers::pi;
    if (a < 0.0) {
        a += 360.0;
    }
    if (a >= 360.0) {
        a = 0.0;
    }
    v.angle_deg = a;
    return v;
}

inline CapacitanceFrame subtract_parasitics(const CapacitanceFrame& f, const ParasiticModel& p) {
    detail::require_mutual(f, "input");
    CapacitanceFrame out = f;
    for (std::size_t i = 0; i < 4; ++i) {
        out.c_pf[i] -= p.offsets_pf[i];
        if (!(out.c_pf[i] > 0.0)) {
            throw DomainError("channel C" + std::to_string(i + 1) +
                              " is not positive after removing parasitics");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Classification

enum class StimulusKind : std::uint8_t {
    Idle,
    Proximity,
    LightTouch,
    Pressure,
    ShearPX,
    ShearNX,
    ShearPY,
    ShearNY,
    Combined,
};

/// Compass direction of a shear, in 45 degree sectors.
enum class ShearDirection : std::uint8_t { None, PX, PXPY, PY, NXPY, NX, NXNY, NY, PXNY };

inline std::string_view to_string(ShearDirection d) {
    switch (d) {
        case ShearDirection::None: return "none";
        case ShearDirection::PX: return "+X";
        case ShearDirection::PXPY: return "+X+Y";
        case ShearDirection::PY: return "+Y";
        case ShearDirection::NXPY: return "-X+Y";
        case ShearDirection::NX: return "-X";
        case ShearDirection::NXNY: return "-X-Y";
        case ShearDirection::NY: return "-Y";
        case ShearDirection::PXNY: return "+X-Y";
    }
    return "none";
}

/// Stimulus label. Combined stimuli carry a coarse pressure flag and shear
/// direction; the quantitative split comes from the decoded state.
struct StimulusClass {
    StimulusKind kind = StimulusKind::Idle;
    bool pressure = false;
    ShearDirection shear = ShearDirection::None;

    bool operator==(const StimulusClass&) const = default;

    static StimulusClass of(StimulusKind k) { return {k, false, ShearDirection::None}; }

    std::string label() const {
        switch (kind) {
            case StimulusKind::Idle: return "Idle";
            case StimulusKind::Proximity: return "Proximity";
            case StimulusKind::LightTouch: return "LightTouch";
            case StimulusKind::Pressure: return "Pressure";
            case StimulusKind::ShearPX: return "ShearPX";
            case StimulusKind::ShearNX: return "ShearNX";
            case StimulusKind::ShearPY: return "ShearPY";
            case StimulusKind::ShearNY: return "ShearNY";
            case StimulusKind::Combined:
                return std::string("Combined(") + (pressure ? "pressure" : "-") + ";" +
                       std::string(to_string(shear)) + ")";
        }
        return "Idle";
    }

    static StimulusClass parse(std::string_view s) {
        static constexpr std::array simple{
            std::pair{"Idle", StimulusKind::Idle},
            std::pair{"Proximity", StimulusKind::Proximity},
            std::pair{"LightTouch", StimulusKind::LightTouch},
            std::pair{"Pressure", StimulusKind::Pressure},
            std::pair{"ShearPX", StimulusKind::ShearPX},
            std::pair{"ShearNX", StimulusKind::ShearNX},
            std::pair{"ShearPY", StimulusKind::ShearPY},
            std::pair{"ShearNY", StimulusKind::ShearNY},
        };
        for (const auto& [name, k] : simple) {
            if (s == name) {
                return of(k);
            }
        }
        constexpr std::string_view prefix = "Combined(";
        if (s.starts_with(prefix) && s.ends_with(")")) {
            const auto body = s.substr(prefix.size(), s.size() - prefix.size() - 1);
            const auto comma = body.find(';');
            if (comma != std::string_view::npos) {
                StimulusClass c{StimulusKind::Combined, false, ShearDirection::None};
                const auto p = body.substr(0, comma);
                const auto dir = body.substr(comma + 1);
                if (p != "pressure" && p != "-") {
                    throw ValidationError("bad stimulus label: " + std::string(s));
                }
                c.pressure = p == "pressure";
                for (int d = 0; d <= static_cast<int>(ShearDirection::PXNY); ++d) {
                    if (to_string(static_cast<ShearDirection>(d)) == dir) {
                        c.shear = static_cast<ShearDirection>(d);
                        return c;
                    }
                }
            }
        }
        throw ValidationError("bad stimulus label: " + std::string(s));
    }
};

/// Dead-band and bands for the sign-pattern classifier. All values are
/// relative changes (dC/C0).
struct ClassifierThresholds {
    double epsilon_rel = 0.005;
    // All-down drops inside [min, max] are a light touch; smaller ones are
    // proximity. Drops beyond max are still reported as a light touch.
    double proximity_band_min = 0.10;
    double proximity_band_max = 0.16;
    // Self-capacitance rise marking a nearby finger, and contact.
    double self_presence_rel = 0.02;
    double self_contact_rel = 0.18;

    bool operator==(const ClassifierThresholds&) const = default;

    void validate() const {
        if (!(epsilon_rel > 0.0)) {
            throw ValidationError("classifier dead-band must be positive");
        }
        if (!(proximity_band_min > 0.0 && proximity_band_min < proximity_band_max &&
              proximity_band_max < 0.2)) {
            throw ValidationError("proximity band must satisfy 0 < min < max < 0.2");
        }
        if (!(self_presence_rel > 0.0 && self_contact_rel > self_presence_rel)) {
            throw ValidationError("self-capacitance thresholds must satisfy 0 < presence < contact");
        }
    }
};

/// Self-capacitance channel read with the top plane switched away from ground.
struct SelfCapReading {
    double baseline_pf = 0.0;
    double current_pf = 0.0;

    double relative_rise() const { return (current_pf - baseline_pf) / baseline_pf; }
};

namespace detail {

enum class Sign : std::int8_t { Down = -1, Unchanged = 0, Up = 1 };

inline ShearDirection direction_of(double sx, double sy, double dead_band) {
    if (std::hypot(sx, sy) <= dead_band) {
        return ShearDirection::None;
    }
    double a = std::atan2(sy, sx) * 180.0 / std::numbers::pi;
    if (a < 0.0) {
        a += 360.0;
    }
    const int sector = static_cast<int>(std::floor((a + 22.5) / 45.0)) % 8;
    return static_cast<ShearDirection>(sector + 1);
}

}  // namespace detail

/// Table-1 sign-pattern classifier.
///
/// With a self-capacitance reading the mutual channels are assumed shielded
/// from proximity, so an elevated self channel alone marks a finger.
/// Throws InconclusiveError when everything stays inside the dead-band.
inline StimulusClass classify(const CapacitanceFrame& base, const CapacitanceFrame& cur,
                              const ClassifierThresholds& th,
                              const std::optional<SelfCapReading>& self = std::nullopt,
                              const AxisMap& ax = AxisMap{}) {
    detail::require_mutual(base, "baseline");
    detail::require_mutual(cur, "current");
    th.validate();
    using detail::Sign;

    std::array<double, 4> rel{};
    std::array<Sign, 4> sign{};
    int up = 0;
    int down = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (!(base.c_pf[i] > 0.0)) {
            throw DomainError("baseline capacitances must be positive");
        }
        rel[i] = (cur.c_pf[i] - base.c_pf[i]) / base.c_pf[i];
        if (rel[i] > th.epsilon_rel) {
            sign[i] = Sign::Up;
            ++up;
        } else if (rel[i] < -th.epsilon_rel) {
            sign[i] = Sign::Down;
            ++down;
        } else {
            sign[i] = Sign::Unchanged;
        }
    }

    if (up == 0 && down == 0) {
        if (self) {
            const double rise = self->relative_rise();
            if (rise >= th.self_contact_rel) {
                return StimulusClass::of(StimulusKind::LightTouch);
            }
            if (rise >= th.self_presence_rel) {
                return StimulusClass::of(StimulusKind::Proximity);
            }
        }
        throw InconclusiveError("all channels inside the dead-band");
    }
    if (down == 4) {
        const double drop = -(rel[0] + rel[1] + rel[2] + rel[3]) / 4.0;
        return StimulusClass::of(drop >= th.proximity_band_min ? StimulusKind::LightTouch
                                                               : StimulusKind::Proximity);
    }
    if (up == 4) {
        return StimulusClass::of(StimulusKind::Pressure);
    }

    // Pure single-axis shear: one pair moves in opposite directions, the
    // other pair stays inside the dead-band.
    auto s = [&](Electrode e) { return sign[index(e)]; };
    const bool x_quiet = s(ax.x_neg) == Sign::Unchanged && s(ax.x_pos) == Sign::Unchanged;
    const bool y_quiet = s(ax.y_neg) == Sign::Unchanged && s(ax.y_pos) == Sign::Unchanged;
    if (y_quiet) {
        if (s(ax.x_pos) == Sign::Up && s(ax.x_neg) == Sign::Down) {
            return StimulusClass::of(StimulusKind::ShearPX);
        }
        if (s(ax.x_pos) == Sign::Down && s(ax.x_neg) == Sign::Up) {
            return StimulusClass::of(StimulusKind::ShearNX);
        }
    }
    if (x_quiet) {
        if (s(ax.y_pos) == Sign::Up && s(ax.y_neg) == Sign::Down) {
            return StimulusClass::of(StimulusKind::ShearPY);
        }
        if (s(ax.y_pos) == Sign::Down && s(ax.y_neg) == Sign::Up) {
            return StimulusClass::of(StimulusKind::ShearNY);
        }
    }

    // Mixed pattern: split with the strain and shear expressions. Shear is
    // expressed as a fraction of the overlap length (lambda / L), which needs
    // no geometry: (C_neg C_pos' - C_pos C_neg') / (C_pos' + C_neg') / C0.
    const double c0 = (base.c_pf[0] + base.c_pf[1] + base.c_pf[2] + base.c_pf[3]) / 4.0;
    auto pair = [&](Electrode neg, Electrode pos) {
        const double n = base.c_pf[index(neg)] * cur.c_pf[index(pos)] -
                         base.c_pf[index(pos)] * cur.c_pf[index(neg)];
        return n / (cur.c_pf[index(pos)] + cur.c_pf[index(neg)]) / c0;
    };
    const double sx = pair(ax.x_neg, ax.x_pos);
    const double sy = pair(ax.y_neg, ax.y_pos);
    StimulusClass c{StimulusKind::Combined, false, ShearDirection::None};
    c.pressure = normal_strain(base, cur) > th.epsilon_rel;
    c.shear = detail::direction_of(sx, sy, th.epsilon_rel);
    return c;
}

// ---------------------------------------------------------------------------
// Full decode

struct DecodedState {
    double normal_strain = 0.0;  // eta / d
    double shear_x_mm = 0.0;
    double shear_y_mm = 0.0;
    double shear_strain_x = 0.0;  // lambda_x / d
    double shear_strain_y = 0.0;
    double shear_magnitude_mm = 0.0;
    double shear_angle_deg = 0.0;
    double pressure_kpa = 0.0;
    double shear_force_n = 0.0;
    bool saturated = false;  // an estimate was clamped to the material envelope
    StimulusClass stimulus{};

    bool operator==(const DecodedState&) const = default;
};

/// Runs the strain/shear expressions, converts to pressure and shear force
/// through the material model and classifies. Frames must already have their
/// parasitic offsets removed. Dead-band-only frames decode as Idle.
inline DecodedState decode(const CapacitanceFrame& base, const CapacitanceFrame& cur,
                           const TaxelGeometry& g, const MaterialModel& m,
                           const ClassifierThresholds& th,
                           const std::optional<SelfCapReading>& self = std::nullopt) {
    DecodedState d;
    d.normal_strain = normal_strain(base, cur);
    d.shear_x_mm = shear_x(base, cur, g);
    d.shear_y_mm = shear_y(base, cur, g);
    d.shear_strain_x = d.shear_x_mm / g.gap_mm;
    d.shear_strain_y = d.shear_y_mm / g.gap_mm;
    const ShearVector v = shear_vector(d.shear_x_mm, d.shear_y_mm);
    d.shear_magnitude_mm = v.magnitude_mm;
    d.shear_angle_deg = v.angle_deg;

    if (d.normal_strain > 0.0) {
        double eps = gap_strain_from_normal_strain(d.normal_strain);
        if (eps > m.strain_max) {
            eps = m.strain_max;
            d.saturated = true;
        }
        d.pressure_kpa = pressure_from_strain(m, eps);
    }
    double mag = d.shear_magnitude_mm;
    if (mag > m.shear_max_mm) {
        mag = m.shear_max_mm;
        d.saturated = true;
    }
    d.shear_force_n = shear_force_from_displacement(m, mag);

    try {
        d.stimulus = classify(base, cur, th, self, g.axes);
    } catch (const InconclusiveError&) {
        d.stimulus = StimulusClass::of(StimulusKind::Idle);
    }
    return d;
}

}  // namespace taxel
