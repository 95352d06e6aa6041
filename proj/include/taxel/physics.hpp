#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include "taxel/errors.hpp"
#include "taxel/material.hpp"

namespace taxel {

/// Four values indexed by electrode E1..E4.
using Quad = std::array<double, 4>;

enum class Electrode : std::uint8_t { E1 = 0, E2 = 1, E3 = 2, E4 = 3 };

constexpr std::size_t index(Electrode e) { return static_cast<std::size_t>(e); }

/// Which electrodes form the shear-sensing pairs. A positive shear along an
/// axis grows the overlap of the `pos` electrode and shrinks the `neg` one.
struct AxisMap {
    Electrode x_neg = Electrode::E1;
    Electrode x_pos = Electrode::E3;
    Electrode y_pos = Electrode::E2;
    Electrode y_neg = Electrode::E4;

    bool operator==(const AxisMap&) const = default;

    void validate() const {
        unsigned seen = 0;
        for (Electrode e : {x_neg, x_pos, y_pos, y_neg}) {
            seen |= 1u << index(e);
        }
        if (seen != 0xFu) {
            throw ValidationError("axis map must assign each electrode exactly once");
        }
    }
};

/// Parallel-plate geometry of one taxel. Lengths in mm.
///
/// `eps_w_pf` is a lumped permittivity-width product: it absorbs the fringing
/// fields, so the baseline eps_w * L / d sits in the tens-of-pF range the
/// device shows rather than the femtofarad parallel-plate value.
struct TaxelGeometry {
    double gap_mm = 1.5;             // d
    double overlap_length_mm = 1.5;  // L, half of a 3 mm electrode
    double overlap_width_mm = 3.0;   // W
    double eps_w_pf = 10.0;
    AxisMap axes{};

    bool operator==(const TaxelGeometry&) const = default;

    double baseline_pf() const { return eps_w_pf * overlap_length_mm / gap_mm; }

    void validate() const {
        if (!(gap_mm > 0.0 && overlap_length_mm > 0.0 && overlap_width_mm > 0.0 &&
              eps_w_pf > 0.0)) {
            throw ValidationError("geometry dimensions and eps_w must be positive");
        }
        axes.validate();
    }
};

/// Normal displacement eta toward the bottom electrode and shear displacements
/// of the top layer, all in mm.
struct DeformationState {
    double eta_mm = 0.0;
    double lambda_x_mm = 0.0;
    double lambda_y_mm = 0.0;

    bool operator==(const DeformationState&) const = default;

    void validate(const TaxelGeometry& g) const {
        if (!(eta_mm >= 0.0 && eta_mm < g.gap_mm)) {
            throw DomainError("eta " + std::to_string(eta_mm) + " mm must lie in [0, d=" +
                              std::to_string(g.gap_mm) + ")");
        }
        if (!(std::abs(lambda_x_mm) < g.overlap_length_mm) ||
            !(std::abs(lambda_y_mm) < g.overlap_length_mm)) {
            throw DomainError("shear displacement must stay below the overlap length " +
                              std::to_string(g.overlap_length_mm) + " mm");
        }
    }
};

/// Conductor near the taxel surface. Infinite distance means nothing nearby.
struct ProximityStimulus {
    double distance_mm = std::numeric_limits<double>::infinity();
    bool grounded = true;

    bool operator==(const ProximityStimulus&) const = default;

    static ProximityStimulus none() { return {}; }
    static ProximityStimulus finger(double z_mm) { return {z_mm, true}; }
    static ProximityStimulus insulator(double z_mm) { return {z_mm, false}; }

    bool present() const { return std::isfinite(distance_mm); }
};

/// Shape of the proximity response: the fraction of the contact response seen
/// at distance z. Equals 1 at contact, 0 from z_max on, and decays
/// exponentially in between (pinned at both ends). Large decay lengths tend
/// to a linear ramp.
inline double proximity_shape(double z_mm, double z_max_mm, double decay_mm) {
    if (!(z_mm >= 0.0)) {
        throw DomainError("proximity distance must be >= 0");
    }
    if (z_mm >= z_max_mm) {
        return 0.0;
    }
    const double far = std::exp(-z_max_mm / decay_mm);
    return (std::exp(-z_mm / decay_mm) - far) / (1.0 - far);
}

/// Mutual-capacitance proximity response.
struct ProximityParams {
    double z_max_mm = 15.0;
    double delta_contact = 0.147;  // fractional drop at contact
    double decay_mm = 4.0;
    double insulator_rise = 0.03;  // fractional rise at insulator contact

    bool operator==(const ProximityParams&) const = default;

    /// Average drop across the four electrodes against a 15 mm baseline.
    static ProximityParams finger_approach() { return {}; }
    /// Light-contact response, a separate experiment with a smaller drop.
    static ProximityParams light_contact() {
        ProximityParams p;
        p.delta_contact = 0.11;
        return p;
    }

    void validate() const {
        if (!(z_max_mm > 0.0 && decay_mm > 0.0)) {
            throw ValidationError("proximity z_max and decay length must be positive");
        }
        if (!(delta_contact >= 0.0 && delta_contact < 1.0)) {
            throw ValidationError("proximity delta_contact must lie in [0, 1)");
        }
        if (!(insulator_rise >= 0.0 && insulator_rise <= 0.03)) {
            throw ValidationError("insulator rise must lie in [0, 0.03]");
        }
    }
};

/// Multiplicative factor applied to all four mutual capacitances.
/// Insulators only act at contact.
inline double proximity_factor(const ProximityStimulus& prox, const ProximityParams& p) {
    if (!prox.present()) {
        return 1.0;
    }
    if (!(prox.distance_mm >= 0.0)) {
        throw DomainError("proximity distance must be >= 0");
    }
    if (!prox.grounded) {
        return prox.distance_mm <= 0.0 ? 1.0 + p.insulator_rise : 1.0;
    }
    return 1.0 - p.delta_contact * proximity_shape(prox.distance_mm, p.z_max_mm, p.decay_mm);
}

/// Self-capacitance of the top conductor plane (ground-plane configuration).
struct SelfCapParams {
    double baseline_pf = 6.0;
    double delta_contact_pf = 1.2;
    double z_max_mm = 15.0;
    double decay_mm = 4.0;

    bool operator==(const SelfCapParams&) const = default;

    void validate() const {
        if (!(baseline_pf > 0.0 && delta_contact_pf > 0.0 && z_max_mm > 0.0 && decay_mm > 0.0)) {
            throw ValidationError("self-capacitance parameters must be positive");
        }
    }
};

/// Rises toward baseline + delta as a grounded body approaches; insulators
/// leave it at baseline.
inline double self_capacitance(const ProximityStimulus& prox, const SelfCapParams& p) {
    if (!prox.present() || !prox.grounded) {
        return p.baseline_pf;
    }
    return p.baseline_pf +
           p.delta_contact_pf * proximity_shape(prox.distance_mm, p.z_max_mm, p.decay_mm);
}

/// Stray trace coupling added on top of each electrode.
struct ParasiticModel {
    Quad offsets_pf{0.0, 0.0, 0.0, 0.0};
    bool shielded = false;

    bool operator==(const ParasiticModel&) const = default;

    static ParasiticModel none() { return {}; }

    /// Offsets reproducing the unshielded baselines 44/49/49/38 pF.
    static ParasiticModel unshielded(double ideal_c0_pf = 10.0) {
        return from_baselines({44.0, 49.0, 49.0, 38.0}, ideal_c0_pf, false);
    }

    /// Offsets reproducing the ground-shielded baselines 14/13/14/15 pF.
    static ParasiticModel shielded_preset(double ideal_c0_pf = 10.0) {
        return from_baselines({14.0, 13.0, 14.0, 15.0}, ideal_c0_pf, true);
    }

    static ParasiticModel from_baselines(const Quad& baselines, double ideal_c0_pf, bool shield) {
        ParasiticModel m;
        m.shielded = shield;
        for (std::size_t i = 0; i < 4; ++i) {
            m.offsets_pf[i] = baselines[i] - ideal_c0_pf;
        }
        m.validate();
        return m;
    }

    void validate() const {
        for (double o : offsets_pf) {
            if (!(o >= 0.0)) {
                throw ValidationError("parasitic offsets must be >= 0");
            }
        }
    }
};

/// Linear leak of each axis differential into the other pair.
struct CrosstalkModel {
    double xy_coupling = 0.0;

    bool operator==(const CrosstalkModel&) const = default;

    static CrosstalkModel none() { return {}; }
    /// The 10 % X-to-Y crossover of the shielded prototype.
    static CrosstalkModel prototype() { return {0.10}; }

    void validate() const {
        if (!(xy_coupling >= 0.0 && xy_coupling < 1.0)) {
            throw ValidationError("crosstalk coupling must lie in [0, 1)");
        }
    }
};

struct NoiseModel {
    double sigma_pf = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const NoiseModel&) const = default;

    void validate() const {
        if (!(sigma_pf >= 0.0)) {
            throw ValidationError("noise sigma must be >= 0");
        }
    }
};

/// Seeded additive white noise. Owned by the caller; not thread-safe.
class NoiseStream {
public:
    explicit NoiseStream(const NoiseModel& model) : sigma_(model.sigma_pf), rng_(model.seed) {
        model.validate();
    }

    double next() {
        if (sigma_ == 0.0) {
            return 0.0;
        }
        return sigma_ * normal_(rng_);
    }

    double sigma() const { return sigma_; }

private:
    double sigma_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

enum class FrameMode : std::uint8_t { Mutual, Self };

/// One reading of the taxel. Mutual frames carry C1..C4; self frames carry only
/// the self-capacitance channel.
struct CapacitanceFrame {
    double t_s = 0.0;
    FrameMode mode = FrameMode::Mutual;
    Quad c_pf{0.0, 0.0, 0.0, 0.0};
    std::optional<double> self_cap_pf;

    bool operator==(const CapacitanceFrame&) const = default;

    static CapacitanceFrame mutual(double t, const Quad& c) {
        CapacitanceFrame f{t, FrameMode::Mutual, c, std::nullopt};
        f.validate();
        return f;
    }

    static CapacitanceFrame self(double t, double value) {
        CapacitanceFrame f{t, FrameMode::Self, {0.0, 0.0, 0.0, 0.0}, value};
        f.validate();
        return f;
    }

    void validate() const {
        if (mode == FrameMode::Mutual) {
            if (self_cap_pf) {
                throw ValidationError("mutual frame must not carry a self-capacitance value");
            }
            for (double c : c_pf) {
                if (!(c > 0.0)) {
                    throw DomainError("mutual capacitances must be > 0");
                }
            }
        } else {
            if (!self_cap_pf) {
                throw ValidationError("self frame needs a self-capacitance value");
            }
            if (!(*self_cap_pf > 0.0)) {
                throw DomainError("self-capacitance must be > 0");
            }
            for (double c : c_pf) {
                if (c != 0.0) {
                    throw ValidationError("self frame must not carry mutual channels");
                }
            }
        }
    }
};

/// Parallel-plate capacitances ignoring fringing.
inline Quad ideal_capacitances(const TaxelGeometry& g, const DeformationState& def) {
    def.validate(g);
    const double gap = g.gap_mm - def.eta_mm;
    const double l = g.overlap_length_mm;
    Quad c{};
    c[index(g.axes.x_neg)] = g.eps_w_pf * (l - def.lambda_x_mm) / gap;
    c[index(g.axes.x_pos)] = g.eps_w_pf * (l + def.lambda_x_mm) / gap;
    c[index(g.axes.y_pos)] = g.eps_w_pf * (l + def.lambda_y_mm) / gap;
    c[index(g.axes.y_neg)] = g.eps_w_pf * (l - def.lambda_y_mm) / gap;
    return c;
}

/// Applied loads; pressures are derived over `contact_area_mm2`
/// (the 14 mm x 14 mm indenter by default).
struct AppliedLoad {
    double normal_n = 0.0;
    double shear_x_n = 0.0;
    double shear_y_n = 0.0;
    double contact_area_mm2 = 196.0;

    double pressure_kpa() const { return normal_n / contact_area_mm2 * 1000.0; }
};

/// Quasi-static deformation under a load. The normal part follows the bilinear
/// gap-strain law, the shear part the linear compliance.
inline DeformationState displacement_from_forces(const MaterialModel& m, const TaxelGeometry& g,
                                                 const AppliedLoad& load) {
    if (!(load.contact_area_mm2 > 0.0)) {
        throw ValidationError("contact area must be positive");
    }
    if (!(load.normal_n >= 0.0)) {
        throw DomainError("normal force must be compressive (>= 0)");
    }
    const double gap_strain = strain_from_pressure(m, load.pressure_kpa());
    DeformationState def;
    def.eta_mm = g.gap_mm * normal_strain_from_gap_strain(gap_strain);
    def.lambda_x_mm = shear_displacement_from_force(m, load.shear_x_n);
    def.lambda_y_mm = shear_displacement_from_force(m, load.shear_y_n);
    def.validate(g);
    return def;
}

/// Complete description of one simulated taxel.
struct SensorModel {
    TaxelGeometry geometry{};
    MaterialModel material{};
    ProximityParams proximity{};
    SelfCapParams self_cap{};
    ParasiticModel parasitics{};
    CrosstalkModel crosstalk{};

    bool operator==(const SensorModel&) const = default;

    void validate() const {
        geometry.validate();
        material.validate();
        proximity.validate();
        self_cap.validate();
        parasitics.validate();
        crosstalk.validate();
    }
};

/// Noise-free mutual capacitances for a given proximity factor:
/// factor * ideal + crosstalk leak + parasitic offset.
inline Quad mutual_capacitances(const SensorModel& s, const DeformationState& def,
                                double prox_factor) {
    const Quad ideal = ideal_capacitances(s.geometry, def);
    const AxisMap& ax = s.geometry.axes;
    Quad c{};
    for (std::size_t i = 0; i < 4; ++i) {
        c[i] = prox_factor * ideal[i];
    }
    const double k = s.crosstalk.xy_coupling;
    if (k != 0.0) {
        const double x_half = 0.5 * (c[index(ax.x_pos)] - c[index(ax.x_neg)]);
        const double y_half = 0.5 * (c[index(ax.y_pos)] - c[index(ax.y_neg)]);
        c[index(ax.y_pos)] += k * x_half;
        c[index(ax.y_neg)] -= k * x_half;
        c[index(ax.x_pos)] += k * y_half;
        c[index(ax.x_neg)] -= k * y_half;
    }
    for (std::size_t i = 0; i < 4; ++i) {
        c[i] += s.parasitics.offsets_pf[i];
    }
    return c;
}

/// One mutual-mode reading at time t.
inline CapacitanceFrame measure(const SensorModel& s, const DeformationState& def,
                                const ProximityStimulus& prox, NoiseStream& noise, double t) {
    Quad c = mutual_capacitances(s, def, proximity_factor(prox, s.proximity));
    for (double& v : c) {
        v += noise.next();
    }
    return CapacitanceFrame::mutual(t, c);
}

inline CapacitanceFrame measure(const SensorModel& s, const AppliedLoad& load,
                                const ProximityStimulus& prox, NoiseStream& noise, double t) {
    return measure(s, displacement_from_forces(s.material, s.geometry, load), prox, noise, t);
}

}  // namespace taxel
