#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "taxel/errors.hpp"

namespace taxel {

// The constitutive law is written in terms of gap strain, the compression
// measured against the *deformed* gap: eps = eta / (d - eta). For a parallel
// plate this equals dC/C0 exactly, so a piecewise-linear stress law gives a
// piecewise-constant pressure sensitivity.

/// Gap strain eta/(d - eta) from normal strain eta/d.
inline double gap_strain_from_normal_strain(double normal_strain) {
    if (!(normal_strain < 1.0)) {
        throw DomainError("normal strain must be < 1, got " + std::to_string(normal_strain));
    }
    return normal_strain / (1.0 - normal_strain);
}

/// Normal strain eta/d from gap strain eta/(d - eta).
inline double normal_strain_from_gap_strain(double gap_strain) {
    if (!(gap_strain > -1.0)) {
        throw DomainError("gap strain must be > -1, got " + std::to_string(gap_strain));
    }
    return gap_strain / (1.0 + gap_strain);
}

/// Bilinear elastic taxel with a linear shear compliance.
///
/// Stress (kPa) follows E1 up to `strain_break` and E2 beyond it, continuous
/// at the break. `strain_max` bounds the fitted envelope. Shear displacement
/// is `shear_compliance_mm_per_n * force`, valid up to `shear_max_mm`.
struct MaterialModel {
    double e1_kpa = 35.714285714285715;
    double e2_kpa = 333.33333333333331;
    double strain_break = 0.11648000000000003;
    double strain_max = 0.6;
    double shear_compliance_mm_per_n = 0.99264705882352944;
    double shear_max_mm = 0.795;
    double damping_kpa_s = 0.0;

    bool operator==(const MaterialModel&) const = default;

    void validate() const {
        if (!(e1_kpa > 0.0) || !(e2_kpa >= e1_kpa)) {
            throw ValidationError("material moduli must satisfy E2 >= E1 > 0");
        }
        if (!(strain_break > 0.0 && strain_break < 1.0)) {
            throw ValidationError("strain_break must lie in (0, 1)");
        }
        if (!(strain_max > strain_break)) {
            throw ValidationError("strain_max must exceed strain_break");
        }
        if (!(shear_compliance_mm_per_n > 0.0) || !(shear_max_mm > 0.0)) {
            throw ValidationError("shear compliance and range must be positive");
        }
        if (!(damping_kpa_s >= 0.0)) {
            throw ValidationError("damping must be non-negative");
        }
    }

    double break_stress_kpa() const { return e1_kpa * strain_break; }
    double max_stress_kpa() const { return elastic_stress(strain_max); }

    /// Elastic stress without envelope checks; also valid for strain < 0.
    double elastic_stress(double strain) const {
        if (strain <= strain_break) {
            return e1_kpa * strain;
        }
        return break_stress_kpa() + e2_kpa * (strain - strain_break);
    }

    double elastic_strain(double stress_kpa) const {
        if (stress_kpa <= break_stress_kpa()) {
            return stress_kpa / e1_kpa;
        }
        return strain_break + (stress_kpa - break_stress_kpa()) / e2_kpa;
    }
};

inline double pressure_from_strain(const MaterialModel& m, double strain) {
    if (!(strain >= 0.0 && strain <= m.strain_max)) {
        throw OutOfRangeError("strain " + std::to_string(strain) + " outside envelope [0, " +
                              std::to_string(m.strain_max) + "]");
    }
    return m.elastic_stress(strain);
}

inline double strain_from_pressure(const MaterialModel& m, double pressure_kpa) {
    if (!(pressure_kpa >= 0.0 && pressure_kpa <= m.max_stress_kpa())) {
        throw OutOfRangeError("pressure " + std::to_string(pressure_kpa) +
                              " kPa outside envelope [0, " + std::to_string(m.max_stress_kpa()) +
                              "]");
    }
    return m.elastic_strain(pressure_kpa);
}

/// Secant modulus stress(strain)/strain over [0, strain].
inline double secant_modulus(const MaterialModel& m, double strain) {
    if (!(strain > 0.0)) {
        throw DomainError("secant modulus needs a positive strain");
    }
    return pressure_from_strain(m, strain) / strain;
}

inline double shear_displacement_from_force(const MaterialModel& m, double force_n) {
    const double lambda = m.shear_compliance_mm_per_n * force_n;
    if (std::abs(lambda) > m.shear_max_mm) {
        throw OutOfRangeError("shear force " + std::to_string(force_n) +
                              " N outside fitted range");
    }
    return lambda;
}

inline double shear_force_from_displacement(const MaterialModel& m, double lambda_mm) {
    if (std::abs(lambda_mm) > m.shear_max_mm) {
        throw OutOfRangeError("shear displacement " + std::to_string(lambda_mm) +
                              " mm outside fitted range");
    }
    return lambda_mm / m.shear_compliance_mm_per_n;
}

/// Kelvin-Voigt normal response: stress = elastic(strain) + damping * d(strain)/dt.
/// Falls back to the quasi-static strain when damping is zero.
class ViscoelasticStrain {
public:
    explicit ViscoelasticStrain(const MaterialModel& m, double initial_strain = 0.0)
        : material_(m), strain_(initial_strain) {}

    double strain() const { return strain_; }

    double advance(double pressure_kpa, double dt_s) {
        if (material_.damping_kpa_s <= 0.0 || dt_s <= 0.0) {
            strain_ = material_.elastic_strain(pressure_kpa);
            return strain_;
        }
        // Explicit sub-steps; the stable step is bounded by damping / E2.
        const double stable = 0.2 * material_.damping_kpa_s / material_.e2_kpa;
        const int n = std::max(1, static_cast<int>(std::ceil(dt_s / stable)));
        const double h = dt_s / n;
        for (int i = 0; i < n; ++i) {
            const double rate = (pressure_kpa - material_.elastic_stress(strain_)) /
                                material_.damping_kpa_s;
            strain_ += h * rate;
        }
        return strain_;
    }

private:
    MaterialModel material_;
    double strain_;
};

}  // namespace taxel
