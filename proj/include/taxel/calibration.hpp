#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "taxel/errors.hpp"
#include "taxel/material.hpp"
#include "taxel/physics.hpp"

namespace taxel {

// ---------------------------------------------------------------------------
// Stress-strain fitting

enum class Branch : std::uint8_t { Loading, Unloading };

struct StressStrainSample {
    double strain = 0.0;  // gap strain
    double stress_kpa = 0.0;
    Branch branch = Branch::Loading;

    bool operator==(const StressStrainSample&) const = default;
};

/// One test run. Cyclic runs list the loading samples followed by the
/// unloading ones and carry the drive frequency.
struct StressStrainRecord {
    std::vector<StressStrainSample> samples;
    double frequency_hz = 0.0;

    bool cyclic() const {
        return frequency_hz > 0.0 &&
               std::any_of(samples.begin(), samples.end(),
                           [](const auto& s) { return s.branch == Branch::Unloading; });
    }
};

struct MaterialFit {
    MaterialModel model;
    double rms_residual_kpa = 0.0;
    std::size_t loading_samples = 0;
};

/// Resolution of the breakpoint grid search.
inline constexpr double kBreakGridStep = 0.005;

namespace detail {

struct BilinearSolve {
    double e1 = 0.0;
    double e2 = 0.0;
    double sse = std::numeric_limits<double>::infinity();
    bool ok = false;
};

// Least squares for stress = E1 * min(s, b) + E2 * max(s - b, 0).
inline BilinearSolve solve_bilinear(std::span<const StressStrainSample> pts, double b) {
    double a11 = 0.0, a12 = 0.0, a22 = 0.0, r1 = 0.0, r2 = 0.0;
    for (const auto& p : pts) {
        const double u = std::min(p.strain, b);
        const double v = std::max(p.strain - b, 0.0);
        a11 += u * u;
        a12 += u * v;
        a22 += v * v;
        r1 += u * p.stress_kpa;
        r2 += v * p.stress_kpa;
    }
    BilinearSolve out;
    const double det = a11 * a22 - a12 * a12;
    if (!(a22 > 0.0) || !(det > 1e-12 * a11 * a22)) {
        return out;
    }
    out.e1 = (r1 * a22 - r2 * a12) / det;
    out.e2 = (a11 * r2 - a12 * r1) / det;
    out.sse = 0.0;
    for (const auto& p : pts) {
        const double model = out.e1 * std::min(p.strain, b) + out.e2 * std::max(p.strain - b, 0.0);
        out.sse += (p.stress_kpa - model) * (p.stress_kpa - model);
    }
    out.ok = true;
    return out;
}

inline std::optional<double> refine_break(std::span<const StressStrainSample> pts, double b) {
    const double lo = b - kBreakGridStep;
    const double hi = b + kBreakGridStep;
    double sxx = 0.0, sxy = 0.0;
    double n = 0.0, ux = 0.0, uy = 0.0, uxx = 0.0, uxy = 0.0;
    for (const auto& p : pts) {
        if (p.strain <= lo) {
            sxx += p.strain * p.strain;
            sxy += p.strain * p.stress_kpa;
        } else if (p.strain >= hi) {
            n += 1.0;
            ux += p.strain;
            uy += p.stress_kpa;
            uxx += p.strain * p.strain;
            uxy += p.strain * p.stress_kpa;
        }
    }
    const double var = n * uxx - ux * ux;
    if (!(sxx > 0.0) || n < 2.0 || !(var > 0.0)) {
        return std::nullopt;
    }
    const double e1 = sxy / sxx;
    const double e2 = (n * uxy - ux * uy) / var;
    const double a = (uy - e2 * ux) / n;
    if (!(e2 > e1)) {
        return std::nullopt;
    }
    const double cross = a / (e1 - e2);
    if (!(cross > lo && cross < hi)) {
        return std::nullopt;
    }
    return cross;
}

// Area enclosed by the loading-then-unloading polygon (shoelace).
inline double loop_area(const std::vector<StressStrainSample>& s) {
    double a = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& p = s[i];
        const auto& q = s[(i + 1) % s.size()];
        a += p.strain * q.stress_kpa - q.strain * p.stress_kpa;
    }
    return std::abs(a) / 2.0;
}

}  // namespace detail

/// Bilinear fit of the loading branches.
///
/// The breakpoint is chosen on a fixed grid of `kBreakGridStep` and then
/// refined inside the winning cell; for each candidate the two moduli come
/// from ordinary least squares. Damping is
/// estimated from the hysteresis loop area of cyclic records, treating the
/// drive as a sinusoid of the record's strain amplitude. The shear part of
/// `base` is passed through unchanged.
inline MaterialFit fit_material(std::span<const StressStrainRecord> records,
                                const MaterialModel& base = MaterialModel{}) {
    std::vector<StressStrainSample> loading;
    for (const auto& r : records) {
        for (const auto& s : r.samples) {
            if (!(s.strain >= 0.0) || !(s.stress_kpa >= 0.0) || !std::isfinite(s.stress_kpa)) {
                throw ValidationError("stress-strain samples need strain >= 0 and stress >= 0");
            }
            if (s.branch == Branch::Loading) {
                loading.push_back(s);
            }
        }
    }
    std::vector<double> distinct;
    double max_strain = 0.0;
    for (const auto& s : loading) {
        max_strain = std::max(max_strain, s.strain);
        if (s.strain > 0.0) {
            distinct.push_back(s.strain);
        }
    }
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) {
        throw DegenerateDataError("need at least two distinct non-zero loading strains");
    }

    detail::BilinearSolve best;
    double best_break = 0.0;
    for (int k = 1;; ++k) {
        const double b = k * kBreakGridStep;
        if (b >= max_strain || b >= 1.0) {
            break;
        }
        const auto sol = detail::solve_bilinear(loading, b);
        if (sol.ok && sol.sse < best.sse) {
            best = sol;
            best_break = b;
        }
    }
    if (!best.ok) {
        throw DegenerateDataError("no breakpoint leaves samples on both branches");
    }
    // Off-grid refinement: intersect the origin line fitted below the
    // bracketing cell with the affine line fitted above it.
    if (const auto b = detail::refine_break(loading, best_break)) {
        const auto sol = detail::solve_bilinear(loading, *b);
        if (sol.ok && sol.sse <= best.sse) {
            best = sol;
            best_break = *b;
        }
    }
    // Single-modulus data can come out with E2 a few ulps below E1.
    if (best.e2 < best.e1 && best.e1 - best.e2 <= 1e-9 * best.e1) {
        best.e2 = best.e1;
    }
    if (!(best.e1 > 0.0) || best.e2 < best.e1) {
        throw DegenerateDataError("data does not stiffen (fitted E2 < E1)");
    }

    MaterialFit fit;
    fit.model = base;
    fit.model.e1_kpa = best.e1;
    fit.model.e2_kpa = best.e2;
    fit.model.strain_break = best_break;
    fit.model.strain_max = std::max(base.strain_max, max_strain);
    fit.rms_residual_kpa = std::sqrt(best.sse / static_cast<double>(loading.size()));
    fit.loading_samples = loading.size();

    double damping_sum = 0.0;
    int cycles = 0;
    for (const auto& r : records) {
        if (!r.cyclic()) {
            continue;
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& s : r.samples) {
            lo = std::min(lo, s.strain);
            hi = std::max(hi, s.strain);
        }
        const double amp = (hi - lo) / 2.0;
        if (amp <= 0.0) {
            continue;
        }
        const double omega = 2.0 * std::numbers::pi * r.frequency_hz;
        damping_sum += detail::loop_area(r.samples) / (std::numbers::pi * omega * amp * amp);
        ++cycles;
    }
    fit.model.damping_kpa_s = cycles > 0 ? damping_sum / cycles : 0.0;
    return fit;
}

/// Samples the loading law of `m` at the given strains.
inline StressStrainRecord synthesize_loading(const MaterialModel& m, std::span<const double> strains) {
    StressStrainRecord r;
    for (double s : strains) {
        r.samples.push_back({s, m.elastic_stress(s), Branch::Loading});
    }
    return r;
}

// ---------------------------------------------------------------------------
// Shear compliance

/// A reported (force, shear strain) pair; strain is lambda / reference height.
struct ShearPin {
    double force_n = 0.0;
    double strain = 0.0;
};

/// The two reported pins: 0.2 N at 13 % and 0.8 N at 53 %.
inline constexpr std::array<ShearPin, 2> kReportedShearPins{{{0.2, 0.13}, {0.8, 0.53}}};

struct ShearFit {
    double compliance_mm_per_n = 0.0;
    double shear_max_mm = 0.0;
    double max_relative_residual = 0.0;
};

/// Least-squares line through the origin; the range is the largest pinned
/// strain times the reference height.
inline ShearFit fit_shear_compliance(std::span<const ShearPin> pins, double reference_height_mm) {
    if (pins.empty() || !(reference_height_mm > 0.0)) {
        throw DegenerateDataError("shear fit needs pins and a positive reference height");
    }
    double sxy = 0.0, sxx = 0.0, smax = 0.0;
    for (const auto& p : pins) {
        sxy += p.force_n * p.strain;
        sxx += p.force_n * p.force_n;
        smax = std::max(smax, std::abs(p.strain));
    }
    if (!(sxx > 0.0)) {
        throw DegenerateDataError("shear fit needs a non-zero force");
    }
    const double strain_per_n = sxy / sxx;
    ShearFit f;
    f.compliance_mm_per_n = strain_per_n * reference_height_mm;
    f.shear_max_mm = smax * reference_height_mm;
    for (const auto& p : pins) {
        if (p.strain != 0.0) {
            f.max_relative_residual = std::max(
                f.max_relative_residual, std::abs(strain_per_n * p.force_n - p.strain) / std::abs(p.strain));
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// Sensitivity

/// Target pressure response of the forward chain, in %/kPa.
struct SensitivityTarget {
    double low_slope_pct_per_kpa = 2.8;
    double high_slope_pct_per_kpa = 0.3;
    double high_pressure_kpa = 80.0;
    double secant_modulus_kpa = 160.0;
    double secant_strain = 0.2;

    /// Low-pressure sensitivity quoted with the headline results.
    static SensitivityTarget headline() { return {}; }
    /// The line fit of the supplementary sensitivity plot.
    static SensitivityTarget line_fit() {
        SensitivityTarget t;
        t.low_slope_pct_per_kpa = 1.5;
        return t;
    }
};

/// Mean of C0 / (C0 + offset) over the four electrodes.
inline double parasitic_dilution(const TaxelGeometry& g, const ParasiticModel& p) {
    const double c0 = g.baseline_pf();
    double k = 0.0;
    for (double o : p.offsets_pf) {
        k += c0 / (c0 + o);
    }
    return k / 4.0;
}

/// Chooses E1, E2 and the breakpoint so the averaged dC/C0 slope equals the
/// low-pressure target on the first branch and the high-pressure target on the
/// second, with the requested secant modulus. Solved in closed form.
inline MaterialModel fit_material_to_sensitivity(const SensitivityTarget& t,
                                                 const TaxelGeometry& g = TaxelGeometry{},
                                                 const ParasiticModel& p = ParasiticModel{},
                                                 const MaterialModel& base = MaterialModel{}) {
    const double k = parasitic_dilution(g, p);
    MaterialModel m = base;
    m.e1_kpa = k / (t.low_slope_pct_per_kpa / 100.0);
    m.e2_kpa = k / (t.high_slope_pct_per_kpa / 100.0);
    const double secant_stress = t.secant_modulus_kpa * t.secant_strain;
    if (!(m.e1_kpa * t.secant_strain < secant_stress && secant_stress < m.e2_kpa * t.secant_strain)) {
        throw DegenerateDataError("secant modulus target is not reachable with these slopes");
    }
    m.strain_break = (m.e2_kpa * t.secant_strain - secant_stress) / (m.e2_kpa - m.e1_kpa);
    if (m.break_stress_kpa() >= t.high_pressure_kpa) {
        throw DegenerateDataError("high-pressure target falls on the soft branch");
    }
    m.validate();
    return m;
}

/// Material calibrated to the headline sensitivity and the reported shear pins.
inline MaterialModel paper_material(const TaxelGeometry& g = TaxelGeometry{},
                                    const SensitivityTarget& t = SensitivityTarget::headline()) {
    MaterialModel m = fit_material_to_sensitivity(t, g);
    const ShearFit s = fit_shear_compliance(kReportedShearPins, g.gap_mm);
    m.shear_compliance_mm_per_n = s.compliance_mm_per_n;
    m.shear_max_mm = s.shear_max_mm;
    return m;
}

struct SensitivityRow {
    double pressure_kpa = 0.0;
    Quad rel_pct{};        // dC/C0 per electrode, %
    double rel_avg_pct = 0.0;
    Quad delta_pf{};       // absolute dC per electrode
    Quad slope_pct_per_kpa{};
    double slope_avg_pct_per_kpa = 0.0;
};

struct SensitivityTable {
    std::vector<SensitivityRow> rows;

    /// Row whose pressure is closest to p.
    const SensitivityRow& at(double p) const {
        return *std::min_element(rows.begin(), rows.end(), [p](const auto& a, const auto& b) {
            return std::abs(a.pressure_kpa - p) < std::abs(b.pressure_kpa - p);
        });
    }
};

/// Sweeps pressure through force -> displacement -> capacitance and tabulates
/// the relative response. Slopes are central differences of width 2h.
inline SensitivityTable sensitivity_curve(const TaxelGeometry& g, const MaterialModel& m,
                                          const ParasiticModel& p, double max_pressure_kpa = 80.0,
                                          double step_kpa = 1.0, double contact_area_mm2 = 196.0) {
    SensorModel s;
    s.geometry = g;
    s.material = m;
    s.parasitics = p;
    const Quad rest = mutual_capacitances(s, DeformationState{}, 1.0);
    auto caps = [&](double kpa) {
        AppliedLoad load;
        load.contact_area_mm2 = contact_area_mm2;
        load.normal_n = kpa * contact_area_mm2 / 1000.0;
        return mutual_capacitances(s, displacement_from_forces(m, g, load), 1.0);
    };
    constexpr double h = 0.05;
    SensitivityTable table;
    const int n = static_cast<int>(std::floor(max_pressure_kpa / step_kpa + 1e-9));
    for (int i = 0; i <= n; ++i) {
        const double kpa = i * step_kpa;
        SensitivityRow row;
        row.pressure_kpa = kpa;
        const Quad c = caps(kpa);
        const double lo_p = std::max(0.0, kpa - h);
        const double hi_p = kpa + h;
        const Quad lo = caps(lo_p);
        const Quad hi = caps(hi_p);
        for (std::size_t e = 0; e < 4; ++e) {
            row.delta_pf[e] = c[e] - rest[e];
            row.rel_pct[e] = 100.0 * row.delta_pf[e] / rest[e];
            row.slope_pct_per_kpa[e] = 100.0 * (hi[e] - lo[e]) / rest[e] / (hi_p - lo_p);
            row.rel_avg_pct += row.rel_pct[e] / 4.0;
            row.slope_avg_pct_per_kpa += row.slope_pct_per_kpa[e] / 4.0;
        }
        table.rows.push_back(row);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Proximity

/// Average relative change at distance z against the 15 mm baseline.
struct ProximitySample {
    double z_mm = 0.0;
    double rel = 0.0;
};

struct ProximityFit {
    ProximityParams params;
    double rms = 0.0;  // against the (re-referenced) input
    bool monotone_input = true;
};

/// Pool-adjacent-violators fit of a non-decreasing sequence.
inline std::vector<double> isotonic_non_decreasing(std::span<const double> y) {
    struct Block {
        double sum;
        std::size_t n;
        double mean() const { return sum / static_cast<double>(n); }
    };
    std::vector<Block> blocks;
    for (double v : y) {
        blocks.push_back({v, 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
            Block top = blocks.back();
            blocks.pop_back();
            blocks.back().sum += top.sum;
            blocks.back().n += top.n;
        }
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (const auto& b : blocks) {
        out.insert(out.end(), b.n, b.mean());
    }
    return out;
}

/// Fits the pinned-exponential proximity shape to a measured approach profile.
///
/// The profile is sorted by distance, made monotone by isotonic regression,
/// and re-referenced so the z_max sample is zero. The contact drop is pinned
/// to the z = 0 sample; only the decay length is searched (log grid, then
/// golden section).
inline ProximityFit fit_proximity(std::span<const ProximitySample> profile,
                                  const ProximityParams& base = ProximityParams{}) {
    std::vector<ProximitySample> pts(profile.begin(), profile.end());
    std::stable_sort(pts.begin(), pts.end(),
                     [](const auto& a, const auto& b) { return a.z_mm < b.z_mm; });
    if (pts.empty() || pts.front().z_mm != 0.0) {
        throw ValidationError("proximity profile needs a z = 0 sample");
    }
    if (pts.back().z_mm < base.z_max_mm) {
        throw ValidationError("proximity profile needs a sample at z >= z_max");
    }
    std::vector<double> y;
    for (const auto& p : pts) {
        y.push_back(p.rel);
    }
    ProximityFit fit;
    fit.params = base;
    const std::vector<double> iso = isotonic_non_decreasing(y);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (iso[i] != y[i]) {
            fit.monotone_input = false;
        }
    }
    // Reference against the first sample at or beyond z_max.
    std::size_t ref = 0;
    while (pts[ref].z_mm < base.z_max_mm) {
        ++ref;
    }
    const double offset = iso[ref];
    std::vector<double> target(iso.size());
    for (std::size_t i = 0; i < iso.size(); ++i) {
        target[i] = iso[i] - offset;
    }
    const double delta = -target.front();
    auto rms_against_input = [&](const ProximityParams& p) {
        double sse = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double model = -p.delta_contact * proximity_shape(pts[i].z_mm, p.z_max_mm, p.decay_mm);
            sse += (model - (y[i] - offset)) * (model - (y[i] - offset));
        }
        return std::sqrt(sse / static_cast<double>(pts.size()));
    };
    if (!(delta > 0.0)) {
        fit.params.delta_contact = 0.0;
        fit.rms = rms_against_input(fit.params);
        return fit;
    }
    fit.params.delta_contact = delta;

    auto sse = [&](double log_tau) {
        const double tau = std::exp(log_tau);
        double s = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double r = target[i] + delta * proximity_shape(pts[i].z_mm, base.z_max_mm, tau);
            s += r * r;
        }
        return s;
    };
    const double lo = std::log(0.05);
    const double hi = std::log(1000.0);
    constexpr int grid = 400;
    int best = 0;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
        const double v = sse(lo + (hi - lo) * i / grid);
        if (v < best_sse) {
            best_sse = v;
            best = i;
        }
    }
    double a = lo + (hi - lo) * std::max(best - 1, 0) / grid;
    double b = lo + (hi - lo) * std::min(best + 1, grid) / grid;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
        if (sse(c) < sse(d)) {
            b = d;
        } else {
            a = c;
        }
        c = b - invphi * (b - a);
        d = a + invphi * (b - a);
    }
    fit.params.decay_mm = std::exp((a + b) / 2.0);
    fit.rms = rms_against_input(fit.params);
    return fit;
}

// ---------------------------------------------------------------------------
// Parameter files
//
//   # comment
//   geometry.gap = 1.5 mm
//
// One `key = value unit` per line. Unknown keys and unit mismatches are
// errors; missing keys keep their defaults.

struct CalibrationSet {
    TaxelGeometry geometry{};
    MaterialModel material{};
    ProximityParams proximity{};
    SelfCapParams self_cap{};
    ParasiticModel parasitics{};
    CrosstalkModel crosstalk{};

    bool operator==(const CalibrationSet&) const = default;

    SensorModel sensor() const {
        return SensorModel{geometry, material, proximity, self_cap, parasitics, crosstalk};
    }
    static CalibrationSet from(const SensorModel& s) {
        return CalibrationSet{s.geometry, s.material, s.proximity, s.self_cap, s.parasitics, s.crosstalk};
    }
};

namespace detail {

struct ParamField {
    const char* key;
    const char* unit;
    std::function<double&(CalibrationSet&)> ref;
};

inline const std::vector<ParamField>& param_fields() {
    static const std::vector<ParamField> fields{
        {"geometry.gap", "mm", [](CalibrationSet& c) -> double& { return c.geometry.gap_mm; }},
        {"geometry.overlap_length", "mm", [](CalibrationSet& c) -> double& { return c.geometry.overlap_length_mm; }},
        {"geometry.overlap_width", "mm", [](CalibrationSet& c) -> double& { return c.geometry.overlap_width_mm; }},
        {"geometry.eps_w", "pF", [](CalibrationSet& c) -> double& { return c.geometry.eps_w_pf; }},
        {"material.E1", "kPa", [](CalibrationSet& c) -> double& { return c.material.e1_kpa; }},
        {"material.E2", "kPa", [](CalibrationSet& c) -> double& { return c.material.e2_kpa; }},
        {"material.strain_break", "1", [](CalibrationSet& c) -> double& { return c.material.strain_break; }},
        {"material.strain_max", "1", [](CalibrationSet& c) -> double& { return c.material.strain_max; }},
        {"material.shear_compliance", "mm/N", [](CalibrationSet& c) -> double& { return c.material.shear_compliance_mm_per_n; }},
        {"material.shear_max", "mm", [](CalibrationSet& c) -> double& { return c.material.shear_max_mm; }},
        {"material.damping", "kPa*s", [](CalibrationSet& c) -> double& { return c.material.damping_kpa_s; }},
        {"proximity.z_max", "mm", [](CalibrationSet& c) -> double& { return c.proximity.z_max_mm; }},
        {"proximity.delta_contact", "1", [](CalibrationSet& c) -> double& { return c.proximity.delta_contact; }},
        {"proximity.decay", "mm", [](CalibrationSet& c) -> double& { return c.proximity.decay_mm; }},
        {"proximity.insulator_rise", "1", [](CalibrationSet& c) -> double& { return c.proximity.insulator_rise; }},
        {"self_cap.baseline", "pF", [](CalibrationSet& c) -> double& { return c.self_cap.baseline_pf; }},
        {"self_cap.delta_contact", "pF", [](CalibrationSet& c) -> double& { return c.self_cap.delta_contact_pf; }},
        {"self_cap.z_max", "mm", [](CalibrationSet& c) -> double& { return c.self_cap.z_max_mm; }},
        {"self_cap.decay", "mm", [](CalibrationSet& c) -> double& { return c.self_cap.decay_mm; }},
        {"parasitics.C1", "pF", [](CalibrationSet& c) -> double& { return c.parasitics.offsets_pf[0]; }},
        {"parasitics.C2", "pF", [](CalibrationSet& c) -> double& { return c.parasitics.offsets_pf[1]; }},
        {"parasitics.C3", "pF", [](CalibrationSet& c) -> double& { return c.parasitics.offsets_pf[2]; }},
        {"parasitics.C4", "pF", [](CalibrationSet& c) -> double& { return c.parasitics.offsets_pf[3]; }},
        {"crosstalk.xy_coupling", "1", [](CalibrationSet& c) -> double& { return c.crosstalk.xy_coupling; }},
    };
    return fields;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_calibration(std::ostream& os, const CalibrationSet& set) {
    CalibrationSet copy = set;
    os << "# taxel calibration parameters (key = value unit)\n";
    for (const auto& f : detail::param_fields()) {
        os << f.key << " = " << detail::format_double(f.ref(copy)) << ' ' << f.unit << '\n';
    }
    os << "parasitics.shielded = " << (set.parasitics.shielded ? "true" : "false") << " bool\n";
}

inline CalibrationSet read_calibration(std::istream& is) {
    CalibrationSet set;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = detail::trim(std::string_view(line).substr(0, hash));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("calibration line " + std::to_string(line_no) + ": expected key = value unit");
        }
        const std::string key = detail::trim(std::string_view(body).substr(0, eq));
        const std::string rest = detail::trim(std::string_view(body).substr(eq + 1));
        const auto sp = rest.find_first_of(" \t");
        const std::string value = rest.substr(0, sp);
        const std::string unit = sp == std::string::npos ? "" : detail::trim(std::string_view(rest).substr(sp));
        auto fail = [&](const std::string& why) {
            throw ValidationError("calibration line " + std::to_string(line_no) + " (" + key + "): " + why);
        };
        if (key == "parasitics.shielded") {
            if (unit != "bool" || (value != "true" && value != "false")) {
                fail("expected true|false bool");
            }
            set.parasitics.shielded = value == "true";
            continue;
        }
        const auto& fields = detail::param_fields();
        const auto it = std::find_if(fields.begin(), fields.end(),
                                     [&](const auto& f) { return key == f.key; });
        if (it == fields.end()) {
            fail("unknown key");
        }
        if (unit != it->unit) {
            fail("expected unit '" + std::string(it->unit) + "', got '" + unit + "'");
        }
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(v)) {
            fail("bad number '" + value + "'");
        }
        it->ref(set) = v;
    }
    set.sensor().validate();
    return set;
}

}  // namespace taxel
