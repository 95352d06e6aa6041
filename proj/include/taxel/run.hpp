#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "taxel/decoder.hpp"
#include "taxel/material.hpp"
#include "taxel/physics.hpp"
#include "taxel/readout.hpp"
#include "taxel/scenario.hpp"

namespace taxel {

struct RunStep {
    double t_s = 0.0;
    CapacitanceFrame frame{};          // raw mutual frame as read out
    std::optional<double> self_cap_pf;  // latest SELF value while the ground plane is fitted
    DecodedState decoded{};

    bool operator==(const RunStep&) const = default;
};

struct RunSummary {
    double max_pressure_kpa = 0.0;
    double max_shear_mm = 0.0;
    double max_shear_n = 0.0;
    std::size_t saturated_steps = 0;
    std::vector<std::string> class_sequence;  // consecutive duplicates collapsed

    bool operator==(const RunSummary&) const = default;
};

struct RunReport {
    std::string scenario;
    std::uint64_t seed = 0;
    double step_dt_s = 0.0;
    CapacitanceFrame baseline{};
    std::optional<double> baseline_self_pf;
    std::vector<RunStep> steps;
    RunSummary summary{};
    std::vector<std::string> warnings;

    bool operator==(const RunReport&) const = default;
};

inline RunSummary summarize(const std::vector<RunStep>& steps) {
    RunSummary s;
    for (const auto& st : steps) {
        s.max_pressure_kpa = std::max(s.max_pressure_kpa, st.decoded.pressure_kpa);
        s.max_shear_mm = std::max(s.max_shear_mm, st.decoded.shear_magnitude_mm);
        s.max_shear_n = std::max(s.max_shear_n, st.decoded.shear_force_n);
        if (st.decoded.saturated) {
            ++s.saturated_steps;
        }
        std::string label = st.decoded.stimulus.label();
        if (s.class_sequence.empty() || s.class_sequence.back() != label) {
            s.class_sequence.push_back(std::move(label));
        }
    }
    return s;
}

/// Evaluates a scenario timeline at increasing times. Force-driven normal
/// loading goes through the viscoelastic stepper, so calls must be made in
/// non-decreasing time order.
class ScenarioWorld {
public:
    explicit ScenarioWorld(const Scenario& sc)
        : config_(sc.config),
          mode_(sc.interpolation),
          keys_(resolve_keyframes(sc)),
          strain_(sc.config.sensor.material) {}

    ResolvedKeyframe stimulus(double t) const { return interpolate(keys_, mode_, t); }

    bool ground_plane_at(double t) const { return stimulus(t).ground_plane; }

    WorldSample operator()(double t) {
        const ResolvedKeyframe k = stimulus(t);
        WorldSample w;
        w.deformation = static_deformation(k, config_);
        const auto& m = config_.sensor.material;
        if (k.normal_by_force && m.damping_kpa_s > 0.0) {
            const double p = k.normal / config_.contact_area_mm2 * 1000.0;
            const double dt = last_t_ ? std::max(0.0, t - *last_t_) : 0.0;
            const double eps = last_t_ ? strain_.advance(p, dt) : strain_.advance(p, 0.0);
            w.deformation.eta_mm = config_.sensor.geometry.gap_mm * normal_strain_from_gap_strain(eps);
            w.deformation.validate(config_.sensor.geometry);
        }
        last_t_ = t;
        if (std::isfinite(k.distance_mm)) {
            w.proximity = ProximityStimulus{k.distance_mm, k.grounded};
        }
        return w;
    }

    double start() const { return keys_.front().t_s; }
    double end() const { return keys_.back().t_s; }

private:
    ScenarioConfig config_;
    Interpolation mode_;
    std::vector<ResolvedKeyframe> keys_;
    ViscoelasticStrain strain_;
    std::optional<double> last_t_;
};

namespace detail {

inline MuxSchedule schedule_for(const ScenarioConfig& cfg, bool ground_plane) {
    if (!ground_plane) {
        return MuxSchedule::mutual_only();
    }
    MuxSchedule s = MuxSchedule::with_self(cfg.self_every);
    s.ground_plane_leakage = cfg.ground_plane_leakage;
    return s;
}

}  // namespace detail

/// Forward simulation, readout and decode over the scenario timeline.
/// A rest cycle before the first keyframe provides the baseline. With
/// `step_dt_s` = 0 the step is one full multiplexer cycle. When `records` is
/// given, every converted sample (baseline cycle first) is appended to it.
inline RunReport run(const Scenario& sc, double step_dt_s = 0.0,
                     std::vector<FrameRecord>* records = nullptr) {
    sc.validate();
    const ScenarioConfig& cfg = sc.config;
    const bool any_gp = sc.uses_ground_plane();
    const double cycle = detail::schedule_for(cfg, any_gp).cycle_duration(cfg.cdc);
    if (step_dt_s == 0.0) {
        step_dt_s = cycle;
    }
    if (!(step_dt_s >= cycle - 1e-12)) {
        throw ValidationError("step_dt must be at least one multiplexer cycle (" +
                              std::to_string(cycle) + " s)");
    }

    RunReport rep;
    rep.scenario = sc.name;
    rep.seed = cfg.noise.seed;
    rep.step_dt_s = step_dt_s;

    NoiseStream noise(cfg.noise);
    ScenarioWorld world(sc);
    const double t0 = world.start();

    auto rest = [](double) { return WorldSample{}; };
    const CycleResult base = run_cycle(detail::schedule_for(cfg, any_gp), cfg.cdc, cfg.sensor, rest,
                                       noise, t0 - cycle, 0);
    if (base.saturated) {
        throw SaturationError("baseline reading saturates the converter");
    }
    rep.baseline = base.mutual;
    if (records) {
        records->insert(records->end(), base.records.begin(), base.records.end());
    }
    if (base.self) {
        rep.baseline_self_pf = base.self->self_cap_pf;
    }
    const CapacitanceFrame base_sub = subtract_parasitics(base.mutual, cfg.sensor.parasitics);

    std::optional<double> latest_self;
    bool warned_saturation = false;
    const auto n_steps = static_cast<std::uint64_t>(std::floor((world.end() - t0) / step_dt_s + 1e-9)) + 1;
    for (std::uint64_t n = 0; n < n_steps; ++n) {
        const double t = t0 + static_cast<double>(n) * step_dt_s;
        const bool gp = world.ground_plane_at(t);
        const CycleResult cyc =
            run_cycle(detail::schedule_for(cfg, gp), cfg.cdc, cfg.sensor, world, noise, t, n + 1);
        if (records) {
            records->insert(records->end(), cyc.records.begin(), cyc.records.end());
        }
        if (!gp) {
            latest_self.reset();
        } else if (cyc.self) {
            latest_self = cyc.self->self_cap_pf;
        }
        if (cyc.saturated && !warned_saturation) {
            rep.warnings.push_back("converter saturated at t=" + std::to_string(t) + " s");
            warned_saturation = true;
        }

        std::optional<SelfCapReading> self;
        if (latest_self && rep.baseline_self_pf) {
            self = SelfCapReading{*rep.baseline_self_pf, *latest_self};
        }
        RunStep step;
        step.t_s = cyc.mutual.t_s;
        step.frame = cyc.mutual;
        step.self_cap_pf = latest_self;
        step.decoded = decode(base_sub, subtract_parasitics(cyc.mutual, cfg.sensor.parasitics),
                              cfg.sensor.geometry, cfg.sensor.material, cfg.thresholds, self);
        rep.steps.push_back(std::move(step));
    }
    rep.summary = summarize(rep.steps);
    return rep;
}

/// Runs independent scenarios on worker threads; results keep input order.
inline std::vector<RunReport> run_many(const std::vector<Scenario>& scenarios, double step_dt_s = 0.0) {
    std::vector<std::future<RunReport>> jobs;
    jobs.reserve(scenarios.size());
    for (const auto& sc : scenarios) {
        jobs.push_back(std::async(std::launch::async, [&sc, step_dt_s] { return run(sc, step_dt_s); }));
    }
    std::vector<RunReport> out;
    out.reserve(jobs.size());
    for (auto& j : jobs) {
        out.push_back(j.get());
    }
    return out;
}

}  // namespace taxel
